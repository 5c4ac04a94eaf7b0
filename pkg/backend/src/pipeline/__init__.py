"""
Pipeline Module
Scaling-law experiments: parameter grids, resumable scans, polylog fits and the
empty-box frequency study
"""
