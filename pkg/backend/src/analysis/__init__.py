"""
Analysis Module
Adjacency structure, lazy random walk, spectral quantities and the inequality
toolkit (large deviations, isoperimetry, empty boxes)
"""
