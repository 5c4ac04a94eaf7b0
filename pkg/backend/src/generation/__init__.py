"""
Generation Module
Sampling of the modified Newman-Watts graph, the original NW baseline and the
mnw v1 edge-list file format
"""
