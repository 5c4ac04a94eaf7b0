"""
Model Module
Parameters and lattice-torus geometry of the modified Newman-Watts small world
"""
