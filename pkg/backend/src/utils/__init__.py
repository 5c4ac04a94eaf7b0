"""
Utilities Module
Settings, logging setup, exceptions and parallel helpers
"""
