"""
Maintenance scheduling and location choice solver
"""

__version__ = "1.0.0"
