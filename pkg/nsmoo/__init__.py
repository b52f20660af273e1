"""
Non-smooth Multiobjective Optimization Toolkit
Main package initialization
"""
__version__ = "0.3.0"
__author__ = "nsmoo Team"
