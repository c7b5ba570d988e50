"""
Utility functions and helpers for the separation toolkit.
"""
