"""
Configuration package for the separation toolkit.
"""
