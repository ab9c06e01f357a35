"""
Test configuration - puts the repository root on the import path
"""
