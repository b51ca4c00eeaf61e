"""
Test suite for padic-polygon.
"""
