"""
Tests for the mfaoa package.
"""
