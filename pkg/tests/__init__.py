"""
Test suite for scenicness-toolkit.

This package contains tests for every module of the scenicness toolkit.
"""
