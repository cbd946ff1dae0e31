"""Exact Lie pair, PBW and Kapranov computations."""
