"""Exact computations with alternating multilinear forms."""
