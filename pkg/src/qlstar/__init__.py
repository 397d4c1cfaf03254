"""Supertropical quadratic forms: QL-stars, saturation and QL-path combinatorics."""
__version__ = "0.1.0"
