"""Deterministic polynomial factoring over prime fields via implicit 2-dimensional WL."""
