"""Exact computations with PROPs: free and quadratic PROPs over decorated
directed graphs, bar and cobar constructions, Koszul duals and Koszul
complexes, all over the rationals."""

__version__ = "0.1.0"
