"""Skeletons of coclass graphs of p-groups of maximal class, computed on
the parameter side, with Galois-tree analysis and theorem verification."""

__version__ = "0.1.0"
