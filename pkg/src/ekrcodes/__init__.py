"""Erdős–Ko–Rado computations for linear codes and extended Reed–Solomon codes."""

__version__ = "0.1.0"
