"""Probability primitives, divergence minimization, errors and the worker pool."""
