"""Finite-blocklength evaluation of the zero-rate and positive-rate coding schemes."""
