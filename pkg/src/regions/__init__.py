"""Exponent regions in the zero-rate, positive-rate and high-rate regimes."""
