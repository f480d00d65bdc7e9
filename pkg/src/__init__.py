"""Error-exponent regions of a one-sensor, two-detector cooperative hypothesis-testing system."""
