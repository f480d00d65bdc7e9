"""Error-probability estimates produced by the exact evaluator and the simulators."""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log, sqrt
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from ..core.errors import ModelValidationError

EXACT = "exact"
MONTE_CARLO = "monte_carlo"
METHODS = (EXACT, MONTE_CARLO)

Z95 = float(norm.ppf(0.975))
PROB_TOL = 1e-12

# Event keys: detector, decided hypothesis, true hypothesis.
EVENT_KEYS = tuple((det, dec, hyp) for det in (1, 2) for dec in (0, 1) for hyp in (0, 1))


@dataclass(frozen=True)
class ErrorEstimate:
    """α and β of both detectors at blocklength ``n``, with β logs kept separately."""

    n: int
    alpha1: float
    beta1: float
    alpha2: float
    beta2: float
    log_betas: tuple[float, float]
    exponents: tuple[float, float]
    ci95: tuple[float, float, float, float]
    method: str
    trials: int = 0

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ModelValidationError(f"method must be one of {METHODS}, got {self.method!r}")
        for label in ("alpha1", "beta1", "alpha2", "beta2"):
            value = getattr(self, label)
            if not -PROB_TOL <= value <= 1.0 + PROB_TOL:
                raise ModelValidationError(f"{label}={value!r} is not a probability")
            object.__setattr__(self, label, min(max(float(value), 0.0), 1.0))
        if self.method == EXACT and any(self.ci95):
            raise ModelValidationError("exact estimates carry zero confidence half-widths")

    @property
    def probabilities(self) -> tuple[float, float, float, float]:
        return self.alpha1, self.beta1, self.alpha2, self.beta2


def error_roles(coherent: bool) -> dict[str, tuple[int, int, int]]:
    """Map each error name to its (detector, wrong decision, true hypothesis) event.

    Coherent: Detector 1 protects 𝓗=0 like Detector 2. Concurrent: Detector 1
    protects 𝓗=1, so its type-II error is deciding 1 under 𝓗=0.
    """
    if coherent:
        first = {"alpha1": (1, 1, 0), "beta1": (1, 0, 1)}
    else:
        first = {"alpha1": (1, 0, 1), "beta1": (1, 1, 0)}
    return {**first, "alpha2": (2, 1, 0), "beta2": (2, 0, 1)}


def from_log_probabilities(
    n: int, log_probs: dict[tuple[int, int, int], float], coherent: bool
) -> ErrorEstimate:
    """Exact estimate from ln Pr{Ĥ_k = d | 𝓗 = h} for every event key."""
    roles = error_roles(coherent)
    values = {name: min(exp(log_probs[key]), 1.0) for name, key in roles.items()}
    log_betas = (log_probs[roles["beta1"]], log_probs[roles["beta2"]])
    return ErrorEstimate(
        n=n,
        **values,
        log_betas=log_betas,
        exponents=tuple(_exponent(value, n) for value in log_betas),
        ci95=(0.0, 0.0, 0.0, 0.0),
        method=EXACT,
    )


def from_counts(
    n: int, counts: dict[tuple[int, int, int], int], trials: int, coherent: bool
) -> ErrorEstimate:
    """Monte-Carlo estimate from event counts over ``trials`` draws per hypothesis."""
    roles = error_roles(coherent)
    values = {name: counts[key] / trials for name, key in roles.items()}
    log_betas = tuple(
        log(values[name]) if values[name] > 0.0 else float("-inf") for name in ("beta1", "beta2")
    )
    ci95 = tuple(wilson_half_width(counts[roles[name]], trials) for name in roles)
    return ErrorEstimate(
        n=n,
        **values,
        log_betas=log_betas,
        exponents=tuple(_exponent(value, n) for value in log_betas),
        ci95=ci95,
        method=MONTE_CARLO,
        trials=trials,
    )


def wilson_half_width(successes: int, trials: int, z: float = Z95) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ModelValidationError("a confidence interval needs at least one trial")
    p_hat = successes / trials
    spread = z * sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials))
    return spread / (1.0 + z * z / trials)


def combine_log_sums(parts: Sequence[float] | np.ndarray) -> float:
    """ln Σ exp(parts), with an empty or all -inf input giving -inf."""
    values = np.asarray(parts, dtype=float).reshape(-1)
    finite = values[np.isfinite(values)]
    return float(logsumexp(finite)) if finite.size else float("-inf")


def _exponent(log_beta: float, n: int) -> float:
    if not np.isfinite(log_beta):
        return float("inf")
    value = -log_beta / n
    return value if value > 0.0 else 0.0
