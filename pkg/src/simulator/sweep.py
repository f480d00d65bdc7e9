"""Finite-n exponents next to their asymptotic counterparts."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from loguru import logger

from ..core.divmin import DEFAULT_TOL
from ..core.errors import ModelValidationError
from ..core.prob import HypothesisPair
from ..regions.frontier import COHERENT
from ..regions.zero_rate import (
    NO_COOP_COHERENT,
    NO_COOP_EQUAL_MARGINALS,
    NO_COOP_W1GE3,
    partition_point,
    region_coherent,
    region_concurrent_equal_marginals,
    region_concurrent_W1ge3,
    region_no_cooperation,
)
from .estimates import ErrorEstimate
from .zero_rate_scheme import (
    ZeroRateSchemeConfig,
    exact_budget_allows,
    exact_zero_rate_errors,
    monte_carlo_zero_rate,
)

DEFAULT_SWEEP_TRIALS = 100_000


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    estimate: ErrorEstimate
    theoretical: tuple[float, float]

    @property
    def empirical(self) -> tuple[float, float]:
        return self.estimate.exponents

    @property
    def gaps(self) -> tuple[float, float]:
        return (
            abs(self.empirical[0] - self.theoretical[0]),
            abs(self.empirical[1] - self.theoretical[1]),
        )


def asymptotic_exponents(
    pair: HypothesisPair,
    config: ZeroRateSchemeConfig,
    px_grid_step: float = 0.01,
    tol: float = DEFAULT_TOL,
) -> tuple[float, float]:
    """(θ1, θ2) of the region point the configured scheme operates at."""
    if config.mode == COHERENT:
        if config.cooperative:
            return region_coherent(pair, tol).corner
        return region_no_cooperation(pair, NO_COOP_COHERENT, tol).corner
    if pair.x_marginals_equal():
        if config.cooperative:
            return region_concurrent_equal_marginals(pair, tol).corner
        return region_no_cooperation(pair, NO_COOP_EQUAL_MARGINALS, tol).corner
    if config.w1 == 3:
        if config.cooperative:
            return region_concurrent_W1ge3(pair, tol).corner
        return region_no_cooperation(pair, NO_COOP_W1GE3, tol).corner
    point = partition_point(
        pair, config.r, config.mapping, px_grid_step, cooperative=config.cooperative, tol=tol
    )
    return point.theta1, point.theta2


def exponent_convergence_sweep(
    pair: HypothesisPair,
    config_template: ZeroRateSchemeConfig,
    n_list: Sequence[int],
    trials: int = DEFAULT_SWEEP_TRIALS,
    seed: int = 0,
    px_grid_step: float = 0.01,
    tol: float = DEFAULT_TOL,
    workers: int | None = None,
) -> list[ConvergenceRow]:
    """Exact errors per n (Monte Carlo past the enumeration budget) beside the asymptote."""
    n_values = [int(n) for n in n_list]
    if not n_values:
        raise ModelValidationError("the blocklength list must not be empty")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ModelValidationError(f"blocklengths must be strictly ascending, got {n_values}")
    theoretical = asymptotic_exponents(pair, config_template, px_grid_step, tol)
    rows = []
    for n in n_values:
        config = replace(config_template, n=n)
        if exact_budget_allows(pair, n):
            estimate = exact_zero_rate_errors(pair, config, tol=tol, workers=workers)
        else:
            logger.warning(
                "Exact enumeration over budget, using Monte Carlo | n={} | trials={}", n, trials
            )
            estimate = monte_carlo_zero_rate(pair, config, trials, seed=seed, tol=tol, workers=workers)
        row = ConvergenceRow(n=n, estimate=estimate, theoretical=theoretical)
        logger.debug(
            "Sweep row | n={} | method={} | gap1={:.4g} | gap2={:.4g}",
            n,
            estimate.method,
            *row.gaps,
        )
        rows.append(row)
    return rows
