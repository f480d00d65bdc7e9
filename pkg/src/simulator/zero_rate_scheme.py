"""Zero-rate coding schemes: decision maps, exact type enumeration and Monte Carlo."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from loguru import logger
import numpy as np

from ..core.divmin import DEFAULT_TOL
from ..core.errors import ModelValidationError, PreconditionError, ResourceBudgetError
from ..core.prob import X, Y1, Y2, HypothesisPair, marginal
from ..core.workers import parallel_map, task_rng
from ..regions.frontier import COHERENT, MODES
from ..regions.zero_rate import MAPPINGS, SAME, PartitionRule, ZeroRateExponents
from .estimates import EVENT_KEYS, ErrorEstimate, combine_log_sums, from_counts, from_log_probabilities
from .types import (
    count_compositions,
    is_typical,
    joint_type_prefixes,
    joint_types_with_prefix,
    log_type_probability,
    marginal_counts,
)

EXACT_MAX_CELLS = 12
EXACT_MAX_N = 40
EXACT_MAX_TYPE_CLASSES = 20_000_000
MIN_TRIALS = 1_000
MC_CHUNK = 20_000

SCHEME_COHERENT = "coherent"
SCHEME_EQUAL_MARGINALS = "concurrent-eqmarg"
SCHEME_W1GE3 = "concurrent-W1ge3"
SCHEME_W1EQ2 = "concurrent-W1eq2"


@dataclass(frozen=True)
class ZeroRateSchemeConfig:
    """Blocklength, typicality radius and partition settings of a zero-rate scheme.

    ``w1`` is 2 or 3 (3 stands for any alphabet of three or more messages).
    ``mapping`` and ``r`` only matter for concurrent detection with w1 = 2.
    ``cooperative=False`` makes Detector 2 ignore the Detector-1 message.
    """

    n: int
    mu: float
    w1: int = 3
    mapping: str = SAME
    r: float = 0.0
    mode: str = COHERENT
    cooperative: bool = True

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ModelValidationError(f"blocklength must be positive, got {self.n}")
        if not self.mu > 0.0:
            raise ModelValidationError(f"typicality radius mu must be positive, got {self.mu}")
        if self.w1 not in (2, 3):
            raise ModelValidationError(f"w1 must be 2 or 3 (3 meaning 3 or more), got {self.w1}")
        if self.mapping not in MAPPINGS:
            raise ModelValidationError(f"mapping must be one of {MAPPINGS}, got {self.mapping!r}")
        if self.mode not in MODES:
            raise ModelValidationError(f"mode must be one of {MODES}, got {self.mode!r}")


class ZeroRateScheme:
    """Decision maps of the sensor and both detectors as functions of marginal types."""

    def __init__(self, pair: HypothesisPair, config: ZeroRateSchemeConfig, tol: float = DEFAULT_TOL) -> None:
        self.pair = pair
        self.config = config
        self.p_x = marginal(pair.p, (X,)).probs
        self.p_bar_x = marginal(pair.p_bar, (X,)).probs
        self.p_y1 = marginal(pair.p, (Y1,)).probs
        self.p_bar_y1 = marginal(pair.p_bar, (Y1,)).probs
        self.p_y2 = marginal(pair.p, (Y2,)).probs
        self.rule: PartitionRule | None = None
        if config.mode == COHERENT:
            self.variant = SCHEME_COHERENT
        elif pair.x_marginals_equal():
            self.variant = SCHEME_EQUAL_MARGINALS
        else:
            gap = float(np.max(np.abs(self.p_x - self.p_bar_x)))
            if not config.mu < gap / 2.0:
                raise PreconditionError(
                    "the typical sets of P_X and P̄_X must not intersect: "
                    f"need mu < ||P_X - P̄_X||/2 = {gap / 2.0:.6g}, got mu={config.mu}"
                )
            self.variant = SCHEME_W1GE3 if config.w1 == 3 else SCHEME_W1EQ2
        if self.variant == SCHEME_W1EQ2:
            self.rule = PartitionRule(
                ZeroRateExponents(pair, tol), config.r, config.mapping, config.cooperative
            )

    def sensor_message(self, tx: np.ndarray) -> np.ndarray:
        """M1 for each row of x-type counts."""
        n, mu = self.config.n, self.config.mu
        typical_p = is_typical(tx, n, self.p_x, mu)
        if self.variant in (SCHEME_COHERENT, SCHEME_EQUAL_MARGINALS):
            return typical_p.astype(np.int64)
        typical_p_bar = is_typical(tx, n, self.p_bar_x, mu) & ~typical_p
        if self.variant == SCHEME_W1GE3:
            return np.where(typical_p, 0, np.where(typical_p_bar, 1, 2))
        b1 = self.rule.message_for_typical(True)
        return np.where(typical_p, 0, np.where(typical_p_bar, b1, self.gamma_of(tx)))

    def gamma_of(self, tx: np.ndarray) -> np.ndarray:
        """Γ index of every x-type, evaluated at the exact empirical type."""
        if self.rule is None:
            raise PreconditionError("the partition rule only exists for concurrent detection with w1 = 2")
        if len(tx) == 0:
            return np.zeros(0, dtype=np.int64)
        unique, inverse = np.unique(tx, axis=0, return_inverse=True)
        labels = np.array([self.rule.gamma_index(row / self.config.n) for row in unique], dtype=np.int64)
        return labels[inverse.reshape(-1)]

    def decide(
        self, tx: np.ndarray, ty1: np.ndarray, ty2: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return masks Ĥ1 = 0 and Ĥ2 = 0 for rows of marginal type counts."""
        n, mu = self.config.n, self.config.mu
        m1 = self.sensor_message(tx)
        y1_p = is_typical(ty1, n, self.p_y1, mu)
        y2_p = is_typical(ty2, n, self.p_y2, mu)
        link = y1_p if self.config.cooperative else np.ones_like(y1_p)
        if self.variant == SCHEME_COHERENT:
            sent = m1 == 1
            return sent & y1_p, sent & link & y2_p
        y1_p_bar = is_typical(ty1, n, self.p_bar_y1, mu)
        if self.variant == SCHEME_EQUAL_MARGINALS:
            sent = m1 == 1
            return ~(sent & y1_p_bar), sent & link & y2_p
        if self.variant == SCHEME_W1GE3:
            return ~((m1 == 1) & y1_p_bar), (m1 == 0) & link & y2_p
        b1 = self.rule.message_for_typical(True)
        return ~((m1 == b1) & y1_p_bar), (m1 == 0) & link & y2_p


def exact_zero_rate_errors(
    pair: HypothesisPair,
    config: ZeroRateSchemeConfig,
    tol: float = DEFAULT_TOL,
    workers: int | None = None,
) -> ErrorEstimate:
    """Exact α/β by summing multinomial type-class probabilities over all joint types."""
    cells = prod(pair.sizes)
    classes = count_compositions(config.n, cells)
    if not exact_budget_allows(pair, config.n):
        raise ResourceBudgetError(
            f"exact enumeration over {classes} joint types (|alphabet|={cells}, n={config.n}) "
            f"exceeds the budget (cells <= {EXACT_MAX_CELLS}, n <= {EXACT_MAX_N}, "
            f"types <= {EXACT_MAX_TYPE_CLASSES}); use monte_carlo_zero_rate instead"
        )
    scheme = ZeroRateScheme(pair, config, tol)
    shape = pair.sizes
    laws = (pair.p.probs, pair.p_bar.probs)

    def evaluate(prefix: np.ndarray) -> dict[tuple[int, int, int], float]:
        types = joint_types_with_prefix(config.n, cells, prefix)
        h1_zero, h2_zero = scheme.decide(
            marginal_counts(types, shape, (0,)),
            marginal_counts(types, shape, (1,)),
            marginal_counts(types, shape, (2,)),
        )
        log_probs = [log_type_probability(types, law, config.n) for law in laws]
        decided = {1: h1_zero, 2: h2_zero}
        return {
            (det, dec, hyp): combine_log_sums(
                log_probs[hyp][decided[det] if dec == 0 else ~decided[det]]
            )
            for det, dec, hyp in EVENT_KEYS
        }

    partials = parallel_map(evaluate, joint_type_prefixes(config.n, cells), workers)
    log_probs = {key: combine_log_sums([part[key] for part in partials]) for key in EVENT_KEYS}
    estimate = from_log_probabilities(config.n, log_probs, coherent=config.mode == COHERENT)
    logger.info(
        "Exact zero-rate errors | scheme={} | n={} | types={} | beta1={:.4g} | beta2={:.4g}",
        scheme.variant,
        config.n,
        classes,
        estimate.beta1,
        estimate.beta2,
    )
    return estimate


def monte_carlo_zero_rate(
    pair: HypothesisPair,
    config: ZeroRateSchemeConfig,
    trials: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    workers: int | None = None,
) -> ErrorEstimate:
    """Estimate α/β from ``trials`` i.i.d. blocks under each hypothesis."""
    if trials < MIN_TRIALS:
        raise ModelValidationError(f"Monte Carlo needs at least {MIN_TRIALS} trials, got {trials}")
    scheme = ZeroRateScheme(pair, config, tol)
    shape = pair.sizes
    laws = (pair.p.probs, pair.p_bar.probs)
    chunks = -(-trials // MC_CHUNK)
    tasks = [(hyp, index) for hyp in (0, 1) for index in range(chunks)]

    def run(task: tuple[int, int]) -> dict[tuple[int, int, int], int]:
        hyp, index = task
        rng = task_rng(seed, 2 * index + hyp)
        size = min(MC_CHUNK, trials - index * MC_CHUNK)
        types = rng.multinomial(config.n, laws[hyp], size=size)
        h1_zero, h2_zero = scheme.decide(
            marginal_counts(types, shape, (0,)),
            marginal_counts(types, shape, (1,)),
            marginal_counts(types, shape, (2,)),
        )
        decided = {1: h1_zero, 2: h2_zero}
        return {
            (det, dec, hyp): int(np.count_nonzero(decided[det] if dec == 0 else ~decided[det]))
            for det in (1, 2)
            for dec in (0, 1)
        }

    counts = {key: 0 for key in EVENT_KEYS}
    for part in parallel_map(run, tasks, workers):
        for key, value in part.items():
            counts[key] += value
    estimate = from_counts(config.n, counts, trials, coherent=config.mode == COHERENT)
    logger.info(
        "Monte-Carlo zero-rate errors | scheme={} | n={} | trials={} | seed={} | beta1={:.4g} | beta2={:.4g}",
        scheme.variant,
        config.n,
        trials,
        seed,
        estimate.beta1,
        estimate.beta2,
    )
    return estimate


def exact_budget_allows(pair: HypothesisPair, n: int) -> bool:
    cells = prod(pair.sizes)
    return (
        cells <= EXACT_MAX_CELLS
        and n <= EXACT_MAX_N
        and count_compositions(n, cells) <= EXACT_MAX_TYPE_CLASSES
    )
