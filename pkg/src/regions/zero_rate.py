"""Exponent regions for fixed communication alphabets (zero-rate regime)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from loguru import logger
import numpy as np

from ..core.divmin import DEFAULT_TOL, MarginalConstraint, i_project
from ..core.errors import ModelValidationError, PreconditionError
from ..core.prob import X, Y1, Y2, HypothesisPair, JointPmf, marginal
from ..core.workers import parallel_map
from .frontier import COHERENT, CONCURRENT, ExponentRegion

SAME = "same"
DIFFERENT = "different"
MAPPINGS = (SAME, DIFFERENT)

NO_COOP_COHERENT = "coherent"
NO_COOP_EQUAL_MARGINALS = "concurrent-eqmarg"
NO_COOP_W1GE3 = "concurrent-W1ge3"
NO_COOP_MODES = (NO_COOP_COHERENT, NO_COOP_EQUAL_MARGINALS, NO_COOP_W1GE3)

MAX_GRID_STEP = 0.1
MARKOV_TOL = 1e-9


@dataclass(frozen=True)
class PartitionSweepPoint:
    """Exponent pair reached by one threshold ``r`` and one message mapping."""

    r: float
    mapping: str
    theta1: float
    theta2: float


@dataclass(frozen=True)
class PartitionSweepResult:
    """Frontier of a partition sweep plus every evaluated sweep point."""

    region: ExponentRegion
    sweep: tuple[PartitionSweepPoint, ...]
    grid: np.ndarray
    e1: np.ndarray
    e2: np.ndarray


@dataclass(frozen=True)
class DegenerateStructure:
    """Which Markov degeneracies of the pair hold under both hypotheses."""

    cooperation_useless: bool
    centralized_equivalent: bool


class ZeroRateExponents:
    """Evaluates the single-letter minimizations that every zero-rate region is built from.

    ``e1(π)``: min D(P̃_XY1 || P_XY1) with P̃_X = π, P̃_Y1 = P̄_Y1.
    ``e2(π)``: min D(P̃_XY1Y2 || P̄) with P̃_X = π, P̃_Y1 = P_Y1, P̃_Y2 = P_Y2.
    ``e2_alone(π)``: min D(P̃_XY2 || P̄_XY2) with P̃_X = π, P̃_Y2 = P_Y2.
    """

    def __init__(self, pair: HypothesisPair, tol: float = DEFAULT_TOL) -> None:
        pair.require_zero_rate_support()
        self.pair = pair
        self.tol = tol
        self._p_xy1 = marginal(pair.p, (X, Y1))
        self._p_bar_xy1 = marginal(pair.p_bar, (X, Y1))
        self._p_bar_xy2 = marginal(pair.p_bar, (X, Y2))
        self.p_x = marginal(pair.p, (X,))
        self.p_bar_x = marginal(pair.p_bar, (X,))
        self._p_y1 = MarginalConstraint.from_pmf(pair.p, (Y1,))
        self._p_y2 = MarginalConstraint.from_pmf(pair.p, (Y2,))
        self._p_bar_y1 = MarginalConstraint.from_pmf(pair.p_bar, (Y1,))

    def e1(self, pi: np.ndarray | JointPmf) -> float:
        constraints = [self._x_constraint(pi), self._p_bar_y1]
        return i_project(self._p_xy1, constraints, tol=self.tol).value

    def e2(self, pi: np.ndarray | JointPmf) -> float:
        constraints = [self._x_constraint(pi), self._p_y1, self._p_y2]
        return i_project(self.pair.p_bar, constraints, tol=self.tol).value

    def e2_alone(self, pi: np.ndarray | JointPmf) -> float:
        constraints = [self._x_constraint(pi), self._p_y2]
        return i_project(self._p_bar_xy2, constraints, tol=self.tol).value

    def coherent_theta1(self) -> float:
        constraints = [MarginalConstraint((X,), self.p_x), self._p_y1]
        return i_project(self._p_bar_xy1, constraints, tol=self.tol).value

    def e2_for(self, pi: np.ndarray | JointPmf, cooperative: bool) -> float:
        return self.e2(pi) if cooperative else self.e2_alone(pi)

    def _x_constraint(self, pi: np.ndarray | JointPmf) -> MarginalConstraint:
        if isinstance(pi, JointPmf):
            return MarginalConstraint((X,), pi)
        return MarginalConstraint((X,), JointPmf.from_table((X,), np.asarray(pi, dtype=float)))


class PartitionRule:
    """Assigns a non-typical sensor type π to Γ0 or Γ1 for threshold ``r``.

    With mapping "same" every such type goes to Γ1. With mapping
    "different", π joins Γ_b(1) = Γ1 iff e1(π) + r >= e2(π).
    """

    def __init__(
        self,
        exponents: ZeroRateExponents,
        r: float,
        mapping: str,
        cooperative: bool = True,
    ) -> None:
        if mapping not in MAPPINGS:
            raise ModelValidationError(f"mapping must be one of {MAPPINGS}, got {mapping!r}")
        self.exponents = exponents
        self.r = float(r)
        self.mapping = mapping
        self.cooperative = cooperative
        self._pair_for = lru_cache(maxsize=None)(self._evaluate)

    def gamma_index(self, pi: Sequence[float]) -> int:
        if self.mapping == SAME:
            return 1
        e1, e2 = self._pair_for(tuple(float(v) for v in pi))
        return assign_to_gamma_b1(e1, e2, self.r)

    def message_for_typical(self, typical_to_p_bar: bool) -> int:
        """b(0) for P_X-typical types, b(1) for P̄_X-typical types."""
        return int(typical_to_p_bar and self.mapping == DIFFERENT)

    def _evaluate(self, pi: tuple[float, ...]) -> tuple[float, float]:
        point = np.asarray(pi)
        return self.exponents.e1(point), self.exponents.e2_for(point, self.cooperative)


def assign_to_gamma_b1(e1: float, e2: float, r: float) -> int:
    """1 when the partition rule sends π to Γ_b(1), else 0."""
    return int(e1 + r >= e2)


def simplex_grid(size: int, step: float) -> np.ndarray:
    """All pmfs on ``size`` symbols whose entries are multiples of ``step``."""
    if not 0.0 < step <= MAX_GRID_STEP:
        raise ModelValidationError(f"grid step must lie in (0, {MAX_GRID_STEP}], got {step}")
    total = max(1, int(round(1.0 / step)))
    rows = []
    for bars in combinations(range(total + size - 1), size - 1):
        edges = (-1,) + bars + (total + size - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(size)])
    return np.asarray(rows, dtype=float) / total


def region_coherent(pair: HypothesisPair, tol: float = DEFAULT_TOL) -> ExponentRegion:
    exponents = ZeroRateExponents(pair, tol)
    theta1 = exponents.coherent_theta1()
    theta2 = exponents.e2(exponents.p_x)
    logger.info("Coherent zero-rate corner | theta1={:.6g} | theta2={:.6g}", theta1, theta2)
    return ExponentRegion.rectangle(theta1, theta2, COHERENT, w1=2, w2=2)


def region_concurrent_equal_marginals(
    pair: HypothesisPair, tol: float = DEFAULT_TOL
) -> ExponentRegion:
    if not pair.x_marginals_equal():
        raise PreconditionError(
            "equal sensor marginals P_X = P̄_X are required for this region; "
            "use the W1>=3 or W1=2 concurrent regions instead"
        )
    exponents = ZeroRateExponents(pair, tol)
    theta1 = exponents.e1(exponents.p_x)
    theta2 = exponents.e2(exponents.p_x)
    logger.info("Concurrent equal-marginal corner | theta1={:.6g} | theta2={:.6g}", theta1, theta2)
    return ExponentRegion.rectangle(theta1, theta2, CONCURRENT, w1=2, w2=2)


def region_concurrent_W1ge3(pair: HypothesisPair, tol: float = DEFAULT_TOL) -> ExponentRegion:  # noqa: N802
    _require_distinct_x_marginals(pair)
    exponents = ZeroRateExponents(pair, tol)
    theta1 = exponents.e1(exponents.p_bar_x)
    theta2 = exponents.e2(exponents.p_x)
    logger.info("Concurrent W1>=3 corner | theta1={:.6g} | theta2={:.6g}", theta1, theta2)
    return ExponentRegion.rectangle(theta1, theta2, CONCURRENT, w1=3, w2=2)


def region_concurrent_W1eq2(  # noqa: N802
    pair: HypothesisPair,
    px_grid_step: float,
    r_grid: Sequence[float] | None = None,
    cooperative: bool = True,
    tol: float = DEFAULT_TOL,
    workers: int | None = None,
) -> PartitionSweepResult:
    """Sweep the partition threshold over ``r_grid`` for both message mappings.

    Γ_b(1) always holds P̄_X and Γ_b(0) always holds P_X. With
    ``cooperative=False`` the Detector-2 minimization drops Y1. Without an
    ``r_grid`` every threshold at which some grid type switches sides is used,
    plus one below all of them.
    """
    _require_distinct_x_marginals(pair)
    if r_grid is not None and len(r_grid) == 0:
        raise ModelValidationError("the threshold grid r_grid must not be empty")
    exponents = ZeroRateExponents(pair, tol)
    grid = np.vstack(
        [simplex_grid(pair.sizes[0], px_grid_step), exponents.p_x.probs, exponents.p_bar_x.probs]
    )
    values = parallel_map(
        lambda pi: (exponents.e1(pi), exponents.e2_for(pi, cooperative)), list(grid), workers
    )
    e1 = np.array([v[0] for v in values])
    e2 = np.array([v[1] for v in values])
    if r_grid is None:
        switches = np.unique(e2 - e1)
        r_values = [float(switches[0]) - 1.0] + [float(r) for r in switches]
    else:
        r_values = [float(r) for r in r_grid]

    e1_p_bar = exponents.e1(exponents.p_bar_x)
    e2_p = exponents.e2_for(exponents.p_x, cooperative)
    sweep: list[PartitionSweepPoint] = []
    for r in sorted(r_values):
        in_b1 = e1 + r >= e2
        theta1 = min(float(e1[in_b1].min()) if in_b1.any() else np.inf, e1_p_bar)
        theta2 = min(float(e2[~in_b1].min()) if (~in_b1).any() else np.inf, e2_p)
        sweep.append(PartitionSweepPoint(r, DIFFERENT, theta1, theta2))
    sweep.append(
        PartitionSweepPoint(
            0.0,
            SAME,
            min(exponents.e1(exponents.p_x), e1_p_bar),
            min(e2_p, exponents.e2_for(exponents.p_bar_x, cooperative)),
        )
    )
    region = ExponentRegion.from_candidates(
        [(point.theta1, point.theta2) for point in sweep],
        CONCURRENT,
        witnesses=sweep,
        w1=2,
        w2=2 if cooperative else 0,
        grid_step=px_grid_step,
        grid_points=len(grid),
    )
    logger.info(
        "W1=2 partition sweep | grid={} | r_values={} | frontier={} | cooperative={}",
        len(grid),
        len(r_values),
        len(region.points),
        cooperative,
    )
    return PartitionSweepResult(region=region, sweep=tuple(sweep), grid=grid, e1=e1, e2=e2)


def partition_point(
    pair: HypothesisPair,
    r: float,
    mapping: str,
    px_grid_step: float,
    cooperative: bool = True,
    tol: float = DEFAULT_TOL,
) -> PartitionSweepPoint:
    """Asymptotic exponents of one W1=2 scheme configuration."""
    result = region_concurrent_W1eq2(pair, px_grid_step, [r], cooperative=cooperative, tol=tol)
    return next(point for point in result.sweep if point.mapping == mapping)


def region_no_cooperation(
    pair: HypothesisPair, mode: str, tol: float = DEFAULT_TOL
) -> ExponentRegion:
    """Rectangle of the matching cooperative region with θ2 from (X, Y2) alone."""
    if mode not in NO_COOP_MODES:
        raise ModelValidationError(f"no-cooperation mode must be one of {NO_COOP_MODES}, got {mode!r}")
    if mode == NO_COOP_COHERENT:
        exponents = ZeroRateExponents(pair, tol)
        theta1 = exponents.coherent_theta1()
        detection, w1 = COHERENT, 2
    elif mode == NO_COOP_EQUAL_MARGINALS:
        theta1 = region_concurrent_equal_marginals(pair, tol).corner[0]
        exponents = ZeroRateExponents(pair, tol)
        detection, w1 = CONCURRENT, 2
    else:
        theta1 = region_concurrent_W1ge3(pair, tol).corner[0]
        exponents = ZeroRateExponents(pair, tol)
        detection, w1 = CONCURRENT, 3
    theta2 = exponents.e2_alone(exponents.p_x)
    return ExponentRegion.rectangle(theta1, theta2, detection, w1=w1, w2=0)


def cooperation_benefit_zero_rate(pair: HypothesisPair, tol: float = DEFAULT_TOL) -> float:
    """Gain in the θ2 side of the rectangle when Detector 1 may talk to Detector 2."""
    exponents = ZeroRateExponents(pair, tol)
    with_y1 = exponents.e2(exponents.p_x)
    without_y1 = exponents.e2_alone(exponents.p_x)
    return max(with_y1 - without_y1, 0.0)


def centralized_theta2(pair: HypothesisPair, tol: float = DEFAULT_TOL) -> float:
    """θ2 of a single detector that sees only Y1: the (X, Y1) minimization."""
    return ZeroRateExponents(pair, tol).coherent_theta1()


def degenerate_structure(pair: HypothesisPair, tol: float = MARKOV_TOL) -> DegenerateStructure:
    """Detect X - Y2 - Y1 and X - Y1 - Y2 with a shared channel under both laws."""
    return DegenerateStructure(
        cooperation_useless=_shared_markov(pair, hidden=Y1, via=Y2, tol=tol),
        centralized_equivalent=_shared_markov(pair, hidden=Y2, via=Y1, tol=tol),
    )


def _shared_markov(pair: HypothesisPair, hidden: str, via: str, tol: float) -> bool:
    tables = []
    for law in (pair.p, pair.p_bar):
        joint = marginal(law, (via, hidden)).table
        weight = joint.sum(axis=1, keepdims=True)
        tables.append((joint, weight))
    (p_joint, p_weight), (q_joint, q_weight) = tables
    channel = np.where(
        p_weight > 0.0,
        np.divide(p_joint, p_weight, out=np.zeros_like(p_joint), where=p_weight > 0.0),
        np.divide(q_joint, q_weight, out=np.zeros_like(q_joint), where=q_weight > 0.0),
    )
    for law in (pair.p, pair.p_bar):
        base = marginal(law, (X, via)).table
        rebuilt = base[:, :, None] * channel[None, :, :]
        actual = marginal(law, (X, via, hidden)).table
        if np.max(np.abs(rebuilt - actual)) > tol:
            return False
    return True


def _require_distinct_x_marginals(pair: HypothesisPair) -> None:
    if pair.x_marginals_equal():
        raise PreconditionError(
            "distinct sensor marginals P_X != P̄_X are required for this region; "
            "use the equal-marginal concurrent region instead"
        )
