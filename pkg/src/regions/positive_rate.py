"""Positive-rate exponent regions: high-rate corners, testing against independence, auxiliary schemes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from loguru import logger
import numpy as np

from ..core.divmin import DEFAULT_TOL, DEFAULT_MAX_ITERS, MarginalConstraint, i_project
from ..core.errors import ExponentError, ModelValidationError, PreconditionError
from ..core.prob import (
    U,
    U1,
    V,
    X,
    Y1,
    Y2,
    CondChannel,
    HypothesisPair,
    JointPmf,
    attach_channel,
    conditional_divergence,
    conditional_entropy,
    entropy,
    kl_divergence,
    marginal,
    mutual_information,
    mutual_information_table,
    product,
)
from ..core.workers import parallel_map, task_rng
from .frontier import COHERENT, CONCURRENT, MODES, ExponentRegion
from .search import (
    ChannelState,
    SearchConfig,
    ascend,
    degenerate_rows,
    identity_rows,
    mix_to_budget,
    random_rows,
)

INDEPENDENCE_TOL = 1e-9
RATE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class AuxChannels:
    """P_U|X, P_V|U,Y1 and, for concurrent detection with P_X != P̄_X, P̄_U1|X."""

    u_given_x: CondChannel
    v_given_uy1: CondChannel
    u1_given_x: CondChannel | None = None

    def __post_init__(self) -> None:
        _require_channel(self.u_given_x, (X,), U)
        _require_channel(self.v_given_uy1, (U, Y1), V)
        if self.v_given_uy1.input_sizes[0] != self.u_given_x.output_size:
            raise ModelValidationError("P_V|U,Y1 is indexed by a U alphabet of another size")
        if self.u1_given_x is not None:
            _require_channel(self.u1_given_x, (X,), U1)

    @classmethod
    def from_rows(
        cls,
        u_rows: np.ndarray,
        v_rows: np.ndarray,
        y1_size: int,
        u1_rows: np.ndarray | None = None,
    ) -> AuxChannels:
        """Build channels from row matrices; ``v_rows`` has one row per (u, y1), u-major."""
        u_rows = np.asarray(u_rows, dtype=float)
        v_rows = np.asarray(v_rows, dtype=float)
        u_size = u_rows.shape[1]
        u_chan = CondChannel.from_table((X,), U, u_rows)
        v_chan = CondChannel.from_table((U, Y1), V, v_rows.reshape(u_size, y1_size, -1))
        u1_chan = None if u1_rows is None else CondChannel.from_table((X,), U1, np.asarray(u1_rows))
        return cls(u_chan, v_chan, u1_chan)

    @classmethod
    def degenerate(cls, x_size: int, y1_size: int, with_u1: bool = False) -> AuxChannels:
        return cls.from_rows(
            np.ones((x_size, 1)),
            np.ones((y1_size, 1)),
            y1_size,
            np.ones((x_size, 1)) if with_u1 else None,
        )


@dataclass(frozen=True)
class RatePair:
    """Sensor rate ``r1`` and cooperation rate ``r2`` in nats per symbol."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        if self.r1 < 0.0 or self.r2 < 0.0:
            raise ModelValidationError(f"rates must be nonnegative, got ({self.r1}, {self.r2})")


@dataclass(frozen=True)
class AuxExponents:
    """Exponents reached by one choice of auxiliaries and the rates they use."""

    theta1: float
    theta2: float
    rate_u: float
    rate_v: float
    rate_u1: float | None = None

    @property
    def point(self) -> tuple[float, float]:
        return self.theta1, self.theta2

    def within(self, rates: RatePair, slack: float = RATE_SLACK) -> bool:
        fits = self.rate_u <= rates.r1 + slack and self.rate_v <= rates.r2 + slack
        if self.rate_u1 is not None:
            fits = fits and self.rate_u1 <= rates.r1 + slack
        return fits


@dataclass(frozen=True)
class HighRateResult:
    """High-rate rectangle, the rates that suffice for it and the cooperation benefit."""

    region: ExponentRegion
    required_rates: RatePair
    benefit: float


def high_rate_region(
    pair: HypothesisPair, mode: str, cooperative: bool = True, epsilon: float = 1e-3
) -> HighRateResult:
    """Centralized-detector corners reached once both links carry the full sequences."""
    _require_mode(mode)
    p_xy1 = marginal(pair.p, (X, Y1))
    p_bar_xy1 = marginal(pair.p_bar, (X, Y1))
    if mode == COHERENT:
        theta1 = kl_divergence(p_xy1, p_bar_xy1, term="D(P_XY1||P̄_XY1)")
        r1 = entropy(pair.p, (X,))
    else:
        theta1 = kl_divergence(p_bar_xy1, p_xy1, term="D(P̄_XY1||P_XY1)")
        r1 = max(entropy(pair.p_bar, (X,)), entropy(pair.p, (X,)))
    if cooperative:
        theta2 = kl_divergence(pair.p, pair.p_bar, term="D(P_XY1Y2||P̄_XY1Y2)")
    else:
        theta2 = kl_divergence(
            marginal(pair.p, (X, Y2)), marginal(pair.p_bar, (X, Y2)), term="D(P_XY2||P̄_XY2)"
        )
    benefit = conditional_divergence(pair.p, pair.p_bar, (Y1,), (X, Y2))
    rates = RatePair(r1 + epsilon, conditional_entropy(pair.p, (Y1,), (X,)) + epsilon)
    region = ExponentRegion.rectangle(theta1, theta2, mode, w2=None if cooperative else 0)
    logger.info(
        "High-rate corner | mode={} | cooperative={} | theta1={:.6g} | theta2={:.6g} | benefit={:.6g}",
        mode,
        cooperative,
        theta1,
        theta2,
        benefit,
    )
    return HighRateResult(region=region, required_rates=rates, benefit=benefit)


def region_test_against_independence(
    pair: HypothesisPair, r1: float, search: SearchConfig | None = None
) -> ExponentRegion:
    """Optimal cooperative region {(I(U;Y1), I(U;Y1)+I(U;Y2)) : I(U;X) <= r1}."""
    return _independence_region(pair, r1, search or SearchConfig(), cooperative=True)


def region_test_against_independence_no_cooperation(
    pair: HypothesisPair, r1: float, search: SearchConfig | None = None
) -> ExponentRegion:
    """Baseline without the cooperation link: {(I(U;Y1), I(U;Y2)) : I(U;X) <= r1}."""
    return _independence_region(pair, r1, search or SearchConfig(), cooperative=False)


def require_independence_structure(pair: HypothesisPair, tol: float = INDEPENDENCE_TOL) -> None:
    """Raise unless Y1 and Y2 are independent under P and P̄ = P_X ⊗ P_Y1 ⊗ P_Y2."""
    p_x = marginal(pair.p, (X,))
    p_y1 = marginal(pair.p, (Y1,))
    p_y2 = marginal(pair.p, (Y2,))
    gap = np.max(np.abs(marginal(pair.p, (Y1, Y2)).probs - product(p_y1, p_y2).probs))
    if gap > tol:
        raise PreconditionError(
            "testing against independence needs Y1 independent of Y2 under the null law "
            f"(P_Y1Y2 = P_Y1 P_Y2 fails by {gap:.3e})"
        )
    gap = np.max(np.abs(pair.p_bar.probs - product(p_x, p_y1, p_y2).probs))
    if gap > tol:
        raise PreconditionError(
            "testing against independence needs the alternative law to be P_X P_Y1 P_Y2 "
            f"(fails by {gap:.3e})"
        )


def exponents_for_aux_coherent(
    pair: HypothesisPair,
    aux: AuxChannels,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> AuxExponents:
    p_full = _extend(pair.p, aux)
    p_bar_full = _extend(pair.p_bar, aux)
    theta1 = i_project(
        marginal(p_bar_full, (X, Y1, U)),
        [
            MarginalConstraint.from_pmf(p_full, (U, X)),
            MarginalConstraint.from_pmf(p_full, (U, Y1)),
        ],
        tol=tol,
        max_iters=max_iters,
    ).value
    theta2 = _theta2(p_full, p_bar_full, tol, max_iters)
    return AuxExponents(theta1, theta2, *_rates(p_full))


def exponents_for_aux_concurrent(
    pair: HypothesisPair,
    aux: AuxChannels,
    equal_marginals: bool,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> AuxExponents:
    if equal_marginals != pair.x_marginals_equal():
        raise PreconditionError(
            "equal_marginals must match whether P_X = P̄_X holds "
            f"(requested {equal_marginals}, pair has {pair.x_marginals_equal()})"
        )
    p_full = _extend(pair.p, aux)
    p_bar_full = _extend(pair.p_bar, aux)
    theta2 = _theta2(p_full, p_bar_full, tol, max_iters)
    rate_u, rate_v = _rates(p_full)
    if equal_marginals:
        theta1 = i_project(
            marginal(p_full, (X, Y1, U)),
            [
                MarginalConstraint.from_pmf(p_bar_full, (U, X)),
                MarginalConstraint.from_pmf(p_bar_full, (U, Y1)),
            ],
            tol=tol,
            max_iters=max_iters,
        ).value
        return AuxExponents(theta1, theta2, rate_u, rate_v)
    theta1, rate_u1 = _theta1_from_u1(pair, aux, tol, max_iters)
    return AuxExponents(theta1, theta2, rate_u, rate_v, rate_u1)


def region_achievable(
    pair: HypothesisPair,
    rates: RatePair,
    mode: str,
    search: SearchConfig | None = None,
    starts: Sequence[AuxChannels] = (),
) -> ExponentRegion:
    """Search auxiliaries within the rate budgets and return the Pareto frontier.

    Each point's witness is the ``AuxChannels`` reaching it; points are
    re-evaluated at the default solver tolerance before filtering.
    ``starts`` adds caller-chosen initial channels to every λ.
    """
    _require_mode(mode)
    config = search or SearchConfig()
    space = _ChannelSpace(pair, config)
    concurrent = mode == CONCURRENT
    equal_marginals = pair.x_marginals_equal()
    if concurrent and not equal_marginals:
        return _rectangle_search(pair, rates, config, space, starts)

    def evaluate(aux: AuxChannels, tol: float, max_iters: int) -> AuxExponents:
        if concurrent:
            return exponents_for_aux_concurrent(pair, aux, True, tol=tol, max_iters=max_iters)
        return exponents_for_aux_coherent(pair, aux, tol=tol, max_iters=max_iters)

    def objective_for(weight: float) -> Callable[[ChannelState], float]:
        def objective(state: ChannelState) -> float:
            result = evaluate(space.channels(state), config.search_tol, config.search_max_iters)
            return weight * result.theta1 + (1.0 - weight) * result.theta2

        return objective

    project = space.projector(rates, with_v=True, with_u1=False)
    states = _run_restarts(
        objective_for, project, space, config, ("u", "v"), [space.state_of(aux) for aux in starts]
    )
    candidates, witnesses = [], []
    for state in states:
        aux = space.channels(state)
        try:
            result = evaluate(aux, DEFAULT_TOL, DEFAULT_MAX_ITERS)
        except ExponentError as exc:
            logger.warning("Dropping search result at final tolerance | reason={}", exc)
            continue
        candidates.append(result.point)
        witnesses.append(aux)
    region = ExponentRegion.from_candidates(
        candidates,
        mode,
        witnesses=witnesses,
        r1=rates.r1,
        r2=rates.r2,
        evaluated=len(candidates),
        restarts=config.restarts,
        lambda_points=config.lambda_points,
    )
    logger.info(
        "Achievable region | mode={} | r1={:.4g} | r2={:.4g} | candidates={} | frontier={}",
        mode,
        rates.r1,
        rates.r2,
        len(candidates),
        len(region.points),
    )
    return region


class _ChannelSpace:
    """Row-matrix view of the auxiliary channels and their rate projections."""

    def __init__(self, pair: HypothesisPair, config: SearchConfig) -> None:
        self.pair = pair
        self.x_size, self.y1_size, _ = pair.sizes
        self.u_size = config.u_size or self.x_size + 1
        self.v_size = config.v_size or self.u_size * self.y1_size + 1
        self.projection_tol = config.projection_tol
        self.p_x = marginal(pair.p, (X,)).probs
        self.p_bar_x = marginal(pair.p_bar, (X,)).probs
        self.p_xy1 = marginal(pair.p, (X, Y1)).table
        self.p_xy2 = marginal(pair.p, (X, Y2)).table

    def channels(self, state: ChannelState) -> AuxChannels:
        v_rows = state.get("v", degenerate_rows(self.u_size * self.y1_size, 1))
        return AuxChannels.from_rows(state["u"], v_rows, self.y1_size, state.get("u1"))

    def state_of(self, aux: AuxChannels) -> ChannelState:
        state = {"u": aux.u_given_x.rows.copy(), "v": aux.v_given_uy1.rows.copy()}
        if aux.u1_given_x is not None:
            state["u1"] = aux.u1_given_x.rows.copy()
        return state

    def starts(self, rng: np.random.Generator, index: int, blocks: Sequence[str]) -> ChannelState:
        shapes = {
            "u": (self.x_size, self.u_size),
            "v": (self.u_size * self.y1_size, self.v_size),
            "u1": (self.x_size, self.u_size),
        }
        state: ChannelState = {}
        for name in blocks:
            rows, cols = shapes[name]
            if index == 0:
                labels = np.arange(rows) % self.y1_size if name == "v" else None
                state[name] = identity_rows(rows, cols, labels)
            elif index == 1:
                state[name] = degenerate_rows(rows, cols)
            else:
                state[name] = random_rows(rng, rows, cols)
        return state

    def projector(
        self, rates: RatePair, with_v: bool, with_u1: bool
    ) -> Callable[[ChannelState], ChannelState]:
        def project(state: ChannelState) -> ChannelState:
            state = dict(state)
            if "u" in state:
                state["u"] = mix_to_budget(
                    state["u"],
                    lambda rows: _input_output_information(self.p_x, rows),
                    lambda rows: np.tile(self.p_x @ rows, (rows.shape[0], 1)),
                    rates.r1,
                    self.projection_tol,
                )
            if with_v and "v" in state:
                weights = self._uy1_weights(state["u"])
                state["v"] = mix_to_budget(
                    state["v"],
                    lambda rows: _conditional_information(weights, rows, self.y1_size),
                    lambda rows: _per_u_anchor(weights, rows, self.y1_size),
                    rates.r2,
                    self.projection_tol,
                )
            if with_u1 and "u1" in state:
                state["u1"] = mix_to_budget(
                    state["u1"],
                    lambda rows: _input_output_information(self.p_bar_x, rows),
                    lambda rows: np.tile(self.p_bar_x @ rows, (rows.shape[0], 1)),
                    rates.r1,
                    self.projection_tol,
                )
            return state

        return project

    def _uy1_weights(self, u_rows: np.ndarray) -> np.ndarray:
        """P(u, y1) flattened u-major, the weight of each row of P_V|U,Y1."""
        return (u_rows.T @ self.p_xy1).reshape(-1)


def _run_restarts(
    objective_for: Callable[[float], Callable[[ChannelState], float]],
    project: Callable[[ChannelState], ChannelState],
    space: _ChannelSpace,
    config: SearchConfig,
    blocks: Sequence[str],
    extra_starts: Sequence[ChannelState] = (),
    lambdas: np.ndarray | None = None,
) -> list[ChannelState]:
    weights = config.lambdas() if lambdas is None else lambdas
    per_lambda = config.restarts + len(extra_starts)
    tasks = [(li, ri) for li in range(len(weights)) for ri in range(per_lambda)]

    def run(task: tuple[int, int]) -> tuple[ChannelState, float, int]:
        li, ri = task
        rng = task_rng(config.seed, li * per_lambda + ri)
        if ri < config.restarts:
            start = space.starts(rng, ri, blocks)
        else:
            start = {name: extra_starts[ri - config.restarts][name] for name in blocks}
        outcome = ascend(objective_for(float(weights[li])), project, start, config, rng)
        return outcome.state, outcome.value, outcome.evaluations

    results = parallel_map(run, tasks, config.workers)
    evaluations = sum(item[2] for item in results)
    logger.debug(
        "Channel search finished | tasks={} | evaluations={} | blocks={}",
        len(tasks),
        evaluations,
        blocks,
    )
    return [state for state, value, _ in results if np.isfinite(value)]


def _rectangle_search(
    pair: HypothesisPair,
    rates: RatePair,
    config: SearchConfig,
    space: _ChannelSpace,
    starts: Sequence[AuxChannels],
) -> ExponentRegion:
    """θ1 depends only on U1 and θ2 only on (U, V): optimize each on its own."""
    extra = [space.state_of(aux) for aux in starts if aux.u1_given_x is not None]

    def theta1_objective(_: float) -> Callable[[ChannelState], float]:
        def objective(state: ChannelState) -> float:
            return _theta1_from_u1_rows(pair, state["u1"], config.search_tol, config.search_max_iters)

        return objective

    def theta2_objective(_: float) -> Callable[[ChannelState], float]:
        def objective(state: ChannelState) -> float:
            aux = space.channels(state)
            p_full = _extend(pair.p, aux)
            p_bar_full = _extend(pair.p_bar, aux)
            return _theta2(p_full, p_bar_full, config.search_tol, config.search_max_iters)

        return objective

    single = np.array([1.0])
    u1_states = _run_restarts(
        theta1_objective,
        space.projector(rates, with_v=False, with_u1=True),
        space,
        config,
        ("u1",),
        extra,
        single,
    )
    uv_states = _run_restarts(
        theta2_objective,
        space.projector(rates, with_v=True, with_u1=False),
        space,
        config,
        ("u", "v"),
        [space.state_of(aux) for aux in starts],
        single,
    )
    best_u1 = _best_final(
        u1_states, lambda s: _theta1_from_u1_rows(pair, s["u1"], DEFAULT_TOL, DEFAULT_MAX_ITERS)
    )
    best_uv = _best_final(
        uv_states,
        lambda s: _theta2(
            _extend(pair.p, space.channels(s)),
            _extend(pair.p_bar, space.channels(s)),
            DEFAULT_TOL,
            DEFAULT_MAX_ITERS,
        ),
    )
    state = dict(best_uv)
    state["u1"] = best_u1["u1"]
    aux = space.channels(state)
    result = exponents_for_aux_concurrent(pair, aux, equal_marginals=False)
    logger.info(
        "Concurrent rectangle | r1={:.4g} | r2={:.4g} | theta1={:.6g} | theta2={:.6g}",
        rates.r1,
        rates.r2,
        result.theta1,
        result.theta2,
    )
    return ExponentRegion.rectangle(
        result.theta1, result.theta2, CONCURRENT, witness=aux, r1=rates.r1, r2=rates.r2
    )


def _best_final(states: Sequence[ChannelState], score: Callable[[ChannelState], float]) -> ChannelState:
    best_state, best_value = None, float("-inf")
    for state in states:
        try:
            value = score(state)
        except ExponentError as exc:
            logger.warning("Dropping search result at final tolerance | reason={}", exc)
            continue
        if value > best_value:
            best_state, best_value = state, value
    if best_state is None:
        raise PreconditionError("no auxiliary channel within the rate budget could be evaluated")
    return best_state


def _independence_region(
    pair: HypothesisPair, r1: float, config: SearchConfig, cooperative: bool
) -> ExponentRegion:
    if r1 < 0.0:
        raise ModelValidationError(f"rate r1 must be nonnegative, got {r1}")
    require_independence_structure(pair)
    space = _ChannelSpace(pair, config)

    def informations(u_rows: np.ndarray) -> tuple[float, float]:
        with_y1 = mutual_information_table(u_rows.T @ space.p_xy1)
        with_y2 = mutual_information_table(u_rows.T @ space.p_xy2)
        return with_y1, with_y2

    def objective_for(weight: float) -> Callable[[ChannelState], float]:
        def objective(state: ChannelState) -> float:
            with_y1, with_y2 = informations(state["u"])
            if cooperative:
                return weight * with_y1 + (1.0 - weight) * (with_y1 + with_y2)
            return weight * with_y1 + (1.0 - weight) * with_y2

        return objective

    project = space.projector(RatePair(r1, 0.0), with_v=False, with_u1=False)
    states = _run_restarts(objective_for, project, space, config, ("u",))
    candidates, witnesses = [], []
    for state in states:
        aux = space.channels(state)
        joint = attach_channel(pair.p, aux.u_given_x)
        with_y1 = mutual_information(joint, (U,), (Y1,))
        with_y2 = mutual_information(joint, (U,), (Y2,))
        candidates.append((with_y1, with_y1 + with_y2) if cooperative else (with_y1, with_y2))
        witnesses.append(aux)
    region = ExponentRegion.from_candidates(
        candidates,
        COHERENT,
        witnesses=witnesses,
        w2=None if cooperative else 0,
        r1=r1,
        r2=0.0,
        restarts=config.restarts,
        lambda_points=config.lambda_points,
    )
    logger.info(
        "Independence-testing region | cooperative={} | r1={:.4g} | frontier={} | max_theta2={:.6g}",
        cooperative,
        r1,
        len(region.points),
        region.max_theta2,
    )
    return region


def _extend(law: JointPmf, aux: AuxChannels) -> JointPmf:
    return attach_channel(attach_channel(law, aux.u_given_x), aux.v_given_uy1)


def _theta2(p_full: JointPmf, p_bar_full: JointPmf, tol: float, max_iters: int) -> float:
    constraints = [
        MarginalConstraint.from_pmf(p_full, (U, X)),
        MarginalConstraint.from_pmf(p_full, (U, V, Y1)),
        MarginalConstraint.from_pmf(p_full, (U, V, Y2)),
    ]
    return i_project(p_bar_full, constraints, tol=tol, max_iters=max_iters).value


def _rates(p_full: JointPmf) -> tuple[float, float]:
    return mutual_information(p_full, (U,), (X,)), mutual_information(p_full, (V,), (Y1,), (U,))


def _theta1_from_u1(
    pair: HypothesisPair, aux: AuxChannels, tol: float, max_iters: int
) -> tuple[float, float]:
    if aux.u1_given_x is None:
        raise ModelValidationError(
            "concurrent detection with P_X != P̄_X needs the auxiliary channel P̄_U1|X"
        )
    p_bar_xy1u1 = attach_channel(marginal(pair.p_bar, (X, Y1)), aux.u1_given_x)
    p_xy1u1 = attach_channel(marginal(pair.p, (X, Y1)), aux.u1_given_x)
    theta1 = i_project(
        p_xy1u1,
        [
            MarginalConstraint.from_pmf(p_bar_xy1u1, (U1, X)),
            MarginalConstraint.from_pmf(p_bar_xy1u1, (U1, Y1)),
        ],
        tol=tol,
        max_iters=max_iters,
    ).value
    return theta1, mutual_information(p_bar_xy1u1, (U1,), (X,))


def _theta1_from_u1_rows(pair: HypothesisPair, rows: np.ndarray, tol: float, max_iters: int) -> float:
    x_size, y1_size, _ = pair.sizes
    aux = AuxChannels.degenerate(x_size, y1_size)
    aux = AuxChannels(aux.u_given_x, aux.v_given_uy1, CondChannel.from_table((X,), U1, rows))
    return _theta1_from_u1(pair, aux, tol, max_iters)[0]


def _input_output_information(p_in: np.ndarray, rows: np.ndarray) -> float:
    return mutual_information_table(p_in[:, None] * rows)


def _conditional_information(weights: np.ndarray, rows: np.ndarray, y1_size: int) -> float:
    """I(V;Y1|U) from P(u, y1) weights and P_V|U,Y1 rows (u-major)."""
    joint = (weights[:, None] * rows).reshape(-1, y1_size, rows.shape[1])
    total = 0.0
    for block in joint:
        mass = float(block.sum())
        if mass > 0.0:
            total += mass * mutual_information_table(block / mass)
    return total


def _per_u_anchor(weights: np.ndarray, rows: np.ndarray, y1_size: int) -> np.ndarray:
    """Replace each P_V|U=u,Y1 row by the P_V|U=u output law."""
    grouped_w = weights.reshape(-1, y1_size)
    grouped_rows = rows.reshape(-1, y1_size, rows.shape[1])
    anchors = []
    for w, block in zip(grouped_w, grouped_rows):
        mass = w.sum()
        mean = (w @ block) / mass if mass > 0.0 else block.mean(axis=0)
        anchors.append(np.tile(mean, (y1_size, 1)))
    return np.vstack(anchors)


def _require_mode(mode: str) -> None:
    if mode not in MODES:
        raise ModelValidationError(f"mode must be one of {MODES}, got {mode!r}")


def _require_channel(chan: CondChannel, inputs: tuple[str, ...], output: str) -> None:
    if chan.input_axes != inputs or chan.output_axis != output:
        raise ModelValidationError(
            f"expected channel {output}|{','.join(inputs)}, got "
            f"{chan.output_axis}|{','.join(chan.input_axes)}"
        )
