"""Monte-Carlo simulation of the positive-rate random-coding scheme."""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, floor

from loguru import logger
import numpy as np

from ..core.errors import ModelValidationError, PreconditionError, ResourceBudgetError
from ..core.prob import U, U1, V, X, Y1, Y2, HypothesisPair, attach_channel, marginal
from ..core.workers import parallel_map, task_rng
from ..regions.frontier import COHERENT, MODES
from ..regions.positive_rate import AuxChannels, RatePair
from .estimates import EVENT_KEYS, ErrorEstimate, from_counts
from .types import is_typical, joint_counts

CODEBOOK_MAX_NATS = 26.0
CODEBOOK_BATCH = 256
CODEBOOK_MAX_SYMBOLS = 5_000_000
DEFAULT_MU = 0.2

# The scheme nests its typicality radii: sensor, Detector 1, cooperation link, Detector 2.
SENSOR_RADIUS = 1.0 / 8.0
DETECTOR1_RADIUS = 1.0 / 4.0
LINK_RADIUS = 1.0 / 2.0


@dataclass(frozen=True)
class _Codebooks:
    u: np.ndarray
    v: np.ndarray
    u1: np.ndarray | None


@dataclass(frozen=True)
class _References:
    """Flattened joint laws the typicality tests compare against."""

    ux: np.ndarray
    uy1: np.ndarray
    uvy1: np.ndarray
    uvy2: np.ndarray
    bar_uy1: np.ndarray
    p_u: np.ndarray
    v_given_u: np.ndarray
    bar_u1x: np.ndarray | None
    bar_u1y1: np.ndarray | None
    p_bar_u1: np.ndarray | None


class RandomCodingScheme:
    """Sensor, Detector-1 and Detector-2 rules of the positive-rate scheme."""

    def __init__(
        self,
        pair: HypothesisPair,
        aux: AuxChannels,
        rates: RatePair,
        n: int,
        mode: str = COHERENT,
        mu: float = DEFAULT_MU,
        p_test_first: bool = True,
    ) -> None:
        if n < 1:
            raise ModelValidationError(f"blocklength must be positive, got {n}")
        if not mu > 0.0:
            raise ModelValidationError(f"typicality radius mu must be positive, got {mu}")
        if mode not in MODES:
            raise ModelValidationError(f"mode must be one of {MODES}, got {mode!r}")
        self.pair = pair
        self.n = n
        self.mu = mu
        self.mode = mode
        self.p_test_first = p_test_first
        self.equal_marginals = pair.x_marginals_equal()
        self.uses_u1 = mode != COHERENT and not self.equal_marginals
        if self.uses_u1 and aux.u1_given_x is None:
            raise ModelValidationError(
                "concurrent detection with P_X != P̄_X needs the auxiliary channel P̄_U1|X"
            )
        if self.uses_u1:
            limit = max_sensor_mu(pair, aux)
            if not mu < limit:
                raise PreconditionError(
                    "the U- and U1-typical sets of the sensor must not intersect: "
                    f"need mu < 8 ||P_X - P̄_X|| / (|U| + |U1|) = {limit:.6g}, got mu={mu}"
                )
        budget = n * (rates.r1 + rates.r2)
        if budget > CODEBOOK_MAX_NATS:
            raise ResourceBudgetError(
                f"codebooks of n(R1+R2) = {budget:.3f} nats exceed the {CODEBOOK_MAX_NATS} nat budget"
            )
        self.m1 = max(1, floor(exp(n * rates.r1)))
        self.m2 = max(1, floor(exp(n * rates.r2)))
        symbols = max(self.m1 * self.m2 * n, CODEBOOK_BATCH * max(self.m1, self.m2) * n)
        if symbols > CODEBOOK_MAX_SYMBOLS:
            raise ResourceBudgetError(
                f"codebooks of {self.m1} x {self.m2} words of length {n} need {symbols} symbols, "
                f"above the {CODEBOOK_MAX_SYMBOLS} symbol budget"
            )
        self.x_size, self.y1_size, self.y2_size = pair.sizes
        self.u_size = aux.u_given_x.output_size
        self.v_size = aux.v_given_uy1.output_size
        self.u1_size = aux.u1_given_x.output_size if self.uses_u1 else 0
        self.refs = _references(pair, aux, self.uses_u1)

    def draw_codebooks(self, rng: np.random.Generator) -> _Codebooks:
        u = _sample(rng, self.refs.p_u, (self.m1, self.n))
        v = _sample_given(rng, self.refs.v_given_u, u[:, None, :], (self.m1, self.m2, self.n))
        u1 = _sample(rng, self.refs.p_bar_u1, (self.m1, self.n)) if self.uses_u1 else None
        return _Codebooks(u=u, v=v, u1=u1)

    def run(
        self,
        rng: np.random.Generator,
        books: _Codebooks,
        x: np.ndarray,
        y1: np.ndarray,
        y2: np.ndarray,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Masks Ĥ1 = 0 and Ĥ2 = 0 for a batch of source blocks (rows)."""
        n, mu, refs = self.n, self.mu, self.refs
        size = len(x)
        rows = np.arange(size)
        # Tie-breaking draws come first, in an order independent of p_test_first.
        u_scores = rng.random((size, self.m1))
        v_scores = rng.random((size, self.m2))
        u1_scores = rng.random((size, self.m1)) if self.uses_u1 else None

        codes = books.u[None, :, :] * self.x_size + x[:, None, :]
        u_match = is_typical(joint_counts(codes, self.u_size * self.x_size), n, refs.ux, mu * SENSOR_RADIUS)
        u_found, u_index = _pick(u_match, u_scores)
        tag = np.where(u_found, 1, 0)
        u1_index = None
        if self.uses_u1:
            codes = books.u1[None, :, :] * self.x_size + x[:, None, :]
            u1_match = is_typical(
                joint_counts(codes, self.u1_size * self.x_size), n, refs.bar_u1x, mu * SENSOR_RADIUS
            )
            u1_found, u1_index = _pick(u1_match, u1_scores)
            if self.p_test_first:
                tag = np.where(u_found, 1, np.where(u1_found, 2, 0))
            else:
                tag = np.where(u1_found, 2, np.where(u_found, 1, 0))

        u_sent = books.u[u_index]
        uy1 = joint_counts(u_sent * self.y1_size + y1, self.u_size * self.y1_size)
        p_ok1 = (tag == 1) & is_typical(uy1, n, refs.uy1, mu * DETECTOR1_RADIUS)
        if self.mode == COHERENT:
            h1_zero = p_ok1
        elif self.equal_marginals:
            h1_zero = ~((tag == 1) & is_typical(uy1, n, refs.bar_uy1, mu * DETECTOR1_RADIUS))
        else:
            u1_sent = books.u1[u1_index]
            u1y1 = joint_counts(u1_sent * self.y1_size + y1, self.u1_size * self.y1_size)
            h1_zero = ~((tag == 2) & is_typical(u1y1, n, refs.bar_u1y1, mu * DETECTOR1_RADIUS))

        candidates = books.v[u_index]
        codes = (u_sent[:, None, :] * self.v_size + candidates) * self.y1_size + y1[:, None, :]
        v_match = is_typical(
            joint_counts(codes, self.u_size * self.v_size * self.y1_size), n, refs.uvy1, mu * LINK_RADIUS
        ) & p_ok1[:, None]
        v_found, v_index = _pick(v_match, v_scores)
        v_sent = candidates[rows, v_index]
        uvy2 = joint_counts(
            (u_sent * self.v_size + v_sent) * self.y2_size + y2,
            self.u_size * self.v_size * self.y2_size,
        )
        h2_zero = (tag == 1) & v_found & is_typical(uvy2, n, refs.uvy2, mu)
        return h1_zero, h2_zero


def max_sensor_mu(pair: HypothesisPair, aux: AuxChannels) -> float:
    """Largest radius keeping the sensor's U and U1 matches apart; inf without U1.

    A joint (u, x) type within mu/8 of P_UX has its x-type within |U| mu/8 of
    P_X, so the two matches exclude each other once (|U| + |U1|) mu/8 is
    below ||P_X - P̄_X||.
    """
    if aux.u1_given_x is None or pair.x_marginals_equal():
        return float("inf")
    gap = float(
        np.max(np.abs(marginal(pair.p, (X,)).probs - marginal(pair.p_bar, (X,)).probs))
    )
    letters = aux.u_given_x.output_size + aux.u1_given_x.output_size
    return gap / (letters * SENSOR_RADIUS)


def monte_carlo_positive_rate(
    pair: HypothesisPair,
    aux: AuxChannels,
    rates: RatePair,
    n: int,
    trials: int,
    seed: int = 0,
    mode: str = COHERENT,
    p_test_first: bool = True,
    mu: float = DEFAULT_MU,
    workers: int | None = None,
) -> ErrorEstimate:
    """Average the scheme's errors over sources and codebooks redrawn every batch."""
    if trials < 1:
        raise ModelValidationError(f"simulation needs at least one trial, got {trials}")
    scheme = RandomCodingScheme(pair, aux, rates, n, mode=mode, mu=mu, p_test_first=p_test_first)
    laws = (pair.p.probs, pair.p_bar.probs)
    batches = -(-trials // CODEBOOK_BATCH)

    def run(index: int) -> dict[tuple[int, int, int], int]:
        rng = task_rng(seed, index)
        size = min(CODEBOOK_BATCH, trials - index * CODEBOOK_BATCH)
        books = scheme.draw_codebooks(rng)
        counts: dict[tuple[int, int, int], int] = {}
        for hyp, law in enumerate(laws):
            cells = _sample(rng, law, (size, n))
            x, y1, y2 = np.unravel_index(cells, pair.sizes)
            h1_zero, h2_zero = scheme.run(rng, books, x, y1, y2)
            decided = {1: h1_zero, 2: h2_zero}
            for det in (1, 2):
                zero = int(np.count_nonzero(decided[det]))
                counts[(det, 0, hyp)] = zero
                counts[(det, 1, hyp)] = size - zero
        return counts

    totals = {key: 0 for key in EVENT_KEYS}
    for part in parallel_map(run, range(batches), workers):
        for key, value in part.items():
            totals[key] += value
    estimate = from_counts(n, totals, trials, coherent=mode == COHERENT)
    logger.info(
        "Random-coding simulation | mode={} | n={} | codewords={}x{} | trials={} | beta1={:.4g} | beta2={:.4g}",
        mode,
        n,
        scheme.m1,
        scheme.m2,
        trials,
        estimate.beta1,
        estimate.beta2,
    )
    return estimate


def _references(pair: HypothesisPair, aux: AuxChannels, uses_u1: bool) -> _References:
    p_full = attach_channel(attach_channel(pair.p, aux.u_given_x), aux.v_given_uy1)
    p_bar_u = attach_channel(pair.p_bar, aux.u_given_x)
    p_u = marginal(p_full, (U,)).probs
    p_uv = marginal(p_full, (U, V)).table
    uniform = np.full(p_uv.shape[1], 1.0 / p_uv.shape[1])
    v_given_u = np.array(
        [row / row.sum() if row.sum() > 0.0 else uniform for row in p_uv]
    )
    bar_u1x = bar_u1y1 = p_bar_u1 = None
    if uses_u1:
        p_bar_u1_joint = attach_channel(pair.p_bar, aux.u1_given_x)
        bar_u1x = marginal(p_bar_u1_joint, (U1, X)).probs
        bar_u1y1 = marginal(p_bar_u1_joint, (U1, Y1)).probs
        p_bar_u1 = marginal(p_bar_u1_joint, (U1,)).probs
    return _References(
        ux=marginal(p_full, (U, X)).probs,
        uy1=marginal(p_full, (U, Y1)).probs,
        uvy1=marginal(p_full, (U, V, Y1)).probs,
        uvy2=marginal(p_full, (U, V, Y2)).probs,
        bar_uy1=marginal(p_bar_u, (U, Y1)).probs,
        p_u=p_u,
        v_given_u=v_given_u,
        bar_u1x=bar_u1x,
        bar_u1y1=bar_u1y1,
        p_bar_u1=p_bar_u1,
    )


def _pick(match: np.ndarray, scores: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Uniform choice among matching columns of each row; index 0 when none match."""
    found = match.any(axis=1)
    index = np.argmax(np.where(match, scores, -1.0), axis=1)
    return found, index


def _sample(rng: np.random.Generator, probs: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    cdf = np.cumsum(probs)
    draws = np.searchsorted(cdf, rng.random(shape), side="right")
    return np.minimum(draws, len(probs) - 1)


def _sample_given(
    rng: np.random.Generator, rows: np.ndarray, given: np.ndarray, shape: tuple[int, ...]
) -> np.ndarray:
    """Draw from ``rows[given]`` elementwise; ``given`` broadcasts against ``shape``."""
    cdf = np.cumsum(rows, axis=1)[given]
    draws = (cdf <= rng.random(shape)[..., None]).sum(axis=-1)
    return np.minimum(draws, rows.shape[1] - 1)
