"""Derivative-free search over row-stochastic channels under mutual-information budgets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from loguru import logger
import numpy as np
from scipy.special import softmax

from ..core.errors import ExponentError, ModelValidationError

LOGIT_CLIP = 50.0
IDENTITY_LOGIT = 40.0

ChannelState = dict[str, np.ndarray]
Objective = Callable[[ChannelState], float]
Projector = Callable[[ChannelState], ChannelState]


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the auxiliary-channel search."""

    lambda_points: int = 33
    restarts: int = 64
    seed: int = 0
    u_size: int | None = None
    v_size: int | None = None
    sweeps: int = 25
    initial_step: float = 1.0
    max_step: float = 4.0
    min_step: float = 1e-3
    projection_tol: float = 1e-10
    search_tol: float = 1e-7
    search_max_iters: int = 5_000
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.lambda_points < 1 or self.restarts < 1 or self.sweeps < 0:
            raise ModelValidationError("search needs at least one lambda point and one restart")
        for label, size in (("u_size", self.u_size), ("v_size", self.v_size)):
            if size is not None and size < 1:
                raise ModelValidationError(f"{label} must be positive, got {size}")

    def lambdas(self) -> np.ndarray:
        if self.lambda_points == 1:
            return np.array([0.5])
        return np.linspace(0.0, 1.0, self.lambda_points)


@dataclass(frozen=True)
class SearchOutcome:
    """Best state found by one restart and what it cost."""

    state: ChannelState
    value: float
    evaluations: int


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    return softmax(np.clip(logits, -LOGIT_CLIP, LOGIT_CLIP), axis=-1)


def logits_of(rows: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(rows, np.exp(-LOGIT_CLIP)))


def identity_rows(rows: int, cols: int, labels: np.ndarray | None = None) -> np.ndarray:
    """Near-deterministic rows sending row ``i`` to column ``labels[i] % cols``."""
    labels = np.arange(rows) if labels is None else labels
    logits = np.zeros((rows, cols))
    logits[np.arange(rows), np.asarray(labels) % cols] = IDENTITY_LOGIT
    return softmax_rows(logits)


def degenerate_rows(rows: int, cols: int) -> np.ndarray:
    return np.full((rows, cols), 1.0 / cols)


def random_rows(rng: np.random.Generator, rows: int, cols: int, scale: float = 3.0) -> np.ndarray:
    return softmax_rows(rng.normal(scale=scale, size=(rows, cols)))


def mix_to_budget(
    rows: np.ndarray,
    info: Callable[[np.ndarray], float],
    anchor: Callable[[np.ndarray], np.ndarray],
    budget: float,
    tol: float,
) -> np.ndarray:
    """Blend ``rows`` toward ``anchor(rows)`` until ``info`` drops to ``budget``.

    The anchor has identical rows (the output law), so the information is
    zero at full blend and the returned rows always satisfy the budget.
    """
    if info(rows) <= budget:
        return rows
    target = anchor(rows)
    low, high = 0.0, 1.0
    while high - low > tol:
        mid = 0.5 * (low + high)
        if info((1.0 - mid) * rows + mid * target) <= budget:
            high = mid
        else:
            low = mid
    return (1.0 - high) * rows + high * target


def ascend(
    objective: Objective,
    project: Projector,
    start: Mapping[str, np.ndarray],
    config: SearchConfig,
    rng: np.random.Generator,
) -> SearchOutcome:
    """Block-coordinate ascent: perturb one channel row's logits at a time.

    The step doubles after a sweep that improved and halves after one that
    did not; the search stops when the step falls below ``min_step``.
    """
    state = project(dict(start))
    best = _safe(objective, state)
    evaluations = 1
    step = config.initial_step
    for _ in range(config.sweeps):
        improved = False
        for name in sorted(state):
            for row in range(state[name].shape[0]):
                logits = logits_of(state[name])
                logits[row] += rng.normal(scale=step, size=logits.shape[1])
                candidate = dict(state)
                candidate[name] = softmax_rows(logits)
                candidate = project(candidate)
                value = _safe(objective, candidate)
                evaluations += 1
                if value > best + 1e-12:
                    state, best, improved = candidate, value, True
        step = min(step * 2.0, config.max_step) if improved else step / 2.0
        if step < config.min_step:
            break
    return SearchOutcome(state=state, value=best, evaluations=evaluations)


def _safe(objective: Objective, state: ChannelState) -> float:
    try:
        value = objective(state)
    except ExponentError as exc:
        logger.debug("Search candidate rejected | reason={}", exc)
        return float("-inf")
    return value if np.isfinite(value) else float("-inf")
