"""Exponent-region container, Pareto filtering and unit conversion."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log
from typing import Any, Sequence

NATS_PER_BIT = log(2.0)
PARETO_TOL = 1e-9

COHERENT = "coherent"
CONCURRENT = "concurrent"
MODES = (COHERENT, CONCURRENT)


@dataclass(frozen=True)
class ExponentRegion:
    """Pareto-maximal (θ1, θ2) corners in nats, ascending in θ1.

    ``witnesses`` runs parallel to ``points`` and holds whatever achieves each
    corner (auxiliary channels, a partition threshold), or ``None``.
    ``w1``/``w2`` tag the communication alphabets (0 encodes no cooperation,
    3 stands for "3 or more", ``None`` for the rate-limited regimes).
    """

    points: tuple[tuple[float, float], ...]
    is_rectangle: bool
    mode: str
    w1: int | None = None
    w2: int | None = None
    witnesses: tuple[Any, ...] = ()
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.witnesses:
            object.__setattr__(self, "witnesses", (None,) * len(self.points))

    @classmethod
    def rectangle(
        cls,
        theta1: float,
        theta2: float,
        mode: str,
        w1: int | None = None,
        w2: int | None = None,
        witness: Any = None,
        **metadata: Any,
    ) -> ExponentRegion:
        return cls(
            points=((max(theta1, 0.0), max(theta2, 0.0)),),
            is_rectangle=True,
            mode=mode,
            w1=w1,
            w2=w2,
            witnesses=(witness,),
            metadata=dict(metadata),
        )

    @classmethod
    def from_candidates(
        cls,
        candidates: Sequence[tuple[float, float]],
        mode: str,
        witnesses: Sequence[Any] | None = None,
        tol: float = PARETO_TOL,
        w1: int | None = None,
        w2: int | None = None,
        **metadata: Any,
    ) -> ExponentRegion:
        points, kept = pareto_frontier(candidates, witnesses, tol=tol)
        return cls(
            points=points,
            is_rectangle=len(points) == 1,
            mode=mode,
            w1=w1,
            w2=w2,
            witnesses=kept,
            metadata=dict(metadata),
        )

    @property
    def corner(self) -> tuple[float, float]:
        if not self.is_rectangle:
            raise ValueError("region has a tradeoff curve, not a single corner")
        return self.points[0]

    @property
    def max_theta1(self) -> float:
        return max(point[0] for point in self.points)

    @property
    def max_theta2(self) -> float:
        return max(point[1] for point in self.points)

    def contains(self, point: tuple[float, float], tol: float = PARETO_TOL) -> bool:
        theta1, theta2 = point
        return any(theta1 <= a + tol and theta2 <= b + tol for a, b in self.points)


def pareto_frontier(
    candidates: Sequence[tuple[float, float]],
    witnesses: Sequence[Any] | None = None,
    tol: float = PARETO_TOL,
) -> tuple[tuple[tuple[float, float], ...], tuple[Any, ...]]:
    """Keep the candidates no other candidate dominates by more than ``tol``."""
    if witnesses is None:
        witnesses = [None] * len(candidates)
    order = sorted(
        range(len(candidates)), key=lambda i: (-candidates[i][0], -candidates[i][1])
    )
    points: list[tuple[float, float]] = []
    kept: list[Any] = []
    best_theta2 = float("-inf")
    for index in order:
        theta1, theta2 = (max(float(v), 0.0) for v in candidates[index])
        if theta2 > best_theta2 + tol:
            points.append((theta1, theta2))
            kept.append(witnesses[index])
            best_theta2 = theta2
    points.reverse()
    kept.reverse()
    return tuple(points), tuple(kept)


def to_bits(value: float) -> float:
    return value / NATS_PER_BIT


def from_bits(value: float) -> float:
    return value * NATS_PER_BIT
