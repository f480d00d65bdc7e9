"""Finite-alphabet pmfs, channels and the information measures built on them."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np
from scipy.special import xlogy

from .errors import (
    DivergenceInfiniteError,
    ModelValidationError,
    PreconditionError,
    StructuralError,
)

X = "X"
Y1 = "Y1"
Y2 = "Y2"
U = "U"
U1 = "U1"
V = "V"
CANONICAL_ORDER = (X, Y1, Y2, U, U1, V)
OBSERVATION_AXES = (X, Y1, Y2)

ZERO_PROB = 1e-15
SUM_TOL = 1e-12
MARGINAL_EQ_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Pmf over a finite product alphabet, stored flat in row-major order."""

    axis_names: tuple[str, ...]
    axis_sizes: tuple[int, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        names = tuple(self.axis_names)
        sizes = tuple(int(size) for size in self.axis_sizes)
        if len(names) != len(sizes):
            raise StructuralError(f"{len(names)} axis labels for {len(sizes)} axis sizes")
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate axis label in {names}")
        if any(size < 1 for size in sizes):
            raise ModelValidationError(f"axis sizes must be positive, got {sizes}")
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size != prod(sizes):
            raise ModelValidationError(
                f"{probs.size} probabilities do not fill alphabet of shape {sizes}"
            )
        if not np.all(np.isfinite(probs)) or probs.min() < 0.0:
            raise ModelValidationError("pmf entries must be finite and nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ModelValidationError(f"pmf entries sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "axis_names", names)
        object.__setattr__(self, "axis_sizes", sizes)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_table(
        cls, axis_names: Sequence[str], table: np.ndarray, *, normalize: bool = False
    ) -> JointPmf:
        table = np.asarray(table, dtype=float)
        if normalize:
            total = table.sum()
            if total <= 0.0:
                raise ModelValidationError("cannot normalize an all-zero table")
            table = table / total
        return cls(tuple(axis_names), table.shape, table.reshape(-1))

    @classmethod
    def uniform(cls, axis_names: Sequence[str], axis_sizes: Sequence[int]) -> JointPmf:
        count = prod(axis_sizes)
        return cls(tuple(axis_names), tuple(axis_sizes), np.full(count, 1.0 / count))

    @property
    def table(self) -> np.ndarray:
        return self.probs.reshape(self.axis_sizes)

    @property
    def ndim(self) -> int:
        return len(self.axis_names)

    def size_of(self, axis: str) -> int:
        return self.axis_sizes[self.index_of(axis)]

    def index_of(self, axis: str) -> int:
        try:
            return self.axis_names.index(axis)
        except ValueError:
            raise StructuralError(f"unknown axis {axis!r}; pmf has axes {self.axis_names}") from None

    def reorder(self, axis_names: Sequence[str]) -> JointPmf:
        """Return the same law with its coordinates permuted to ``axis_names``."""
        axis_names = tuple(axis_names)
        if sorted(axis_names) != sorted(self.axis_names):
            raise StructuralError(f"cannot reorder axes {self.axis_names} to {axis_names}")
        if axis_names == self.axis_names:
            return self
        perm = [self.index_of(axis) for axis in axis_names]
        return JointPmf.from_table(axis_names, np.transpose(self.table, perm))

    def canonical(self) -> JointPmf:
        known = [axis for axis in CANONICAL_ORDER if axis in self.axis_names]
        extra = [axis for axis in self.axis_names if axis not in CANONICAL_ORDER]
        return self.reorder(known + extra)

    def support(self) -> np.ndarray:
        return self.table > ZERO_PROB

    def allclose(self, other: JointPmf, atol: float = 1e-12) -> bool:
        if sorted(other.axis_names) != sorted(self.axis_names):
            return False
        other = other.reorder(self.axis_names)
        if other.axis_sizes != self.axis_sizes:
            return False
        return bool(np.max(np.abs(self.probs - other.probs)) <= atol)


@dataclass(frozen=True, eq=False)
class CondChannel:
    """Conditional pmf of ``output_axis`` given ``input_axes``, one simplex row per input."""

    input_axes: tuple[str, ...]
    input_sizes: tuple[int, ...]
    output_axis: str
    output_size: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        input_axes = tuple(self.input_axes)
        input_sizes = tuple(int(size) for size in self.input_sizes)
        if len(input_axes) != len(input_sizes):
            raise StructuralError("channel input labels and sizes differ in length")
        if self.output_axis in input_axes:
            raise StructuralError(f"channel output {self.output_axis!r} is also an input")
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size != prod(input_sizes) * self.output_size:
            raise ModelValidationError("channel table does not match its declared sizes")
        if not np.all(np.isfinite(probs)) or probs.min() < 0.0:
            raise ModelValidationError("channel entries must be finite and nonnegative")
        rows = probs.reshape(-1, self.output_size)
        worst = float(np.max(np.abs(rows.sum(axis=1) - 1.0)))
        if worst > SUM_TOL:
            raise ModelValidationError(f"channel rows must sum to 1 (worst deviation {worst:.3e})")
        probs.setflags(write=False)
        object.__setattr__(self, "input_axes", input_axes)
        object.__setattr__(self, "input_sizes", input_sizes)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_table(
        cls, input_axes: Sequence[str], output_axis: str, table: np.ndarray
    ) -> CondChannel:
        table = np.asarray(table, dtype=float)
        rows = table.reshape(-1, table.shape[-1])
        rows = rows / rows.sum(axis=1, keepdims=True)
        return cls(tuple(input_axes), table.shape[:-1], output_axis, table.shape[-1], rows.reshape(-1))

    @classmethod
    def identity(cls, input_axis: str, size: int, output_axis: str) -> CondChannel:
        return cls.from_table((input_axis,), output_axis, np.eye(size))

    @classmethod
    def constant(
        cls, input_axes: Sequence[str], input_sizes: Sequence[int], output_axis: str
    ) -> CondChannel:
        return cls(tuple(input_axes), tuple(input_sizes), output_axis, 1, np.ones(prod(input_sizes)))

    @property
    def table(self) -> np.ndarray:
        return self.probs.reshape(self.input_sizes + (self.output_size,))

    @property
    def rows(self) -> np.ndarray:
        return self.probs.reshape(-1, self.output_size)


@dataclass(frozen=True, eq=False)
class HypothesisPair:
    """Null law ``p`` and alternative law ``p_bar`` over (X, Y1, Y2)."""

    p: JointPmf
    p_bar: JointPmf
    name: str = ""

    def __post_init__(self) -> None:
        for label, law in (("p", self.p), ("p_bar", self.p_bar)):
            if sorted(law.axis_names) != sorted(OBSERVATION_AXES):
                raise StructuralError(f"{label} must have axes {OBSERVATION_AXES}, got {law.axis_names}")
        p = self.p.reorder(OBSERVATION_AXES)
        p_bar = self.p_bar.reorder(OBSERVATION_AXES)
        if p.axis_sizes != p_bar.axis_sizes:
            raise StructuralError(
                f"null and alternative alphabets differ: {p.axis_sizes} vs {p_bar.axis_sizes}"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "p_bar", p_bar)

    @property
    def sizes(self) -> tuple[int, int, int]:
        x_size, y1_size, y2_size = self.p.axis_sizes
        return x_size, y1_size, y2_size

    def swapped(self) -> HypothesisPair:
        return HypothesisPair(self.p_bar, self.p, name=f"{self.name}-swapped" if self.name else "")

    def x_marginals_equal(self, tol: float = MARGINAL_EQ_TOL) -> bool:
        gap = np.max(np.abs(marginal(self.p, (X,)).probs - marginal(self.p_bar, (X,)).probs))
        return bool(gap < tol)

    def require_zero_rate_support(self) -> None:
        """Raise unless P̄ is positive everywhere and P_XY1 is positive on X×Y1."""
        if not np.all(self.p_bar.support()):
            cell = tuple(int(i) for i in np.argwhere(~self.p_bar.support())[0])
            raise PreconditionError(
                f"full support of the alternative law is required, P̄{cell} = 0"
            )
        p_xy1 = marginal(self.p, (X, Y1))
        if not np.all(p_xy1.support()):
            cell = tuple(int(i) for i in np.argwhere(~p_xy1.support())[0])
            raise PreconditionError(
                f"positivity of the null (X,Y1)-marginal is required, P_XY1{cell} = 0"
            )


def marginal(pmf: JointPmf, axes: Iterable[str]) -> JointPmf:
    """Sum out every coordinate not in ``axes``; the result keeps the order of ``axes``."""
    axes = tuple(axes)
    if not axes:
        raise StructuralError("marginal needs at least one axis")
    if len(set(axes)) != len(axes):
        raise StructuralError(f"duplicate axis in marginal request {axes}")
    keep = [pmf.index_of(axis) for axis in axes]
    dropped = tuple(i for i in range(pmf.ndim) if i not in keep)
    table = pmf.table.sum(axis=dropped) if dropped else pmf.table
    remaining = [pmf.axis_names[i] for i in range(pmf.ndim) if i in keep]
    perm = [remaining.index(axis) for axis in axes]
    return JointPmf.from_table(axes, np.transpose(table, perm), normalize=True)


def kl_divergence(p: JointPmf, q: JointPmf, term: str = "D(p||q)") -> float:
    """KL divergence in nats with 0·ln(0/q) = 0; values below ZERO_PROB read as 0."""
    q = q.reorder(p.axis_names)
    if q.axis_sizes != p.axis_sizes:
        raise StructuralError(f"alphabet mismatch in {term}: {p.axis_sizes} vs {q.axis_sizes}")
    mask = p.probs > ZERO_PROB
    bad = mask & (q.probs <= ZERO_PROB)
    if np.any(bad):
        flat = int(np.flatnonzero(bad)[0])
        cell = tuple(int(i) for i in np.unravel_index(flat, p.axis_sizes))
        raise DivergenceInfiniteError(term, cell)
    value = float(np.sum(p.probs[mask] * np.log(p.probs[mask] / q.probs[mask])))
    return value if value > ZERO_PROB else 0.0


def entropy(pmf: JointPmf, axes: Iterable[str] | None = None) -> float:
    if axes is not None:
        pmf = marginal(pmf, axes)
    return max(float(-np.sum(xlogy(pmf.probs, pmf.probs))), 0.0)


def conditional_entropy(pmf: JointPmf, target: Sequence[str], given: Sequence[str]) -> float:
    _require_disjoint(target, given)
    if not given:
        return entropy(pmf, target)
    return max(entropy(pmf, tuple(target) + tuple(given)) - entropy(pmf, given), 0.0)


def mutual_information(
    pmf: JointPmf,
    axes_a: Sequence[str],
    axes_b: Sequence[str],
    axes_cond: Sequence[str] = (),
) -> float:
    """I(A;B|C) in nats via the entropy decomposition."""
    axes_a, axes_b, axes_cond = tuple(axes_a), tuple(axes_b), tuple(axes_cond)
    _require_disjoint(axes_a, axes_b, axes_cond)
    for axis in axes_a + axes_b + axes_cond:
        pmf.index_of(axis)
    h_ac = entropy(pmf, axes_a + axes_cond)
    h_bc = entropy(pmf, axes_b + axes_cond)
    h_abc = entropy(pmf, axes_a + axes_b + axes_cond)
    h_c = entropy(pmf, axes_cond) if axes_cond else 0.0
    return max(h_ac + h_bc - h_abc - h_c, 0.0)


def mutual_information_table(joint: np.ndarray) -> float:
    """I(A;B) of a 2-D joint table, for inner loops that skip pmf validation."""
    row = joint.sum(axis=1, keepdims=True)
    col = joint.sum(axis=0, keepdims=True)
    mask = joint > ZERO_PROB
    value = np.sum(joint[mask] * np.log(joint[mask] / (row @ col)[mask]))
    return max(float(value), 0.0)


def attach_channel(pmf: JointPmf, chan: CondChannel) -> JointPmf:
    """Append ``chan.output_axis`` to ``pmf`` with the channel as its conditional law."""
    if chan.output_axis in pmf.axis_names:
        raise StructuralError(f"axis {chan.output_axis!r} already present in {pmf.axis_names}")
    shape = [1] * pmf.ndim + [chan.output_size]
    positions = []
    for axis, size in zip(chan.input_axes, chan.input_sizes):
        pos = pmf.index_of(axis)
        if pmf.axis_sizes[pos] != size:
            raise StructuralError(
                f"channel expects |{axis}|={size}, pmf has {pmf.axis_sizes[pos]}"
            )
        shape[pos] = size
        positions.append(pos)
    order = list(np.argsort(positions)) + [len(positions)]
    kernel = np.transpose(chan.table, order).reshape(shape)
    joint = pmf.table[..., None] * kernel
    return JointPmf.from_table(pmf.axis_names + (chan.output_axis,), joint, normalize=True)


def product(*pmfs: JointPmf) -> JointPmf:
    """Independent product law; axis labels must be disjoint."""
    names: tuple[str, ...] = ()
    table = np.ones(())
    for pmf in pmfs:
        _require_disjoint(names, pmf.axis_names)
        names += pmf.axis_names
        table = np.multiply.outer(table, pmf.table)
    return JointPmf.from_table(names, table, normalize=True)


def conditional_divergence(
    p: JointPmf, q: JointPmf, target: Sequence[str], given: Sequence[str]
) -> float:
    """E_{P_given}[ D(P_{target|given} || Q_{target|given}) ] by direct summation."""
    target, given = tuple(target), tuple(given)
    _require_disjoint(target, given)
    p_joint = marginal(p, given + target).table
    q_joint = marginal(q, given + target).table
    g_shape = p_joint.shape[: len(given)]
    p_rows = p_joint.reshape(prod(g_shape), -1)
    q_rows = q_joint.reshape(prod(g_shape), -1)
    total = 0.0
    for index, (p_row, q_row) in enumerate(zip(p_rows, q_rows)):
        weight = p_row.sum()
        if weight <= ZERO_PROB:
            continue
        p_cond = p_row / weight
        mask = p_cond > ZERO_PROB
        q_weight = q_row.sum()
        if q_weight <= ZERO_PROB or np.any(q_row[mask] <= ZERO_PROB):
            cell = tuple(int(i) for i in np.unravel_index(index, g_shape))
            label = f"{''.join(target)}|{''.join(given)}"
            raise DivergenceInfiniteError(f"D(P_{label}||Q_{label})", cell)
        q_cond = q_row / q_weight
        total += weight * float(np.sum(p_cond[mask] * np.log(p_cond[mask] / q_cond[mask])))
    return total if total > ZERO_PROB else 0.0


def _require_disjoint(*groups: Sequence[str]) -> None:
    seen: set[str] = set()
    for group in groups:
        overlap = seen.intersection(group)
        if overlap:
            raise StructuralError(f"axis sets overlap on {sorted(overlap)}")
        if len(set(group)) != len(group):
            raise StructuralError(f"duplicate axis in {tuple(group)}")
        seen.update(group)
