"""Minimum KL divergence under fixed sub-marginals: I-projection, oracle and certificate."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from loguru import logger
import numpy as np
from scipy.special import logsumexp

from .errors import ConvergenceError, InfeasibleConstraintsError, StructuralError
from .prob import ZERO_PROB, JointPmf, kl_divergence, marginal

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 100_000
CONSISTENCY_TOL = 1e-9
PRODUCT_FORM_TOL = 1e-6
VALUE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarginalConstraint:
    """Require the minimizer's marginal on ``axes`` to equal ``target``."""

    axes: tuple[str, ...]
    target: JointPmf

    def __post_init__(self) -> None:
        axes = tuple(self.axes)
        if sorted(axes) != sorted(self.target.axis_names):
            raise StructuralError(
                f"constraint axes {axes} do not match target axes {self.target.axis_names}"
            )
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "target", self.target.reorder(axes))

    @classmethod
    def from_pmf(cls, source: JointPmf, axes: Sequence[str]) -> MarginalConstraint:
        """Pin the ``axes``-marginal of ``source``."""
        return cls(tuple(axes), marginal(source, axes))


@dataclass(frozen=True)
class ProjectionResult:
    """Minimum value, minimizer and solver diagnostics."""

    value: float
    argmin: JointPmf
    iterations: int
    residual: float
    trace: tuple[np.ndarray, ...] = ()


@dataclass(frozen=True)
class OracleResult:
    """Best value found by the penalty oracle across its restarts."""

    value: float
    argmin: JointPmf
    residual: float
    restarts: int


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of the three optimality checks on a projection result."""

    residual: float
    product_form_residual: float
    value_gap: float
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def diagnostic(self) -> str:
        return "certificate passed" if self.passed else "; ".join(self.failures)


@dataclass(frozen=True)
class _ScalingPlan:
    reduce_axes: tuple[int, ...]
    target: np.ndarray
    label: str


def i_project(
    target: JointPmf,
    constraints: Sequence[MarginalConstraint],
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    record_trace: bool = False,
) -> ProjectionResult:
    """Minimize D(Q||target) over Q matching every constraint, by cyclic iterative scaling.

    Each cycle rescales Q once per constraint, in list order, so that its
    marginal on the constraint axes equals the constraint target. The
    minimizer keeps the product form target·∏ f_i and target zeros stay zero.
    """
    plans = _prepare(target, constraints)
    q = np.array(target.table, dtype=float)
    trace: list[np.ndarray] = [q.copy()] if record_trace else []
    residual = _residual(q, plans)
    iterations = 0
    while residual >= tol and iterations < max_iters:
        for plan in plans:
            current = q.sum(axis=plan.reduce_axes, keepdims=True)
            starved = (current <= 0.0) & (plan.target > ZERO_PROB)
            if np.any(starved):
                raise InfeasibleConstraintsError(
                    f"constraint on {plan.label} needs mass on a cylinder the other constraints empty"
                )
            ratio = np.divide(plan.target, current, out=np.zeros_like(current), where=current > 0.0)
            q *= ratio
        iterations += 1
        residual = _residual(q, plans)
        if record_trace:
            trace.append(q.copy())
    if residual >= tol:
        logger.warning(
            "I-projection stalled | iters={} | residual={:.3e} | tol={:.1e}", iterations, residual, tol
        )
        raise ConvergenceError("iterative scaling did not reach tolerance", residual, iterations)
    argmin = JointPmf.from_table(target.axis_names, q, normalize=True)
    value = kl_divergence(argmin, target, term="D(Q||target)")
    logger.debug(
        "I-projection converged | axes={} | iters={} | residual={:.3e} | value={:.6g}",
        target.axis_names,
        iterations,
        residual,
        value,
    )
    return ProjectionResult(
        value=value, argmin=argmin, iterations=iterations, residual=residual, trace=tuple(trace)
    )


def oracle_min_divergence(
    target: JointPmf,
    constraints: Sequence[MarginalConstraint],
    restarts: int = 4,
    steps: int = 100_000,
    seed: int = 0,
    penalty: float = 10.0,
) -> OracleResult:
    """Solve the same convex program by entropic mirror descent on an augmented Lagrangian.

    All restarts run as one batch from Dirichlet starts (the first start is
    the target itself); the multipliers are updated between inner solves and
    the penalty doubles whenever the violation stops shrinking.
    """
    _prepare(target, constraints)
    support = target.probs > ZERO_PROB
    log_t = np.log(target.probs[support])
    design, rhs = _linear_system(target, constraints, support)
    unreachable = (design.sum(axis=1) == 0) & (rhs > ZERO_PROB)
    if np.any(unreachable):
        raise InfeasibleConstraintsError("a constraint needs mass where the target is zero")
    count = int(support.sum())
    batch = max(1, restarts)
    rng = np.random.default_rng(seed)
    q = rng.dirichlet(np.ones(count), size=batch)
    q[0] = target.probs[support] / target.probs[support].sum()
    multipliers = np.zeros((batch, rhs.size))
    blocks = max(1, len(constraints))
    rho = penalty
    previous = np.inf
    used = 0
    inner_cap = 2_000
    while used < steps:
        eta = 1.0 / (rho * blocks)
        log_q = np.log(np.maximum(q, 1e-300))
        for _ in range(min(inner_cap, steps - used)):
            violation = q @ design.T - rhs
            grad = (multipliers + rho * violation) @ design
            log_next = (log_q + eta * log_t - eta * grad) / (1.0 + eta)
            log_next -= logsumexp(log_next, axis=1, keepdims=True)
            q_next = np.exp(log_next)
            used += 1
            shift = float(np.max(np.abs(q_next - q)))
            q, log_q = q_next, log_next
            if shift < 1e-15:
                break
        violation = q @ design.T - rhs
        multipliers += rho * violation
        worst = float(np.max(np.abs(violation), initial=0.0))
        if worst < 1e-11:
            break
        if worst > 0.25 * previous and rho < 1e3:
            rho *= 2.0
        previous = worst
    residuals = np.max(np.abs(q @ design.T - rhs), axis=1) if rhs.size else np.zeros(batch)
    values = np.array([_divergence_on_support(row, log_t) for row in q])
    best = int(np.argmin(values + 1e3 * residuals))
    full = np.zeros(target.probs.size)
    full[support] = q[best]
    argmin = JointPmf(target.axis_names, target.axis_sizes, full / full.sum())
    logger.debug(
        "Oracle finished | steps={} | rho={} | value={:.6g} | residual={:.3e}",
        used,
        rho,
        values[best],
        residuals[best],
    )
    return OracleResult(
        value=float(values[best]), argmin=argmin, residual=float(residuals[best]), restarts=batch
    )


def certify(
    result: ProjectionResult,
    target: JointPmf,
    constraints: Sequence[MarginalConstraint],
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Check constraint residuals, product-form factorization and value consistency."""
    plans = _prepare(target, constraints)
    argmin = result.argmin.reorder(target.axis_names)
    q = argmin.table
    t = target.table
    failures: list[str] = []

    residual = _residual(q, plans)
    if residual >= 10.0 * tol:
        failures.append(f"(a) constraint residual {residual:.3e} exceeds {10.0 * tol:.1e}")

    product_residual = 0.0
    q_pos = q > ZERO_PROB
    t_pos = t > ZERO_PROB
    if np.any(q_pos & ~t_pos):
        failures.append("(b) minimizer puts mass where the target is zero")
    zero_cells = t_pos & ~q_pos
    if np.any(zero_cells):
        pinned = np.zeros_like(zero_cells)
        for plan in plans:
            pinned |= np.broadcast_to(plan.target <= ZERO_PROB, t.shape)
        if np.any(zero_cells & ~pinned):
            failures.append("(b) minimizer vanishes outside every zero cylinder of the constraints")
    live = q_pos & t_pos
    if np.any(live):
        response = np.log(q[live] / t[live])
        columns = [np.ones(int(live.sum()))]
        for plan in plans:
            cells = np.broadcast_to(
                np.arange(plan.target.size).reshape(plan.target.shape), t.shape
            )[live]
            columns.extend((cells == k).astype(float) for k in range(plan.target.size))
        design = np.column_stack(columns)
        coef, *_ = np.linalg.lstsq(design, response, rcond=None)
        product_residual = float(np.max(np.abs(design @ coef - response)))
        if product_residual >= PRODUCT_FORM_TOL:
            failures.append(
                f"(b) log-ratio leaves the constraint span by {product_residual:.3e}"
            )

    value_gap = abs(result.value - kl_divergence(argmin, target, term="D(Q||target)"))
    if value_gap >= VALUE_TOL:
        failures.append(f"(c) reported value differs from D(argmin||target) by {value_gap:.3e}")

    return CertificateReport(
        residual=residual,
        product_form_residual=product_residual,
        value_gap=value_gap,
        failures=tuple(failures),
    )


def constraint_residual(pmf: JointPmf, constraints: Sequence[MarginalConstraint]) -> float:
    """Largest absolute deviation of ``pmf`` from any constraint target."""
    plans = _prepare(pmf, constraints)
    return _residual(pmf.table, plans)


def _prepare(target: JointPmf, constraints: Sequence[MarginalConstraint]) -> list[_ScalingPlan]:
    plans: list[_ScalingPlan] = []
    for constraint in constraints:
        positions = []
        for axis in constraint.axes:
            pos = target.index_of(axis)
            if target.axis_sizes[pos] != constraint.target.size_of(axis):
                raise StructuralError(
                    f"constraint alphabet for {axis} has size {constraint.target.size_of(axis)}, "
                    f"ambient size is {target.axis_sizes[pos]}"
                )
            positions.append(pos)
        ambient_axes = tuple(target.axis_names[pos] for pos in sorted(positions))
        shape = [1] * target.ndim
        for pos in positions:
            shape[pos] = target.axis_sizes[pos]
        table = constraint.target.reorder(ambient_axes).table.reshape(shape)
        reduce_axes = tuple(i for i in range(target.ndim) if i not in positions)
        plans.append(_ScalingPlan(reduce_axes, table, "".join(constraint.axes)))
    _check_consistency(constraints)
    return plans


def _check_consistency(constraints: Sequence[MarginalConstraint]) -> None:
    for first, second in combinations(constraints, 2):
        common = [axis for axis in first.axes if axis in second.axes]
        if not common:
            continue
        gap = np.max(
            np.abs(marginal(first.target, common).probs - marginal(second.target, common).probs)
        )
        if gap > CONSISTENCY_TOL:
            raise InfeasibleConstraintsError(
                f"constraints on {first.axes} and {second.axes} disagree on the "
                f"{tuple(common)}-marginal by {gap:.3e}"
            )


def _residual(q: np.ndarray, plans: Sequence[_ScalingPlan]) -> float:
    worst = 0.0
    for plan in plans:
        current = q.sum(axis=plan.reduce_axes, keepdims=True)
        worst = max(worst, float(np.max(np.abs(current - plan.target))))
    return worst


def _linear_system(
    target: JointPmf, constraints: Sequence[MarginalConstraint], support: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    rows: list[np.ndarray] = []
    rhs: list[np.ndarray] = []
    for plan in _prepare(target, constraints):
        cells = np.broadcast_to(
            np.arange(plan.target.size).reshape(plan.target.shape), target.axis_sizes
        ).reshape(-1)[support]
        rows.append((cells[None, :] == np.arange(plan.target.size)[:, None]).astype(float))
        rhs.append(plan.target.reshape(-1))
    if not rows:
        return np.zeros((0, int(support.sum()))), np.zeros(0)
    return np.vstack(rows), np.concatenate(rhs)


def _divergence_on_support(q: np.ndarray, log_t: np.ndarray) -> float:
    mask = q > ZERO_PROB
    return max(float(np.sum(q[mask] * (np.log(q[mask]) - log_t[mask]))), 0.0)
