from __future__ import annotations

from dataclasses import replace
from math import log, sqrt

import numpy as np
import pytest

from src.core.divmin import (
    MarginalConstraint,
    certify,
    constraint_residual,
    i_project,
    oracle_min_divergence,
)
from src.core.errors import ConvergenceError, InfeasibleConstraintsError, StructuralError
from src.core.prob import X, Y1, Y2, JointPmf, kl_divergence, marginal

from .conftest import random_law


def _uniform(axis: str, size: int) -> MarginalConstraint:
    return MarginalConstraint((axis,), JointPmf.uniform((axis,), (size,)))


def test_two_by_two_closed_form():
    target = JointPmf.from_table((X, Y1), np.array([[0.4, 0.1], [0.2, 0.3]]))
    result = i_project(target, [_uniform(X, 2), _uniform(Y1, 2)])
    # Uniform margins force Q = [[a, .5 - a], [.5 - a, a]]; the odds ratio of T fixes a.
    kappa = sqrt(0.4 * 0.3 / (0.1 * 0.2))
    a = 0.5 * kappa / (1.0 + kappa)
    expected = np.array([[a, 0.5 - a], [0.5 - a, a]])
    np.testing.assert_allclose(result.argmin.table, expected, atol=1e-9)
    value = sum(
        q * log(q / t) for q, t in zip(expected.reshape(-1), target.probs)
    )
    assert result.value == pytest.approx(value, abs=1e-9)


def test_target_already_feasible_costs_nothing(random_pair):
    law = random_pair(7).p
    constraints = [MarginalConstraint.from_pmf(law, (X, Y1)), MarginalConstraint.from_pmf(law, (Y2,))]
    result = i_project(law, constraints)
    assert result.value == 0.0
    assert result.iterations == 0


@pytest.mark.parametrize("seed", range(6))
def test_scaling_matches_penalty_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    target = random_law(rng, (3, 2, 2))
    source = random_law(rng, (3, 2, 2))
    constraints = [
        MarginalConstraint.from_pmf(source, (X, Y1)),
        MarginalConstraint.from_pmf(source, (X, Y2)),
    ]
    projected = i_project(target, constraints)
    oracle = oracle_min_divergence(target, constraints, restarts=2, seed=seed)
    assert oracle.residual < 1e-7
    assert oracle.value == pytest.approx(projected.value, abs=1e-5)
    assert oracle.value >= projected.value - 1e-6
    report = certify(projected, target, constraints)
    assert report.passed, report.diagnostic


def test_certificate_rejects_a_perturbed_minimizer(random_pair):
    pair = random_pair(12)
    constraints = [
        MarginalConstraint.from_pmf(pair.p, (X, Y1)),
        MarginalConstraint.from_pmf(pair.p, (X, Y2)),
    ]
    projected = i_project(pair.p_bar, constraints)
    assert certify(projected, pair.p_bar, constraints).passed

    table = projected.argmin.table.copy()
    table[0, 0, 0] += 1e-2
    nudged = replace(projected, argmin=JointPmf.from_table((X, Y1, Y2), table, normalize=True))
    report = certify(nudged, pair.p_bar, constraints)
    assert not report.passed
    assert any(failure.startswith("(b)") for failure in report.failures)
    assert any(failure.startswith("(c)") for failure in report.failures)

    misreported = certify(replace(projected, value=projected.value + 1e-6), pair.p_bar, constraints)
    assert [failure[:3] for failure in misreported.failures] == ["(c)"]


@pytest.mark.parametrize("seed", range(4))
def test_more_constraints_never_lower_the_minimum(seed):
    rng = np.random.default_rng(200 + seed)
    target = random_law(rng)
    source = random_law(rng)
    first = [MarginalConstraint.from_pmf(source, (X,))]
    second = first + [MarginalConstraint.from_pmf(source, (Y1,))]
    third = second + [MarginalConstraint.from_pmf(source, (Y2,))]
    values = [i_project(target, constraints).value for constraints in (first, second, third)]
    assert values[0] <= values[1] + 1e-12
    assert values[1] <= values[2] + 1e-12


def test_projection_meets_every_constraint(random_pair):
    pair = random_pair(8)
    constraints = [
        MarginalConstraint.from_pmf(pair.p, (X,)),
        MarginalConstraint.from_pmf(pair.p, (Y1,)),
        MarginalConstraint.from_pmf(pair.p, (Y2,)),
    ]
    result = i_project(pair.p_bar, constraints)
    assert constraint_residual(result.argmin, constraints) < 1e-10
    for axis in (X, Y1, Y2):
        assert marginal(result.argmin, (axis,)).allclose(marginal(pair.p, (axis,)), atol=1e-10)


def test_distance_to_the_minimizer_shrinks_every_cycle(random_pair):
    pair = random_pair(9)
    constraints = [
        MarginalConstraint.from_pmf(pair.p, (X, Y1)),
        MarginalConstraint.from_pmf(pair.p, (Y2,)),
    ]
    result = i_project(pair.p_bar, constraints, record_trace=True)
    assert len(result.trace) == result.iterations + 1
    distances = [
        kl_divergence(result.argmin, JointPmf.from_table((X, Y1, Y2), step, normalize=True))
        for step in result.trace
    ]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(distances, distances[1:]))


def test_disagreeing_constraints_are_infeasible():
    target = JointPmf.uniform((X, Y1), (2, 2))
    joint = JointPmf.from_table((X, Y1), np.array([[0.3, 0.3], [0.2, 0.2]]))
    constraints = [_uniform(X, 2), MarginalConstraint((X, Y1), joint)]
    with pytest.raises(InfeasibleConstraintsError):
        i_project(target, constraints)


def test_constraint_outside_target_support_is_infeasible():
    target = JointPmf.from_table((X, Y1), np.array([[0.5, 0.5], [0.0, 0.0]]))
    with pytest.raises(InfeasibleConstraintsError):
        i_project(target, [_uniform(X, 2)])
    with pytest.raises(InfeasibleConstraintsError):
        oracle_min_divergence(target, [_uniform(X, 2)])


def test_oscillating_scaling_raises_convergence_error():
    target = JointPmf.from_table((X, Y1), np.array([[0.5, 0.0], [0.0, 0.5]]))
    constraints = [
        _uniform(X, 2),
        MarginalConstraint((Y1,), JointPmf((Y1,), (2,), np.array([0.3, 0.7]))),
    ]
    with pytest.raises(ConvergenceError) as info:
        i_project(target, constraints, max_iters=50)
    assert info.value.iterations == 50
    assert info.value.exit_code == 4


def test_constraint_alphabet_must_match_ambient():
    target = JointPmf.uniform((X, Y1), (2, 2))
    with pytest.raises(StructuralError):
        i_project(target, [_uniform(X, 3)])
    with pytest.raises(StructuralError):
        MarginalConstraint((X, Y1), JointPmf.uniform((X,), (2,)))
