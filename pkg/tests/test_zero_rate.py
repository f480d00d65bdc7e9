from __future__ import annotations

import numpy as np
import pytest
from scipy.special import rel_entr

from src.core.errors import ModelValidationError, PreconditionError
from src.regions.frontier import COHERENT, CONCURRENT, ExponentRegion, pareto_frontier
from src.regions.zero_rate import (
    DIFFERENT,
    NO_COOP_COHERENT,
    NO_COOP_W1GE3,
    SAME,
    PartitionRule,
    ZeroRateExponents,
    assign_to_gamma_b1,
    centralized_theta2,
    cooperation_benefit_zero_rate,
    degenerate_structure,
    region_coherent,
    region_concurrent_equal_marginals,
    region_concurrent_W1eq2,
    region_concurrent_W1ge3,
    region_no_cooperation,
    simplex_grid,
)


def test_coherent_region_is_a_positive_rectangle(example6):
    region = region_coherent(example6)
    assert region.is_rectangle
    assert region.mode == COHERENT
    theta1, theta2 = region.corner
    assert 0.0 < theta1 < np.inf
    assert 0.0 < theta2 < np.inf


def test_identical_laws_give_the_zero_corner(identical_pair):
    assert region_coherent(identical_pair).corner == (0.0, 0.0)


def test_concurrent_regions_check_the_sensor_marginals(example6, markov_y2_between):
    with pytest.raises(PreconditionError, match="equal sensor marginals"):
        region_concurrent_equal_marginals(example6)
    with pytest.raises(PreconditionError, match="distinct sensor marginals"):
        region_concurrent_W1ge3(markov_y2_between)
    region = region_concurrent_equal_marginals(markov_y2_between)
    assert region.is_rectangle and region.mode == CONCURRENT


def _kl(a, b):
    return float(rel_entr(a, b).sum())


def _product_closed_form(pi0):
    """e1 and e2 of the product fixture at sensor type (pi0, 1 - pi0)."""
    c1 = _kl([0.4, 0.6], [0.7, 0.3])
    c2 = _kl([0.7, 0.3], [0.4, 0.6]) + _kl([0.6, 0.4], [0.3, 0.7])
    pi = [pi0, 1.0 - pi0]
    return _kl(pi, [0.6, 0.4]) + c1, _kl(pi, [0.4, 0.6]) + c2


def test_two_message_sweep_trades_theta1_for_theta2(product_tradeoff):
    result = region_concurrent_W1eq2(product_tradeoff, px_grid_step=0.01)
    points = result.region.points
    assert len(points) >= 5
    for (a1, b1), (a2, b2) in zip(points, points[1:]):
        assert a2 > a1 and b2 < b1
    three_messages = region_concurrent_W1ge3(product_tradeoff)
    for point in points:
        assert three_messages.contains(point)

    theta1, _ = _product_closed_form(0.4)
    _, theta2 = _product_closed_form(0.6)
    assert three_messages.corner == pytest.approx((theta1, theta2), abs=1e-8)
    for pi0, e1, e2 in zip(result.grid[:, 0], result.e1, result.e2):
        assert (e1, e2) == pytest.approx(_product_closed_form(pi0), abs=1e-8)


def test_two_message_frontier_is_stable_under_grid_refinement(product_tradeoff):
    coarse = region_concurrent_W1eq2(product_tradeoff, px_grid_step=0.01).region.points
    fine = region_concurrent_W1eq2(product_tradeoff, px_grid_step=0.005).region.points

    def gap(point, others):
        return min(max(abs(point[0] - a), abs(point[1] - b)) for a, b in others)

    assert max(gap(point, coarse) for point in fine) < 5e-3
    assert max(gap(point, fine) for point in coarse) < 5e-3


def test_two_message_sweep_on_a_nearly_pinned_pair(example6):
    result = region_concurrent_W1eq2(example6, px_grid_step=0.05)
    three_messages = region_concurrent_W1ge3(example6)
    assert len(result.region.points) >= 1
    for point in result.region.points:
        assert three_messages.contains(point)

    thresholded = [p for p in result.sweep if p.mapping == DIFFERENT]
    assert [p.r for p in thresholded] == sorted(p.r for p in thresholded)
    for before, after in zip(thresholded, thresholded[1:]):
        assert after.theta1 <= before.theta1
        assert after.theta2 >= before.theta2
    assert sum(p.mapping == SAME for p in result.sweep) == 1


def test_two_message_sweep_uses_the_given_thresholds(example6):
    result = region_concurrent_W1eq2(example6, px_grid_step=0.1, r_grid=[0.05, -0.05, 0.0])
    assert [p.r for p in result.sweep if p.mapping == DIFFERENT] == [-0.05, 0.0, 0.05]
    with pytest.raises(ModelValidationError):
        region_concurrent_W1eq2(example6, px_grid_step=0.1, r_grid=[])
    with pytest.raises(ModelValidationError):
        region_concurrent_W1eq2(example6, px_grid_step=0.5)


def test_markov_through_y2_makes_cooperation_useless(markov_y2_between):
    cooperative = region_coherent(markov_y2_between).corner[1]
    alone = region_no_cooperation(markov_y2_between, NO_COOP_COHERENT).corner[1]
    assert cooperative == pytest.approx(alone, abs=1e-7)
    assert cooperation_benefit_zero_rate(markov_y2_between) < 1e-7
    assert degenerate_structure(markov_y2_between).cooperation_useless


def test_markov_through_y1_matches_the_centralized_detector(markov_y1_between):
    theta2 = region_coherent(markov_y1_between).corner[1]
    assert theta2 == pytest.approx(centralized_theta2(markov_y1_between), abs=1e-7)
    assert degenerate_structure(markov_y1_between).centralized_equivalent


def test_generic_pair_has_no_degenerate_structure(example6):
    structure = degenerate_structure(example6)
    assert not structure.cooperation_useless
    assert not structure.centralized_equivalent
    assert cooperation_benefit_zero_rate(example6) > 0.0


@pytest.mark.parametrize("seed", range(5))
def test_cooperation_never_hurts(random_pair, seed):
    pair = random_pair(seed)
    assert region_coherent(pair).corner[1] >= region_no_cooperation(pair, NO_COOP_COHERENT).corner[1] - 1e-9
    assert cooperation_benefit_zero_rate(pair) >= 0.0


@pytest.mark.parametrize("seed", range(5))
def test_benefit_is_the_gap_between_the_rectangles(random_pair, seed):
    pair = random_pair(seed)
    cooperative = region_coherent(pair).corner[1]
    alone = region_no_cooperation(pair, NO_COOP_COHERENT).corner[1]
    assert cooperation_benefit_zero_rate(pair) == pytest.approx(cooperative - alone, abs=1e-9)


def test_no_cooperation_keeps_theta1(example6):
    with_link = region_concurrent_W1ge3(example6)
    without = region_no_cooperation(example6, NO_COOP_W1GE3)
    assert without.corner[0] == pytest.approx(with_link.corner[0], abs=1e-12)
    assert without.w2 == 0
    with pytest.raises(ModelValidationError):
        region_no_cooperation(example6, "sideways")


def test_partition_rule_and_ties():
    assert assign_to_gamma_b1(0.2, 0.5, 0.3) == 1
    assert assign_to_gamma_b1(0.2, 0.5, 0.29) == 0


def test_same_mapping_sends_everything_to_gamma_one(example6):
    rule = PartitionRule(ZeroRateExponents(example6), r=-10.0, mapping=SAME)
    assert rule.gamma_index([0.3, 0.7]) == 1
    assert rule.message_for_typical(True) == 0
    assert PartitionRule(ZeroRateExponents(example6), r=0.0, mapping=DIFFERENT).message_for_typical(True) == 1
    with pytest.raises(ModelValidationError):
        PartitionRule(ZeroRateExponents(example6), r=0.0, mapping="other")


def test_simplex_grid_covers_the_simplex():
    grid = simplex_grid(3, 0.1)
    assert grid.shape == (66, 3)
    np.testing.assert_allclose(grid.sum(axis=1), 1.0)
    assert len({tuple(row) for row in grid}) == 66


def test_pareto_filter_drops_dominated_points():
    points, witnesses = pareto_frontier([(0.1, 0.5), (0.2, 0.4), (0.1, 0.3), (0.3, 0.1), (0.2, 0.4)], list("abcde"))
    assert points == ((0.1, 0.5), (0.2, 0.4), (0.3, 0.1))
    assert witnesses[0] == "a" and witnesses[2] == "d"
    region = ExponentRegion.from_candidates([(0.3, 0.2)], COHERENT)
    assert region.is_rectangle and region.corner == (0.3, 0.2)
