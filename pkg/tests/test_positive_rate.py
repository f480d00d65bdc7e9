from __future__ import annotations

import numpy as np
import pytest

from src.core.errors import ModelValidationError, PreconditionError
from src.core.prob import (
    U,
    V,
    X,
    Y1,
    Y2,
    CondChannel,
    attach_channel,
    conditional_entropy,
    entropy,
    kl_divergence,
    marginal,
    mutual_information,
)
from src.regions.frontier import COHERENT, CONCURRENT, from_bits
from src.regions.positive_rate import (
    AuxChannels,
    RatePair,
    _conditional_information,
    exponents_for_aux_coherent,
    exponents_for_aux_concurrent,
    high_rate_region,
    region_achievable,
    region_test_against_independence,
    region_test_against_independence_no_cooperation,
    require_independence_structure,
)
from src.regions.search import SearchConfig

SMALL_SEARCH = SearchConfig(lambda_points=3, restarts=6, sweeps=20, seed=0, workers=1)


def _identity_aux(with_u1: bool = False) -> AuxChannels:
    """U = X and V = Y1 on binary alphabets."""
    return AuxChannels.from_rows(
        np.eye(2), np.tile(np.eye(2), (2, 1)), 2, np.eye(2) if with_u1 else None
    )


def test_high_rate_corners_and_benefit(example6):
    p_xy1 = marginal(example6.p, (X, Y1))
    p_bar_xy1 = marginal(example6.p_bar, (X, Y1))
    coherent = high_rate_region(example6, COHERENT)
    assert coherent.region.corner == pytest.approx(
        (kl_divergence(p_xy1, p_bar_xy1), kl_divergence(example6.p, example6.p_bar)), abs=1e-12
    )
    alone = high_rate_region(example6, COHERENT, cooperative=False)
    gap = coherent.region.corner[1] - alone.region.corner[1]
    assert coherent.benefit == pytest.approx(gap, abs=1e-10)
    assert coherent.benefit > 0.0

    concurrent = high_rate_region(example6, CONCURRENT)
    assert concurrent.region.corner[0] == pytest.approx(kl_divergence(p_bar_xy1, p_xy1), abs=1e-12)
    assert coherent.required_rates.r1 == pytest.approx(entropy(example6.p, (X,)) + 1e-3)
    assert coherent.required_rates.r2 == pytest.approx(conditional_entropy(example6.p, (Y1,), (X,)) + 1e-3)


def test_identity_auxiliaries_reach_the_high_rate_corner(example6):
    result = exponents_for_aux_coherent(example6, _identity_aux())
    corner = high_rate_region(example6, COHERENT).region.corner
    assert result.point == pytest.approx(corner, abs=1e-8)
    assert result.rate_u == pytest.approx(entropy(example6.p, (X,)), abs=1e-12)
    assert result.rate_v == pytest.approx(conditional_entropy(example6.p, (Y1,), (X,)), abs=1e-12)
    assert result.within(RatePair(result.rate_u, result.rate_v))
    assert not result.within(RatePair(result.rate_u - 1e-3, result.rate_v))


def test_concurrent_identity_auxiliaries(example6, markov_y2_between):
    unequal = exponents_for_aux_concurrent(example6, _identity_aux(with_u1=True), equal_marginals=False)
    flipped = kl_divergence(marginal(example6.p_bar, (X, Y1)), marginal(example6.p, (X, Y1)))
    assert unequal.theta1 == pytest.approx(flipped, abs=1e-8)
    assert unequal.rate_u1 == pytest.approx(entropy(example6.p_bar, (X,)), abs=1e-12)

    equal = exponents_for_aux_concurrent(markov_y2_between, _identity_aux(), equal_marginals=True)
    corner = high_rate_region(markov_y2_between, CONCURRENT).region.corner
    assert equal.point == pytest.approx(corner, abs=1e-8)


def test_concurrent_auxiliaries_check_their_preconditions(example6, markov_y2_between):
    with pytest.raises(PreconditionError):
        exponents_for_aux_concurrent(markov_y2_between, _identity_aux(), equal_marginals=False)
    with pytest.raises(ModelValidationError, match="U1"):
        exponents_for_aux_concurrent(example6, _identity_aux(), equal_marginals=False)


@pytest.mark.parametrize("seed", range(50))
def test_silent_link_reduces_to_mutual_informations(example1, seed):
    rng = np.random.default_rng(seed)
    u_rows = rng.dirichlet(np.ones(3), size=3)
    aux = AuxChannels.from_rows(u_rows, np.ones((6, 1)), 2)
    result = exponents_for_aux_coherent(example1, aux)
    joint = attach_channel(example1.p, aux.u_given_x)
    with_y1 = mutual_information(joint, (U,), (Y1,))
    with_y2 = mutual_information(joint, (U,), (Y2,))
    assert result.theta1 == pytest.approx(with_y1, abs=1e-8)
    assert result.theta2 == pytest.approx(with_y1 + with_y2, abs=1e-8)
    assert result.rate_v == pytest.approx(0.0, abs=1e-12)


def test_independence_region_beats_the_silent_link(example1):
    r1 = from_bits(0.4)
    cooperative = region_test_against_independence(example1, r1, SMALL_SEARCH)
    alone = region_test_against_independence_no_cooperation(example1, r1, SMALL_SEARCH)
    for region in (cooperative, alone):
        for aux in region.witnesses:
            joint = attach_channel(example1.p, aux.u_given_x)
            assert mutual_information(joint, (U,), (X,)) <= r1 + 1e-8
    for theta1, theta2 in cooperative.points:
        assert theta2 >= theta1 - 1e-12
    assert cooperative.max_theta2 > alone.max_theta2


def test_independence_region_reaches_the_full_information_sum_at_high_rate(example1):
    r1 = entropy(example1.p, (X,)) + 0.05
    config = SearchConfig(lambda_points=2, restarts=2, sweeps=2, seed=0, workers=1)
    region = region_test_against_independence(example1, r1, config)
    ceiling = mutual_information(example1.p, (X,), (Y1,)) + mutual_information(example1.p, (X,), (Y2,))
    assert region.max_theta2 == pytest.approx(ceiling, abs=1e-3)
    assert region.max_theta2 <= ceiling + 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_cooperation_rate_matches_the_conditional_information(example6, seed):
    rng = np.random.default_rng(seed)
    u_rows = rng.dirichlet(np.ones(3), size=2)
    v_rows = rng.dirichlet(np.ones(4), size=6)
    aux = AuxChannels.from_rows(u_rows, v_rows, 2)
    p_full = attach_channel(attach_channel(example6.p, aux.u_given_x), aux.v_given_uy1)
    weights = (u_rows.T @ marginal(example6.p, (X, Y1)).table).reshape(-1)
    expected = mutual_information(p_full, (V,), (Y1,), (U,))
    assert _conditional_information(weights, v_rows, 2) == pytest.approx(expected, abs=1e-12)


def test_search_witnesses_respect_both_rate_budgets(example6):
    rates = RatePair(0.2, 0.05)
    config = SearchConfig(lambda_points=3, restarts=4, sweeps=3, seed=1, workers=1)
    region = region_achievable(example6, rates, COHERENT, config)
    for aux in region.witnesses:
        result = exponents_for_aux_coherent(example6, aux)
        assert result.rate_u <= rates.r1 + 1e-8
        assert result.rate_v <= rates.r2 + 1e-8


def test_higher_rates_only_enlarge_the_region(example6):
    low = region_achievable(
        example6,
        RatePair(0.1, 0.05),
        COHERENT,
        SearchConfig(lambda_points=3, restarts=3, sweeps=2, seed=0, workers=1),
    )
    high = region_achievable(
        example6,
        RatePair(0.3, 0.2),
        COHERENT,
        SearchConfig(lambda_points=3, restarts=2, sweeps=0, seed=0, workers=1),
        starts=low.witnesses,
    )
    for point in low.points:
        assert high.contains(point, tol=1e-7)


def test_independence_region_needs_the_product_alternative(example6, example1):
    require_independence_structure(example1)
    with pytest.raises(PreconditionError, match="independence"):
        region_test_against_independence(example6, 0.1, SMALL_SEARCH)
    with pytest.raises(ModelValidationError):
        region_test_against_independence(example1, -0.1, SMALL_SEARCH)


def test_search_start_at_identity_finds_the_high_rate_corner(example6):
    corner = high_rate_region(example6, COHERENT).region.corner
    rates = RatePair(
        entropy(example6.p, (X,)) + 0.05, conditional_entropy(example6.p, (Y1,), (X,)) + 0.05
    )
    config = SearchConfig(lambda_points=1, restarts=1, sweeps=0, workers=1)
    region = region_achievable(example6, rates, COHERENT, config)
    assert region.is_rectangle
    assert region.corner == pytest.approx(corner, abs=1e-6)
    assert isinstance(region.witnesses[0], AuxChannels)


def test_unequal_marginal_concurrent_region_is_a_rectangle(example6):
    config = SearchConfig(lambda_points=1, restarts=2, sweeps=1, workers=1)
    region = region_achievable(example6, RatePair(0.1, 0.1), CONCURRENT, config)
    assert region.is_rectangle
    witness = region.witnesses[0]
    assert witness.u1_given_x is not None
    high = high_rate_region(example6, CONCURRENT).region.corner
    theta1, theta2 = region.corner
    assert theta1 <= high[0] + 1e-8
    assert theta2 <= kl_divergence(example6.p, example6.p_bar) + 1e-8


def test_rates_and_channels_are_validated():
    with pytest.raises(ModelValidationError):
        RatePair(-0.1, 0.0)
    good = _identity_aux()
    with pytest.raises(ModelValidationError):
        AuxChannels(good.v_given_uy1, good.u_given_x)
    wider_u = CondChannel.from_table((U, Y1), V, np.ones((3, 2, 1)))
    with pytest.raises(ModelValidationError, match="U alphabet"):
        AuxChannels(good.u_given_x, wider_u)
    with pytest.raises(ModelValidationError):
        high_rate_region(None, "sideways")  # type: ignore[arg-type]
