import random
from fractions import Fraction

import pytest

from drinfeld_reciprocity.errors import ThresholdNotMet, ValuationTooSmall
from drinfeld_reciprocity.laurent import LaurentNum
from drinfeld_reciprocity.reciprocity import (
    PairingValue,
    artin_unit_on_coord,
    artin_unit_on_torsion,
    conjugated_pairing_check,
    delta,
    delta_trace_identity,
    generator_norm,
    iwasawa_functional,
    kummer_lhs_prime_case,
    level_shift_check,
    majoration_constant,
    majoration_report,
    pairing_rhs,
    self_pairing,
)
from drinfeld_reciprocity.tower import composed_lift, embed, lift_to_series, perturbed_lift
from drinfeld_reciprocity.twisted import TwistedSeries


def _const(module, n, x):
    return module.level(n).constant(x)


# -- δ ---------------------------------------------------------------------------------------


def test_delta_of_generator(carlitz_q2):
    level = carlitz_q2.level(2)
    v = level.generator()
    d = delta(v)
    assert d.representative.valuation() == Fraction(-1, 2)
    assert d.congruent(level.v_inverse())


def test_delta_of_one_is_zero(carlitz_q2):
    level = carlitz_q2.level(2)
    assert delta(level.one()).representative.is_zero()


def test_delta_independent_of_lift(carlitz_q2):
    level = carlitz_q2.level(2)
    beta = level.generator() + 1
    f = lift_to_series(beta)
    rng = random.Random(7)
    for _ in range(3):
        g = perturbed_lift(f, level, rng)
        assert delta(beta, g).congruent(delta(beta))


def test_delta_is_logarithmic(carlitz_q2):
    level = carlitz_q2.level(2)
    b1 = level.generator() + 1
    b2 = level.generator()
    d = delta(b1 * b2)
    assert d.congruent(delta(b1).representative + delta(b2).representative)


def test_delta_of_embedded_prime(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    beta = level.constant(pi)
    lift = composed_lift(carlitz_q2.level(1).constant(pi), 2)
    # f = X² + πX, so f'(v_2)/π = 1 = η·δ_1(π)
    assert delta(beta, lift).congruent(level.one())
    # the canonical lift X²((1 + π) + X) gives 1/(1 + π + v_2) instead
    assert not delta(beta).congruent(level.one())


@pytest.mark.parametrize("n, m", [(1, 2), (2, 3)])
def test_delta_upward_through_composed_lift(carlitz_q2, n, m):
    level = carlitz_q2.level(n)
    for beta in (level.generator(), level.generator() * (level.generator() + 1), level.generator() + 1):
        upper = delta(embed(beta, m), composed_lift(beta, m))
        lower = embed(delta(beta).representative, m) * carlitz_q2.eta_power(m - n)
        assert upper.congruent(lower)


# -- pairing values ----------------------------------------------------------------------


def test_lift_to_multiplies_by_eta(carlitz_q2):
    value = PairingValue(carlitz_q2, 1, (1,))
    lifted = value.lift_to(2)
    assert lifted.coord == (0, 1)
    assert value.same_point(lifted)
    with pytest.raises(ValueError):
        lifted.lift_to(1)


def test_values_add_across_levels(carlitz_q2):
    total = PairingValue(carlitz_q2, 1, (1,)) + PairingValue(carlitz_q2, 2, (1, 0))
    assert total.n == 2
    assert total.coord == (1, 1)
    assert (total - total).is_zero()


def test_realization_of_unit_coordinate(carlitz_q2):
    value = PairingValue(carlitz_q2, 2, (1, 0))
    got = value.realization()
    assert got.equals(carlitz_q2.level(2).generator())[0]


# -- the explicit formula ----------------------------------------------------------------


def test_pairing_with_generator(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    alpha = _const(carlitz_q2, 2, pi**2)
    value = pairing_rhs(alpha, level.generator())
    assert value.n == 2
    assert value.coord == (1, 1)


@pytest.mark.parametrize("use_log", [True, False])
def test_pairing_log_free_agrees_above_bound(carlitz_q2, pi, use_log):
    level = carlitz_q2.level(2)
    alpha = _const(carlitz_q2, 2, pi**3)
    assert pairing_rhs(alpha, level.generator(), use_log=use_log).coord == (0, 1)


def test_pairing_of_zero(carlitz_q2):
    level = carlitz_q2.level(2)
    assert pairing_rhs(level.zero(), level.generator()).is_zero()


def test_pairing_rejects_small_alpha(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    with pytest.raises(ValuationTooSmall):
        pairing_rhs(level.generator(), level.generator())
    # π² clears the logarithm bound 2 but not the theorem bound 9/4
    with pytest.raises(ValuationTooSmall):
        pairing_rhs(_const(carlitz_q2, 2, pi**2), level.generator(), use_log=False)


def test_pairing_levels_must_match(carlitz_q2, pi):
    alpha = _const(carlitz_q2, 1, pi**3)
    with pytest.raises(ValueError):
        pairing_rhs(alpha, carlitz_q2.level(2).generator())


def test_pairing_vanishes_above_vanishing_bound(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    alpha = _const(carlitz_q2, 2, pi**4)
    assert pairing_rhs(alpha, level.generator()).is_zero()
    assert pairing_rhs(alpha, level.generator() + 1).is_zero()


def test_pairing_first_level_generator(carlitz_q2, pi):
    level = carlitz_q2.level(1)
    assert pairing_rhs(_const(carlitz_q2, 1, pi**3), level.generator()).is_zero()
    assert pairing_rhs(_const(carlitz_q2, 1, pi**2), level.generator()).coord == (1,)


def test_pairing_multiplicative_in_beta(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    alpha = _const(carlitz_q2, 2, pi**3)
    v = level.generator()
    b1, b2 = v, v + 1
    whole = pairing_rhs(alpha, b1 * b2)
    parts = pairing_rhs(alpha, b1) + pairing_rhs(alpha, b2)
    assert whole.same_point(parts)


@pytest.mark.parametrize("n", [1, 2])
def test_self_pairing_vanishes(carlitz_q2, pi, n):
    alpha = _const(carlitz_q2, n, pi**3)
    assert self_pairing(alpha).is_zero()


# -- the Galois side -------------------------------------------------------------------------


def test_artin_unit_matches_torsion_action(carlitz_q2):
    value = PairingValue(carlitz_q2, 2, (1, 0))
    moved = artin_unit_on_coord([1, 1], value)
    assert moved.coord == (1, 1)
    on_torsion = artin_unit_on_torsion([1, 1], value.realization())
    assert on_torsion.equals(moved.realization())[0]


def test_artin_identity_unit(carlitz_q2):
    value = PairingValue(carlitz_q2, 2, (0, 1))
    assert artin_unit_on_coord([1], value).coord == (0, 1)


def test_artin_rejects_non_unit(carlitz_q2):
    with pytest.raises(ValueError):
        artin_unit_on_coord([0, 1], PairingValue(carlitz_q2, 2, (1, 0)))


def test_kummer_below_threshold_refused(carlitz_q2, pi):
    alpha = _const(carlitz_q2, 1, pi**3)
    with pytest.raises(ThresholdNotMet):
        kummer_lhs_prime_case(alpha, 2)
    with pytest.raises(ValueError):
        kummer_lhs_prime_case(alpha, 1)


def test_kummer_value_matches_formula(carlitz_q2, pi):
    alpha = _const(carlitz_q2, 1, pi**2)
    result = kummer_lhs_prime_case(alpha, carlitz_q2.kummer_level(1))
    assert result.threshold_met and result.congruence_ok
    assert result.value is not None
    assert result.value.same_point(pairing_rhs(alpha, result.pi_n))


def test_conjugation_keeps_the_pairing(carlitz_q2, pi, field_q2):
    t = TwistedSeries(field_q2, [LaurentNum.one(field_q2), pi])  # 1 + πτ
    level = carlitz_q2.level(1)
    result = conjugated_pairing_check(t, _const(carlitz_q2, 1, pi**2), level.generator())
    assert result.agree
    # t(π²) = π² + π⁵ and π⁵ is past the vanishing bound
    assert result.original.coord == (1,)
    assert result.twisted.coord == (1,)


# -- compatibilities ---------------------------------------------------------------------


def test_generator_norm(carlitz_q2):
    got = generator_norm(carlitz_q2, 2, 1)
    assert got.equals(carlitz_q2.level(1).generator())[0]


def test_delta_trace_identity(carlitz_q2):
    holds, _ = delta_trace_identity(carlitz_q2.level(2).generator(), 1)
    assert holds


@pytest.mark.parametrize("power", [2, 3])
def test_level_shift(carlitz_q2, pi, power):
    alpha = _const(carlitz_q2, 1, pi**power)
    result = level_shift_check(alpha, carlitz_q2.level(2).generator())
    assert result.agree
    assert result.trace_identity is True
    if power == 2:
        assert result.lower.coord == (1,)
        assert result.upper.coord == (0, 1)


def test_level_shift_of_zero(carlitz_q2):
    result = level_shift_check(carlitz_q2.level(1).zero(), carlitz_q2.level(2).generator())
    assert result.upper.is_zero() and result.lower.is_zero()
    assert result.agree


@pytest.mark.parametrize(
    "mu, expected",
    [(Fraction(3), Fraction(-1)), (Fraction(3, 2), Fraction(0)), (Fraction(1, 2), Fraction(2))],
)
def test_majoration_constant(carlitz_q2, mu, expected):
    assert majoration_constant(carlitz_q2, mu, 1) == expected


def test_majoration_constant_needs_maximal_ideal(carlitz_q2):
    with pytest.raises(ValuationTooSmall):
        majoration_constant(carlitz_q2, Fraction(0), 1)


def test_majoration_report(carlitz_q2, pi):
    report = majoration_report(_const(carlitz_q2, 1, pi**3))
    assert report.constant == -1
    assert report.within_bounds
    assert [m for m, _, _ in report.orbit] == [1, 2, 3]
    assert all(ok for _, _, ok in report.orbit)


def test_iwasawa_first_level(carlitz_q2):
    level = carlitz_q2.level(1)
    result = iwasawa_functional(level.generator(), random.Random(3), fresh=4)
    assert result.lattice_shift == 2
    assert result.z == [(1,)]
    assert result.residual_failures == 0
    assert result.matches_delta
