import random
from fractions import Fraction

import pytest

from drinfeld_reciprocity.laurent import LaurentNum
from drinfeld_reciprocity.tower import (
    TowerElem,
    XSeries,
    additive_series,
    compose,
    composed_lift,
    different_generator,
    embed,
    galois_conjugate,
    lift_to_series,
    perturbed_lift,
    pull_back,
    tower_norm,
    tower_trace,
    tower_valuation,
)
from drinfeld_reciprocity.errors import PrecisionExhausted, ZeroToPrecision
from drinfeld_reciprocity.twisted import TwistedSeries


def test_first_level_q2(carlitz_q2, pi):
    level = carlitz_q2.level(1)
    assert level.e == 1
    g = level.g_poly()
    assert g[0] == pi and g[1] == 1
    assert level.generator().coords[0] == pi


def test_second_level_q2(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    assert level.e == 2
    g = level.g_poly()
    assert g[0] == pi and g[1] == pi and g[2] == 1


def test_first_level_q3(carlitz_q3):
    level = carlitz_q3.level(1)
    pi = LaurentNum.pi_power(carlitz_q3.field)
    g = level.g_poly()
    assert level.e == 2
    assert g[0] == pi and g[1] == 0 and g[2] == 1


@pytest.mark.parametrize("n, degree, diff", [(1, 1, 0), (2, 2, 1), (3, 4, 2)])
def test_different_valuations_q2(carlitz_q2, n, degree, diff):
    level = carlitz_q2.level(n)
    assert level.e == degree
    _, val = different_generator(level)
    assert val == diff


def test_different_q3(carlitz_q3):
    _, val = different_generator(carlitz_q3.level(1))
    assert val == Fraction(1, 2)


def test_generator_valuations(carlitz_q2):
    level = carlitz_q2.level(2)
    v = level.generator()
    assert tower_valuation(v) == Fraction(1, 2)
    assert tower_valuation(v * v) == 1
    assert tower_valuation(level.constant(LaurentNum.pi_power(carlitz_q2.field))) == 1


def test_zero_has_no_valuation(carlitz_q2):
    with pytest.raises(ZeroToPrecision):
        tower_valuation(carlitz_q2.level(2).zero())


def test_norm_and_trace_at_level_two(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    v = level.generator()
    assert tower_norm(v, "H") == pi
    assert tower_norm(v, "K") == pi
    assert tower_norm(level.one(), "K") == 1
    x = TowerElem(level, [1 + pi, LaurentNum.one(pi.field)])
    assert tower_trace(x, "K") == pi
    assert tower_norm(v * v, "H").valuation() == 2


def test_trace_of_one_is_degree(carlitz_q3):
    level = carlitz_q3.level(1)
    assert tower_trace(level.one(), "H") == 2


def test_embed_first_generator(carlitz_q2, pi):
    image = embed(carlitz_q2.level(1).generator(), 2)
    assert image.equals(carlitz_q2.level(2).constant(pi))[0]


def test_embed_constants(carlitz_q2, pi):
    c = pi + pi * pi
    image = embed(carlitz_q2.level(1).constant(c), 3)
    assert image.equals(carlitz_q2.level(3).constant(c))[0]


def test_pull_back_inverts_embed(carlitz_q2):
    level1 = carlitz_q2.level(1)
    x = level1.generator() * 3 + level1.one()
    assert pull_back(embed(x, 2), 1).equals(x)[0]


def test_relative_norm_and_trace(carlitz_q2):
    v1 = carlitz_q2.level(1).generator()
    v2 = carlitz_q2.level(2).generator()
    assert tower_norm(v2, 1).equals(v1)[0]
    assert tower_trace(v2, 1).equals(v1)[0]


def test_norm_is_multiplicative(carlitz_q2):
    rng = random.Random(3)
    level = carlitz_q2.level(2)
    x = level.random_integral(rng, unit=True)
    y = level.random_element(rng, 1)
    assert (tower_norm(x * y, "H") - tower_norm(x, "H") * tower_norm(y, "H")).is_zero()


def test_galois_conjugate_by_one_is_identity(carlitz_q2):
    level = carlitz_q2.level(2)
    x = level.generator() + level.one()
    assert galois_conjugate(x, [1, 0]).equals(x)[0]


def test_lifts(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    assert lift_to_series(level.generator()).shift == 1
    assert lift_to_series(level.one()).shift == 0
    f = lift_to_series(level.constant(pi))
    assert f.shift == 2
    assert f.evaluate(level).equals(level.constant(pi))[0]


def test_perturbed_lift_has_same_value(carlitz_q2):
    level = carlitz_q2.level(2)
    beta = level.generator() + level.one()
    f = lift_to_series(beta)
    g = perturbed_lift(f, level, random.Random(5))
    assert g.evaluate(level).equals(beta)[0]


def test_composed_lift_of_prime(carlitz_q2, pi):
    # π = v_1 lifts to X at level 1, so to ρ_π(X) = X² + πX at level 2
    f = composed_lift(carlitz_q2.level(1).constant(pi), 2)
    assert f.shift == 1
    assert f.coeff(1) == pi and f.coeff(2) == 1
    assert f.coeff(3) == 0
    level = carlitz_q2.level(2)
    assert f.evaluate(level).equals(level.constant(pi))[0]


@pytest.mark.parametrize("n, m", [(1, 2), (1, 3), (2, 3)])
def test_composed_lift_values(carlitz_q2, n, m):
    level = carlitz_q2.level(n)
    beta = level.generator() * (level.one() + level.generator())
    f = composed_lift(beta, m)
    assert not f.is_exact()
    assert f.evaluate(carlitz_q2.level(m)).equals(embed(beta, m))[0]


def test_composed_lift_stays_on_its_level(carlitz_q2):
    level = carlitz_q2.level(2)
    beta = level.generator()
    assert composed_lift(beta, 2).shift == 1
    with pytest.raises(ValueError):
        composed_lift(beta, 1)


def test_additive_series_of_polynomial(field_q2, pi):
    one = LaurentNum.one(field_q2)
    series = additive_series(TwistedSeries(field_q2, [pi, one]), 8)
    assert series.is_exact()
    assert (series.shift, len(series.coeffs)) == (1, 2)
    assert series.coeff(1) == pi and series.coeff(2) == 1


def test_additive_series_of_truncated_series(carlitz_q2):
    series = additive_series(carlitz_q2.rho_pi, 10)
    assert series.order == 10
    with pytest.raises(PrecisionExhausted):
        series.coeff(10)


def test_series_inverse(field_q2):
    one = LaurentNum.one(field_q2)
    f = XSeries(field_q2, 1, [one, one])  # X + X²
    inv = f.inverse(6)
    assert (inv.shift, inv.order) == (-1, 6)
    prod = f * inv
    assert prod.order == 7
    assert [prod.coeff(k) == (1 if k == 0 else 0) for k in range(7)] == [True] * 7


def test_compose_tracks_order(field_q2, pi):
    one = LaurentNum.one(field_q2)
    inner = XSeries(field_q2, 1, [pi, one], order=5)  # πX + X² + O(X⁵)
    outer = XSeries(field_q2, 0, [one, one, one])  # 1 + X + X²
    got = compose(outer, inner)
    assert got.order == 5
    # 1 + (πX + X²) + (π²X² + X⁴)
    expected = [one, pi, one + pi * pi, LaurentNum.zero(field_q2), one]
    assert [got.coeff(k) == expected[k] for k in range(5)] == [True] * 5
    with pytest.raises(PrecisionExhausted):
        got.coeff(5)


def test_level_description(carlitz_q2):
    data = carlitz_q2.level(2).to_json()
    assert data["n"] == 2
    assert data["degree"] == 2
    assert data["v_valuation"] == "1/2"
    assert data["different_valuation"] == "1"
