import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinfeld_reciprocity.errors import Divergent, NotInvertible, NotPreparable
from drinfeld_reciprocity.laurent import LaurentNum
from drinfeld_reciprocity.residue import field_spec
from drinfeld_reciprocity.twisted import TwistedSeries, tw_evaluate, tw_invert, tw_mul, weierstrass_prep

F2 = field_spec(2, 1, 1, 32)
PI = LaurentNum.pi_power(F2)
ONE = LaurentNum.one(F2)


def tw(*coeffs):
    return TwistedSeries(F2, list(coeffs))


def test_square_of_carlitz():
    rho = tw(PI, ONE)
    sq = tw_mul(rho, rho)
    assert sq.degree() == 2
    assert sq.coeff(0) == PI * PI
    assert sq.coeff(1) == PI + PI * PI
    assert sq.coeff(2) == ONE


def test_identity_is_neutral():
    f = tw(PI, ONE, PI)
    assert tw_mul(f, TwistedSeries.identity(F2)).equals(f)[0]
    assert tw_mul(TwistedSeries.identity(F2), f).equals(f)[0]


def test_unit_inverse_of_one_plus_pi_tau():
    f = tw(ONE, PI)
    g = tw_invert(f, "unit", trunc=4)
    assert g.coeff(1) == PI
    assert g.coeff(2) == LaurentNum.pi_power(F2, 3)
    assert tw_mul(f, g).equals(TwistedSeries.identity(F2))[0]
    assert tw_mul(g, f).equals(TwistedSeries.identity(F2))[0]


def test_compositional_inverse():
    ident = TwistedSeries.identity(F2)
    assert tw_invert(ident, "compositional").equals(ident)[0]
    g = tw_invert(tw(PI, ONE), "compositional", trunc=4)
    assert g.D() == LaurentNum(F2, -1, [1])


def test_unit_inverse_needs_unit_constant():
    with pytest.raises(NotInvertible):
        tw_invert(tw(PI, ONE), "unit", trunc=4)
    with pytest.raises(NotInvertible):
        tw_invert(tw(LaurentNum.zero(F2), ONE), "compositional", trunc=4)


def test_weierstrass_of_carlitz_is_trivial():
    rho = tw(PI, ONE)
    u, P = weierstrass_prep(rho, trunc=8)
    assert P.equals(rho)[0]
    assert u.equals(TwistedSeries.identity(F2))[0]

    rho2 = tw_mul(rho, rho)
    u2, P2 = weierstrass_prep(rho2, trunc=8)
    assert P2.degree() == 2
    assert P2.equals(rho2)[0]


def test_weierstrass_of_twisted_module():
    f = tw(PI, ONE + PI)
    u, P = weierstrass_prep(f, trunc=8)
    assert P.degree() == 1
    assert P.coeff(1) == ONE
    assert P.coeff(0).valuation() >= 1
    assert u.D().is_unit()
    assert tw_mul(u, P).equals(f.truncate_tau(8))[0]


def test_weierstrass_needs_nonzero_reduction():
    with pytest.raises(NotPreparable):
        weierstrass_prep(tw(PI, PI), trunc=4)


def test_evaluate_carlitz_at_its_torsion_point():
    assert tw_evaluate(tw(PI, ONE), PI).is_zero()


def test_evaluate_identity():
    x = LaurentNum(F2, 2, [1, 1, 0, 1])
    assert tw_evaluate(TwistedSeries.identity(F2), x) == x


def test_truncated_series_diverges_at_units():
    series = TwistedSeries(F2, [ONE, ONE], 6)
    with pytest.raises(Divergent):
        tw_evaluate(series, ONE)


small_coeffs = st.lists(st.integers(0, 1), min_size=0, max_size=3)


def _series(rows):
    return TwistedSeries(F2, [LaurentNum(F2, 0, r) for r in rows])


@settings(max_examples=30, deadline=None)
@given(
    st.lists(small_coeffs, min_size=1, max_size=2),
    st.lists(small_coeffs, min_size=1, max_size=2),
    st.lists(small_coeffs, min_size=1, max_size=2),
)
def test_twisted_multiplication_is_associative(a, b, c):
    f, g, h = _series(a), _series(b), _series(c)
    assert tw_mul(tw_mul(f, g), h).equals(tw_mul(f, tw_mul(g, h)))[0]
