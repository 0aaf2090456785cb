from fractions import Fraction

import pytest

from drinfeld_reciprocity.drinfeld import (
    coleman_norm,
    conjugate_module,
    torsion_action,
    torsion_dlog,
    unit_part_r,
    validate_module,
)
from drinfeld_reciprocity.errors import InvalidModule, NotTorsion
from drinfeld_reciprocity.laurent import LaurentNum
from drinfeld_reciprocity.residue import field_spec
from drinfeld_reciprocity.tower import XSeries, additive_series, compose, embed, tower_norm
from drinfeld_reciprocity.twisted import TwistedSeries, tw_mul

F2 = field_spec(2, 1, 1, 32)
PI = LaurentNum.pi_power(F2)
ONE = LaurentNum.one(F2)


def identity_like(f):
    return f.equals(TwistedSeries.identity(f.field))[0]


def test_carlitz_is_valid(carlitz_q2, carlitz_q3):
    for module in (carlitz_q2, carlitz_q3):
        assert module.ht_reduction == 1
        assert module.theorem_condition


def test_twisted_module_is_valid(twisted_q2):
    assert twisted_q2.ht_reduction == 1
    assert twisted_q2.theorem_condition


@pytest.mark.parametrize(
    "coeffs, m0",
    [
        ([PI], 1),  # no τ term
        ([PI * PI, ONE], 1),  # D(ρ_π) ≠ π
        ([PI, PI, ONE], 1),  # reduction of height 2
        ([PI, LaurentNum(F2, -1, [1])], 1),  # non-integral coefficient
        ([PI, ONE], 2),  # m0 does not divide [H:K]
    ],
)
def test_invalid_modules(coeffs, m0):
    with pytest.raises(InvalidModule):
        validate_module(TwistedSeries(F2, coeffs), m0)


def test_bounds_q2(carlitz_q2):
    assert carlitz_q2.theorem_bound(1) == 2
    assert carlitz_q2.theorem_bound(2) == Fraction(9, 4)
    assert carlitz_q2.log_bound() == 2
    assert carlitz_q2.vanishing_bound(2) == 3
    assert carlitz_q2.kummer_threshold(1) == 5
    assert carlitz_q2.kummer_level(1) == 5


def test_bounds_q3(carlitz_q3):
    assert carlitz_q3.theorem_bound(1) == 1
    assert carlitz_q3.log_bound() == 1


def test_rho_of_pi_squared(carlitz_q2):
    rho = carlitz_q2.rho_of(LaurentNum.pi_power(F2, 2))
    assert rho.equals(tw_mul(carlitz_q2.rho_pi, carlitz_q2.rho_pi))[0]
    assert rho.coeff(1) == PI + PI * PI


def test_rho_of_one_and_constants(carlitz_q3):
    field = carlitz_q3.field
    assert identity_like(carlitz_q3.rho_of(LaurentNum.one(field)))
    two = carlitz_q3.rho_of(LaurentNum.constant(field, 2))
    assert two.equals(TwistedSeries.constant(field, LaurentNum.constant(field, 2)))[0]


def test_root_polynomial_of_carlitz(carlitz_q2):
    xpoly = carlitz_q2.root_xpoly(1)
    assert len(xpoly) == 3
    assert xpoly[0] == 0
    assert xpoly[1] == PI
    assert xpoly[2] == ONE


def test_log_coefficient_recursion(carlitz_q2):
    c1 = carlitz_q2.logarithm().coeff(1)
    assert c1.valuation() == -1
    assert c1 * (PI + PI * PI) == 1


def test_log_and_exp_are_inverse(carlitz_q2):
    lam, exp = carlitz_q2.logarithm(), carlitz_q2.exponential()
    assert identity_like(tw_mul(lam, exp).truncate_tau(8))
    assert identity_like(tw_mul(exp, lam).truncate_tau(8))


def test_log_linearizes_pi(twisted_q2):
    lam = twisted_q2.logarithm()
    lhs = tw_mul(lam, twisted_q2.rho_pi).truncate_tau(8)
    rhs = lam.scale(twisted_q2.pi).truncate_tau(8)
    assert lhs.equals(rhs)[0]


def test_log_keeps_valuation(carlitz_q2):
    value = carlitz_q2.log_at(LaurentNum.pi_power(F2, 3))
    assert value.valuation() == 3


def test_r_is_one_for_carlitz(carlitz_q2):
    assert identity_like(unit_part_r(carlitz_q2, 1))
    assert identity_like(unit_part_r(carlitz_q2, 2))


def test_torsion_action_chain(carlitz_q2):
    level2 = carlitz_q2.level(2)
    v2 = level2.generator()
    image = torsion_action(carlitz_q2, carlitz_q2.eta, v2)
    assert image.equals(embed(carlitz_q2.level(1).generator(), 2))[0]
    assert torsion_action(carlitz_q2, carlitz_q2.eta_power(2), v2).is_zero()


def test_torsion_action_rejects_non_torsion(carlitz_q2):
    level2 = carlitz_q2.level(2)
    with pytest.raises(NotTorsion):
        torsion_action(carlitz_q2, [1, 0], level2.one())


def test_act_kills_first_torsion_point(carlitz_q2):
    assert carlitz_q2.act(PI, carlitz_q2.level(1).generator()).is_zero()


@pytest.mark.parametrize("digits", [[1, 0], [0, 0], [1, 1], [0, 1]])
def test_torsion_dlog_inverts_action(carlitz_q2, digits):
    v2 = carlitz_q2.level(2).generator()
    w = torsion_action(carlitz_q2, digits, v2)
    assert torsion_dlog(carlitz_q2, w) == digits


def test_conjugate_by_scalar_keeps_carlitz(carlitz_q3):
    field = carlitz_q3.field
    t = TwistedSeries.constant(field, LaurentNum.constant(field, 2))
    twisted = conjugate_module(carlitz_q3, t)
    # 2^{-1}·(π + τ)·2 = π + 2^{q-1}τ = π + τ over 𝔽_3
    assert twisted.rho_pi.equals(carlitz_q3.rho_pi)[0]


def test_coleman_norm_of_linear_series(carlitz_q2):
    f = XSeries(F2, 0, [ONE, ONE])  # 1 + X
    out = coleman_norm(carlitz_q2, f)
    assert out.shift == 0
    assert out.coeff(0) == ONE + PI
    assert out.coeff(1) == ONE


def test_coleman_norm_of_constant(carlitz_q2):
    c = LaurentNum(F2, 0, [1, 1])
    out = coleman_norm(carlitz_q2, XSeries(F2, 0, [c]))
    assert out.coeff(0) == c * c


def test_coleman_norm_of_x(carlitz_q2):
    out = coleman_norm(carlitz_q2, XSeries(F2, 1, [ONE]))
    assert out.shift == 1
    assert out.coeff(1) == ONE


# -- Coleman norm contract ---------------------------------------------------------------

Q2_MODULES = ["carlitz_q2", "twisted_q2", "twisted_tau_q2"]


def _shapes(field):
    one = LaurentNum.one(field)
    pi = LaurentNum.pi_power(field)
    return {
        "1+X": XSeries(field, 0, [one, one]),
        "X+pi*X^2+X^3": XSeries(field, 1, [one, pi, one]),
        "(1+pi)+X^2": XSeries(field, 0, [one + pi, LaurentNum.zero(field), one]),
    }


def _shifted(f, c):
    """f(X + c) for f without negative powers."""
    field = f.field
    x_plus_c = XSeries(field, 0, [c, LaurentNum.one(field)])
    acc = XSeries(field, 0, [])
    for k in range(f.shift + len(f.coeffs) - 1, -1, -1):
        acc = acc * x_plus_c + XSeries.constant(field, f.coeff(k))
    return acc


def _agree(a, b):
    orders = [s.order for s in (a, b) if s.order is not None]
    top = min(orders) if orders else max(a.shift + len(a.coeffs), b.shift + len(b.coeffs))
    lo = min(a.shift, b.shift)
    return all(a.coeff(k).equals(b.coeff(k))[0] for k in range(lo, top))


def test_r1_has_tau_terms(twisted_tau_q2):
    r1 = unit_part_r(twisted_tau_q2, 1)
    assert not r1.coeff(1).is_zero()
    assert twisted_tau_q2.theorem_condition


def test_coleman_norm_through_tau_terms(twisted_tau_q2):
    field = twisted_tau_q2.field
    out = coleman_norm(twisted_tau_q2, XSeries(field, 1, [LaurentNum.one(field)]))
    assert not out.is_exact()
    assert out.order == 2 * field.working_prec
    # Ñ(X) = r_1(X)
    r1 = unit_part_r(twisted_tau_q2, 1)
    assert out.coeff(1) == r1.coeff(0)
    assert out.coeff(2) == r1.coeff(1)
    assert out.coeff(3) == 0


@pytest.mark.parametrize("module_name", Q2_MODULES)
@pytest.mark.parametrize("shape", ["1+X", "X+pi*X^2+X^3", "(1+pi)+X^2"])
def test_coleman_norm_composed_with_rho_eta(request, module_name, shape):
    module = request.getfixturevalue(module_name)
    f = _shapes(module.field)[shape]
    rho_eta = additive_series(module.rho_eta(), 24)
    lhs = compose(coleman_norm(module, f), rho_eta)
    # W¹ = {0, v_1} at q = 2
    v1 = module.level(1).generator().coords[0]
    assert _agree(lhs, f * _shifted(f, v1))


@pytest.mark.parametrize("module_name", Q2_MODULES)
def test_coleman_norm_is_the_relative_norm(request, module_name):
    module = request.getfixturevalue(module_name)
    for f in _shapes(module.field).values():
        got = coleman_norm(module, f).evaluate(module.level(1))
        assert got.equals(tower_norm(f.evaluate(module.level(2)), 1))[0]


@pytest.mark.parametrize("module_name", Q2_MODULES)
def test_coleman_norm_is_multiplicative(request, module_name):
    module = request.getfixturevalue(module_name)
    shapes = _shapes(module.field)
    f, g = shapes["1+X"], shapes["X+pi*X^2+X^3"]
    whole = coleman_norm(module, f * g)
    assert _agree(whole, coleman_norm(module, f) * coleman_norm(module, g))


def test_coleman_norm_of_inverse_power(carlitz_q2):
    x_inv = XSeries(F2, -1, [ONE])
    out = coleman_norm(carlitz_q2, x_inv)
    assert out.is_exact()
    assert _agree(out * coleman_norm(carlitz_q2, XSeries(F2, 1, [ONE])), XSeries.constant(F2, ONE))
