import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinfeld_reciprocity.errors import DivisionByZeroToPrecision, PrecisionExhausted
from drinfeld_reciprocity.laurent import (
    LaurentNum,
    laurent_arith,
    residue_norm_to_K,
    residue_trace_to_K,
)
from drinfeld_reciprocity.residue import field_spec

F2 = field_spec(2, 1, 1, 32)
F4 = field_spec(2, 1, 2)

digit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=8).filter(lambda ds: ds[0] == 1)


def test_characteristic_two_cancellation():
    pi = LaurentNum.pi_power(F2)
    assert (pi + pi).is_zero()


def test_inverse_of_pi_plus_pi_squared():
    x = LaurentNum(F2, 1, [1, 1])
    y = x.inverse()
    assert y.valuation() == -1
    assert y.digits(5, start=-1) == [1] * 6
    assert x * y == 1


def test_valuation_is_additive():
    x = LaurentNum.pi_power(F2, 3) * LaurentNum(F2, 0, [1, 1])
    assert x.valuation() == 3


def test_division_by_zero():
    with pytest.raises(DivisionByZeroToPrecision):
        LaurentNum.one(F2) / LaurentNum.zero(F2, 5)


def test_digits_beyond_precision():
    x = LaurentNum(F2, 0, [1, 1], 4)
    with pytest.raises(PrecisionExhausted):
        x.digits(6)


def test_precision_of_products():
    x = LaurentNum(F2, 1, [1], 5)
    y = LaurentNum(F2, 2, [1, 1])
    assert (x * y).precision() == 7
    assert (x + y).precision() == 5


def test_frobenius_squares_in_characteristic_two():
    x = LaurentNum(F2, 1, [1, 1])
    assert x.frobenius() == LaurentNum(F2, 2, [1, 0, 1])
    assert x.frobenius() == x * x


def test_residue_trace_of_omega_pi():
    omega_pi = LaurentNum(F4, 1, [2])
    assert residue_trace_to_K(omega_pi) == LaurentNum.pi_power(F2)


def test_residue_trace_is_identity_on_base():
    x = LaurentNum(F2, -1, [1, 0, 1])
    assert residue_trace_to_K(x) == x


def test_residue_norm_of_omega():
    assert residue_norm_to_K(LaurentNum.constant(F4, 2)) == LaurentNum.one(F2)


def test_laurent_arith_dispatch():
    a = LaurentNum(F2, 0, [1, 1])
    b = LaurentNum(F2, 1, [1])
    assert laurent_arith(a, b, "add") == LaurentNum(F2, 0, [1])
    assert laurent_arith(a, b, "div") * b == a
    with pytest.raises(ValueError):
        laurent_arith(a, b, "pow")


@settings(max_examples=50, deadline=None)
@given(digit_lists, digit_lists, st.integers(-3, 3), st.integers(-3, 3))
def test_valuation_of_products(da, db, va, vb):
    a = LaurentNum(F2, va, da)
    b = LaurentNum(F2, vb, db)
    assert (a * b).valuation() == va + vb


@settings(max_examples=50, deadline=None)
@given(digit_lists, st.integers(-3, 3))
def test_inverse_times_self_is_one(ds, v):
    a = LaurentNum(F2, v, ds)
    assert a * a.inverse() == 1
