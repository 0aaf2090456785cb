import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinfeld_reciprocity.errors import InvalidModule
from drinfeld_reciprocity.residue import FieldSpec, field_spec, is_irreducible, next_irreducible


def test_prime_field_tables():
    fs = field_spec(3)
    assert fs.order == 3
    assert fs.add[2][2] == 1
    assert fs.mul[2][2] == 1
    assert fs.inv[2] == 2
    assert fs.base is fs


def test_first_irreducible_modulus():
    assert next_irreducible(2, 2) == (1, 1, 1)
    assert is_irreducible(2, (1, 1, 1))
    assert not is_irreducible(2, (1, 0, 1))


def test_create_runs_axiom_checks():
    fs = FieldSpec.create(2, 1, 2, seed=7)
    assert fs.order == 4
    assert fs.q == 2
    assert fs.base.order == 2
    frob = fs.frob_table(1)
    for x in fs.base_elements:
        assert frob[x] == x


@pytest.mark.parametrize(
    "args",
    [
        {"p": 4},
        {"p": 2, "k": 0},
        {"p": 2, "k": 1, "d": 2, "modulus": (1, 0, 1)},
        {"p": 2, "k": 10},
    ],
)
def test_invalid_fields(args):
    with pytest.raises(InvalidModule):
        FieldSpec(**args)


def test_trace_and_norm_to_base():
    # ω = X mod X²+X+1: ω + ω² = 1 and ω·ω² = 1
    fs = field_spec(2, 1, 2)
    omega = 2
    assert fs.trace_to_base(omega) == 1
    assert fs.norm_to_base(omega) == 1
    assert fs.trace_to_base(fs.embed[1]) == 0


def test_coords_over_base_cover_field():
    fs = field_spec(3, 1, 2)
    coords = {fs.coords_over_base(x) for x in range(fs.order)}
    assert len(coords) == fs.order


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_gf9_distributive(a, b, c):
    fs = field_spec(3, 1, 2)
    add, mul = fs.add, fs.mul
    assert mul[a][add[b][c]] == add[mul[a][b]][mul[a][c]]


def test_check_axioms_passes_for_larger_field():
    field_spec(2, 2, 2).check_axioms(random.Random(1))
