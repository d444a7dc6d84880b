from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from fillvol.chain_complex import (
    BUILTINS,
    Cell,
    builtin_complex,
    commutator_cycle,
    complex_from_spec,
    load_complex,
    save_complex,
)
from fillvol.errors import BoundarySquareError, DanglingBasisError, DegreeError, DomainError, SchemaError

FIXTURES = Path(__file__).parent / "fixtures"

BUILTIN_PARAMS = {
    "cyclic": {"k": 5, "n": 4},
    "cayley-cyclic": {"k": 4},
    "cayley-free-abelian": {"n": 2},
    "cyclic-presentation": {"k": 4},
    "z2": {},
    "z6-two-generator": {},
    "tripod": {},
}


@pytest.mark.parametrize("name", sorted(BUILTINS))
@pytest.mark.parametrize("ring", ["Z", "F2", "Q", "Z/4"])
def test_builtins_satisfy_d_squared(name, ring):
    cx = builtin_complex(name, ring=ring, **BUILTIN_PARAMS[name])
    cx.verify_d_squared()


def test_corrupted_fixture_rejected():
    with pytest.raises(BoundarySquareError) as info:
        load_complex(FIXTURES / "corrupted_cyclic3.json")
    assert "b2" in str(info.value.cell)


def test_fixture_round_trip(tmp_path):
    cx = load_complex(FIXTURES / "cyclic3_f2.json")
    assert cx == builtin_complex("cyclic", k=3, n=2, ring="F2")
    save_complex(cx, tmp_path / "out.json")
    assert load_complex(tmp_path / "out.json") == cx


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_spec_round_trip(name):
    cx = builtin_complex(name, **BUILTIN_PARAMS[name])
    assert complex_from_spec(json.loads(json.dumps(cx.to_spec()))) == cx


def test_schema_errors():
    spec = builtin_complex("cyclic", k=3).to_spec()
    bad = json.loads(json.dumps(spec))
    bad["degrees"][1]["boundary"]["b1"][0][1] = "nope"
    with pytest.raises(DanglingBasisError):
        complex_from_spec(bad)
    with pytest.raises(SchemaError):
        complex_from_spec({"ring": {"kind": "integers"}})
    with pytest.raises(DomainError):
        builtin_complex("cyclic", k=3, bogus=1)
    with pytest.raises(DomainError):
        builtin_complex("klein-bottle")



def test_z2_boundary_of_face(z2):
    f = z2.basis_chain(z2.cell(2, "f"))
    assert z2.format_chain(z2.boundary(f)) == "1*e_x + -1*e_x@2 + -1*e_y + 1*e_y@1"
    assert z2.boundary(f) == commutator_cycle(1, z2)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_commutator_cycle_norm(z2, n):
    c = commutator_cycle(n, z2)
    assert z2.norm(c) == 4 * n
    assert z2.is_cycle(c)


def test_commutator_cycle_needs_z2(z7):
    with pytest.raises(DomainError):
        commutator_cycle(1, z7)
    with pytest.raises(DomainError):
        commutator_cycle(0, builtin_complex("z2"))


def test_boundary_degree_zero(z7):
    with pytest.raises(DegreeError):
        z7.boundary(z7.basis_chain(z7.cell(0, "b0")))


def test_cell_parsing(z2):
    cell = z2.parse_cell(1, "e_y@1,1")
    assert cell == Cell(1, 1, (2, 0))
    assert z2.format_cell(cell) == "e_y@1,1"
    with pytest.raises(DomainError):
        z2.parse_cell(1, "e_y@a")


def test_chain_json_round_trip(z2q):
    from fractions import Fraction

    c = commutator_cycle(2, z2q, Fraction(1, 2))
    assert z2q.chain_from_json(json.loads(json.dumps(z2q.chain_to_json(c)))) == c


z2_points = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
z2_chains = st.lists(st.tuples(st.sampled_from([0]), z2_points, st.integers(-3, 3)), max_size=6)


@given(z2_chains, z2_points)
def test_boundary_is_equivariant_and_squares_to_zero(terms, g):
    cx = builtin_complex("z2")
    c = cx.chain(2, [(Cell(2, b, h), a) for b, h, a in terms])
    d = cx.boundary(c)
    assert cx.boundary(d).is_zero()
    assert cx.boundary(cx.translate(g, c)) == cx.translate(g, d)
    assert cx.norm(d) <= 4 * cx.norm(c)


def test_chain_arithmetic(z7):
    a = z7.basis_chain(z7.cell(1, "b1", 2))
    b = z7.basis_chain(z7.cell(1, "b1", 3))
    s = z7.add(a, b)
    assert len(s) == 2
    assert z7.sub(s, b) == a
    assert z7.scale(3, a)[z7.cell(1, "b1", 2)] == 3
    assert z7.neg(a)[z7.cell(1, "b1", 2)] == -1
    assert z7.weighted_norm(a) == 3
