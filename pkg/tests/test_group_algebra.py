from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fillvol.errors import DomainError
from fillvol.group_algebra import (
    GroupRingElement,
    apply_module_map,
    gr_scale,
    gr_translate,
    l1_norm,
    operator_weighted_bound,
    vector_weighted_norm,
    weighted_norm,
)
from fillvol.group_model import CyclicGroup, FreeAbelianGroup
from fillvol.normed_ring import parse_ring_shorthand

ZR = parse_ring_shorthand("Z")
Z2 = FreeAbelianGroup(2)
points = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
elements = st.dictionaries(points, st.integers(-3, 3), max_size=4).map(lambda d: GroupRingElement(ZR, Z2, d))


@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert (a - a).is_zero()


@given(elements, elements)
def test_norms_submultiplicative(a, b):
    assert l1_norm(a * b) <= l1_norm(a) * l1_norm(b)
    assert l1_norm(a + b) <= l1_norm(a) + l1_norm(b)
    assert weighted_norm(a * b) <= weighted_norm(a) * weighted_norm(b)


@given(elements, points)
def test_translation(a, g):
    t = gr_translate(g, a)
    assert l1_norm(t) == l1_norm(a)
    assert weighted_norm(t) <= (1 + Z2.word_length(g)) * weighted_norm(a)


def test_zeros_dropped_and_from_terms():
    a = GroupRingElement.from_terms(ZR, Z2, [((0, 0), 1), ((0, 0), -1), ((1, 0), 2)])
    assert a.items() == [((1, 0), 2)]
    assert weighted_norm(a) == 4


def test_mismatched_carriers():
    a = GroupRingElement(ZR, Z2, {(0, 0): 1})
    b = GroupRingElement(ZR, CyclicGroup(3), {0: 1})
    with pytest.raises(DomainError):
        a + b


def test_scalar_and_module_map():
    F3 = parse_ring_shorthand("F3")
    G = CyclicGroup(3)
    one = GroupRingElement(F3, G, {0: 1})
    t = GroupRingElement(F3, G, {1: 1})
    assert gr_scale(2, t).coeffs == {1: 2}
    # f(b) = (1 - t) in rank 1
    f = [[one - t]]
    x = [t]
    assert apply_module_map(f, x, 1, F3, G)[0] == t - t * t
    assert operator_weighted_bound(f) == vector_weighted_norm(f[0]) == 3
