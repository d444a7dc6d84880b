"""The group ring R[Gamma] with its l1 and word-weighted norms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError
from .group_model import Group
from .normed_ring import NormedRing


@dataclass(frozen=True, eq=False)
class GroupRingElement:
    """A finite sum of ring multiples of group elements; zeros are never stored."""

    ring: NormedRing
    group: Group
    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        R = self.ring.ring
        clean = {}
        for g, a in self.coeffs.items():
            a = R.coerce(a)
            if not R.is_zero(a):
                clean[self.group.coerce(g)] = a
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def from_terms(cls, ring: NormedRing, group: Group, terms: Iterable[tuple]) -> "GroupRingElement":
        R = ring.ring
        acc: dict = {}
        for g, a in terms:
            g = group.coerce(g)
            acc[g] = R.add(acc.get(g, R.zero), R.coerce(a))
        return cls(ring, group, acc)

    def items(self) -> list[tuple]:
        return sorted(self.coeffs.items())

    def support(self) -> set:
        return set(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _same_carrier(self, other: "GroupRingElement") -> None:
        if self.ring != other.ring or self.group != other.group:
            raise DomainError("group ring elements live over different rings or groups")

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.ring == other.ring and self.group == other.group and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.items()))

    def __add__(self, other):
        return gr_add(self, other)

    def __neg__(self):
        return gr_scale(self.ring.ring.neg(self.ring.ring.one), self)

    def __sub__(self, other):
        return gr_add(self, -other)

    def __mul__(self, other):
        return gr_convolve(self, other)

    def __repr__(self):
        terms = " + ".join(f"{a}*{g}" for g, a in self.items()) or "0"
        return f"GroupRingElement({terms})"


def gr_add(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    a._same_carrier(b)
    R = a.ring.ring
    out = dict(a.coeffs)
    for g, v in b.coeffs.items():
        out[g] = R.add(out.get(g, R.zero), v)
    return GroupRingElement(a.ring, a.group, out)


def gr_scale(r, a: GroupRingElement) -> GroupRingElement:
    """Left multiplication by the scalar ``r``."""
    R = a.ring.ring
    r = R.coerce(r)
    return GroupRingElement(a.ring, a.group, {g: R.mul(r, v) for g, v in a.coeffs.items()})


def gr_convolve(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    a._same_carrier(b)
    R, G = a.ring.ring, a.group
    out: dict = {}
    for g, u in a.coeffs.items():
        for h, v in b.coeffs.items():
            k = G.multiply(g, h)
            out[k] = R.add(out.get(k, R.zero), R.mul(u, v))
    return GroupRingElement(a.ring, G, out)


def gr_translate(g, a: GroupRingElement) -> GroupRingElement:
    G = a.group
    return GroupRingElement(a.ring, G, {G.multiply(g, h): v for h, v in a.coeffs.items()})


def l1_norm(a: GroupRingElement) -> Fraction:
    return sum((a.ring.abs(v) for v in a.coeffs.values()), Fraction(0))


def weighted_norm(a: GroupRingElement) -> Fraction:
    """sum |a_g| (1 + l(g))."""
    G = a.group
    return sum((a.ring.abs(v) * (1 + G.word_length(g)) for g, v in a.coeffs.items()), Fraction(0))


# A map between free modules R[Gamma]^m -> R[Gamma]^k is given by the images
# of the m basis vectors, each a length-k sequence of group ring elements.
ModuleVector = Sequence[GroupRingElement]


def vector_weighted_norm(v: ModuleVector) -> Fraction:
    return sum((weighted_norm(c) for c in v), Fraction(0))


def vector_l1_norm(v: ModuleVector) -> Fraction:
    return sum((l1_norm(c) for c in v), Fraction(0))


def apply_module_map(images: Sequence[ModuleVector], x: ModuleVector, target_rank: int,
                     ring: NormedRing, group: Group) -> list[GroupRingElement]:
    """f(x) = sum_b x_b f(b) for an R[Gamma]-linear f given on the basis."""
    if len(x) != len(images):
        raise DomainError("source vector has the wrong rank")
    out = [GroupRingElement(ring, group, {}) for _ in range(target_rank)]
    for xb, fb in zip(x, images):
        if len(fb) != target_rank:
            raise DomainError("image vector has the wrong rank")
        for t in range(target_rank):
            out[t] = gr_add(out[t], gr_convolve(xb, fb[t]))
    return out


def operator_weighted_bound(images: Sequence[ModuleVector]) -> Fraction:
    """A constant C with ||f(x)||^Gamma <= C ||x||^Gamma for all x.

    Since ||g y||^Gamma <= (1 + l(g)) ||y||^Gamma and ||g b||^Gamma = 1 + l(g),
    the maximum over basis images works.  The result is floored at 1.
    """
    return max([Fraction(1)] + [vector_weighted_norm(v) for v in images])
