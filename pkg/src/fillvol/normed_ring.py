"""Coefficient rings and norms on them.

Ring elements are plain Python values: ``int`` for Z, Z/m, F_p and table
rings (index into the tables), ``Fraction`` for Q.  Norm values are always
``Fraction``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable

from .errors import DomainError, SchemaError, UnsupportedError

MAX_TABLE_RING = 64


def as_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except ValueError as exc:
            raise DomainError(f"not a rational: {value!r}") from exc
    raise DomainError(f"not a rational: {value!r}")


def fraction_to_json(q: Fraction) -> int | str:
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


class Ring:
    """Interface for commutative-or-not unital rings with 1 != 0."""

    kind = "ring"
    is_finite = False
    is_field = False

    @property
    def zero(self):
        raise NotImplementedError

    @property
    def one(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def coerce(self, x):
        raise NotImplementedError

    def inv(self, a):
        raise UnsupportedError(f"{self} is not a field")

    def elements(self) -> tuple:
        raise UnsupportedError(f"{self} is infinite")

    @property
    def size(self) -> int:
        return len(self.elements())

    def element_to_json(self, a):
        return a

    def element_from_json(self, v):
        return self.coerce(v)

    def to_spec(self) -> dict:
        raise NotImplementedError

    def sort_key(self, a):
        return a


@dataclass(frozen=True)
class Integers(Ring):
    kind = "integers"

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, int):
            if isinstance(x, Fraction) and x.denominator == 1:
                return int(x)
            raise DomainError(f"{x!r} is not an integer")
        return x

    def to_spec(self) -> dict:
        return {"kind": "integers"}

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class Rationals(Ring):
    kind = "rationals"
    is_field = True

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def coerce(self, x):
        return as_fraction(x)

    def element_to_json(self, a):
        return fraction_to_json(a)

    def to_spec(self) -> dict:
        return {"kind": "rationals"}

    def __str__(self):
        return "Q"


@dataclass(frozen=True)
class ModularIntegers(Ring):
    modulus: int
    kind = "modular"
    is_finite = True

    def __post_init__(self):
        if isinstance(self.modulus, bool) or not isinstance(self.modulus, int) or self.modulus < 2:
            raise DomainError(f"modulus must be an integer >= 2, got {self.modulus!r}")

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, int):
            raise DomainError(f"{x!r} is not an element of Z/{self.modulus}")
        return x % self.modulus

    def elements(self) -> tuple:
        return tuple(range(self.modulus))

    @property
    def size(self) -> int:
        return self.modulus

    def to_spec(self) -> dict:
        return {"kind": "modular", "m": self.modulus}

    def __str__(self):
        return f"Z/{self.modulus}"


@dataclass(frozen=True)
class PrimeField(ModularIntegers):
    kind = "prime_field"
    is_field = True

    def __post_init__(self):
        super().__post_init__()
        if not _is_prime(self.modulus):
            raise DomainError(f"{self.modulus} is not prime")

    @property
    def p(self) -> int:
        return self.modulus

    def inv(self, a):
        a %= self.modulus
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.modulus)

    def to_spec(self) -> dict:
        return {"kind": "prime_field", "p": self.modulus}

    def __str__(self):
        return f"F_{self.modulus}"


@dataclass(frozen=True)
class TableRing(Ring):
    """Finite ring on ``range(n)`` given by full operation tables.

    All ring axioms are verified exhaustively on construction.
    """

    add_table: tuple
    mul_table: tuple
    zero_index: int = 0
    one_index: int = 1
    names: tuple | None = None
    kind = "table"
    is_finite = True

    def __post_init__(self):
        add = tuple(tuple(r) for r in self.add_table)
        mul = tuple(tuple(r) for r in self.mul_table)
        object.__setattr__(self, "add_table", add)
        object.__setattr__(self, "mul_table", mul)
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
        self._verify()

    def _verify(self):
        n = len(self.add_table)
        if n == 0 or n > MAX_TABLE_RING:
            raise DomainError(f"table ring must have 1..{MAX_TABLE_RING} elements, got {n}")
        for t in (self.add_table, self.mul_table):
            if len(t) != n or any(len(row) != n for row in t):
                raise DomainError("operation tables must be square and of equal size")
            if any(not isinstance(v, int) or not 0 <= v < n for row in t for v in row):
                raise DomainError("operation tables are not closed")
        z, o = self.zero_index, self.one_index
        if not (0 <= z < n and 0 <= o < n):
            raise DomainError("zero/one index out of range")
        if z == o:
            raise DomainError("table ring must satisfy 1 != 0")
        A, M = self.add_table, self.mul_table
        r = range(n)
        for a in r:
            if A[z][a] != a or A[a][z] != a:
                raise DomainError("zero is not an additive identity")
            if M[o][a] != a or M[a][o] != a:
                raise DomainError("one is not a multiplicative identity")
            if z not in A[a]:
                raise DomainError(f"element {a} has no additive inverse")
            for b in r:
                if A[a][b] != A[b][a]:
                    raise DomainError("addition is not commutative")
        for a in r:
            Aa, Ma = A[a], M[a]
            for b in r:
                Aab, Mab, Ab, Mb = Aa[b], Ma[b], A[b], M[b]
                for c in r:
                    if A[Aab][c] != Aa[Ab[c]]:
                        raise DomainError("addition is not associative")
                    if M[Mab][c] != Ma[Mb[c]]:
                        raise DomainError("multiplication is not associative")
                    if Ma[Ab[c]] != A[Mab][Ma[c]]:
                        raise DomainError("left distributivity fails")
                    if M[Aab][c] != A[Ma[c]][Mb[c]]:
                        raise DomainError("right distributivity fails")

    @cached_property
    def _negatives(self) -> tuple:
        z = self.zero_index
        return tuple(row.index(z) for row in self.add_table)

    @property
    def zero(self):
        return self.zero_index

    @property
    def one(self):
        return self.one_index

    def add(self, a, b):
        return self.add_table[a][b]

    def neg(self, a):
        return self._negatives[a]

    def mul(self, a, b):
        return self.mul_table[a][b]

    def coerce(self, x):
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < len(self.add_table):
            raise DomainError(f"{x!r} is not an element of this table ring")
        return x

    def elements(self) -> tuple:
        return tuple(range(len(self.add_table)))

    @cached_property
    def is_field(self) -> bool:  # type: ignore[override]
        z, o = self.zero_index, self.one_index
        return all(o in self.mul_table[a] for a in self.elements() if a != z)

    def inv(self, a):
        if a == self.zero_index:
            raise ZeroDivisionError("inverse of 0")
        for b in self.elements():
            if self.mul_table[a][b] == self.one_index and self.mul_table[b][a] == self.one_index:
                return b
        raise UnsupportedError(f"element {a} is not a unit")

    def to_spec(self) -> dict:
        spec = {
            "kind": "table",
            "add": [list(r) for r in self.add_table],
            "mul": [list(r) for r in self.mul_table],
            "zero": self.zero_index,
            "one": self.one_index,
        }
        if self.names is not None:
            spec["names"] = list(self.names)
        return spec

    def __str__(self):
        return f"TableRing({len(self.add_table)})"


# -- norms -------------------------------------------------------------------


class Norm:
    kind = "norm"

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class AbsoluteNorm(Norm):
    kind = "absolute"

    def to_spec(self):
        return {"kind": "absolute"}


@dataclass(frozen=True)
class DiscreteNorm(Norm):
    kind = "discrete"

    def to_spec(self):
        return {"kind": "discrete"}


@dataclass(frozen=True)
class ScaledNorm(Norm):
    base: Norm
    factor: Fraction
    kind = "scaled"

    def __post_init__(self):
        f = as_fraction(self.factor)
        if f < 1:
            # c|xy| <= c^2|x||y| needs c >= 1
            raise DomainError(f"scale factor must be >= 1, got {f}")
        object.__setattr__(self, "factor", f)

    def to_spec(self):
        return {"kind": "scaled", "base": self.base.to_spec(), "factor": fraction_to_json(self.factor)}


@dataclass(frozen=True)
class SymmetrizedNorm(Norm):
    base: Norm
    kind = "symmetrized"

    def to_spec(self):
        return {"kind": "symmetrized", "base": self.base.to_spec()}


@dataclass(frozen=True)
class TableNorm(Norm):
    values: tuple = field(default_factory=tuple)
    kind = "table"

    def __post_init__(self):
        vals = tuple(as_fraction(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise DomainError("norm values must be nonnegative")
        object.__setattr__(self, "values", vals)

    def to_spec(self):
        return {"kind": "table", "values": [fraction_to_json(v) for v in self.values]}


def _check_compatible(ring: Ring, norm: Norm) -> None:
    if isinstance(norm, AbsoluteNorm):
        if not isinstance(ring, (Integers, Rationals)):
            raise DomainError(f"absolute norm needs Z or Q, not {ring}")
    elif isinstance(norm, TableNorm):
        if not ring.is_finite or len(norm.values) != ring.size:
            raise DomainError("table norm needs one value per element of a finite ring")
    elif isinstance(norm, (ScaledNorm, SymmetrizedNorm)):
        _check_compatible(ring, norm.base)


def norm_value(ring: Ring, norm: Norm, x) -> Fraction:
    """|x| as an exact rational."""
    x = ring.coerce(x)
    return _value(ring, norm, x)


def _value(ring: Ring, norm: Norm, x) -> Fraction:
    if isinstance(norm, DiscreteNorm):
        return Fraction(0) if ring.is_zero(x) else Fraction(1)
    if isinstance(norm, AbsoluteNorm):
        if not isinstance(ring, (Integers, Rationals)):
            raise DomainError(f"absolute norm needs Z or Q, not {ring}")
        return abs(Fraction(x))
    if isinstance(norm, ScaledNorm):
        return norm.factor * _value(ring, norm.base, x)
    if isinstance(norm, SymmetrizedNorm):
        return _value(ring, norm.base, x) + _value(ring, norm.base, ring.neg(x))
    if isinstance(norm, TableNorm):
        return norm.values[x]
    raise DomainError(f"unknown norm {norm!r}")


def symmetrize(norm: Norm) -> Norm:
    """The symmetric norm |r|' = |r| + |-r|, equivalent to ``norm``."""
    return SymmetrizedNorm(norm)


def check_norm_axioms(ring: Ring, norm: Norm, pairs: Iterable[tuple] | None = None) -> list[str]:
    """Return violated axioms (empty list when all hold).

    Finite rings are checked on every pair unless ``pairs`` is given.
    """
    problems = []
    if pairs is None:
        elems = ring.elements()
        pairs = itertools.product(elems, elems)
        singles = elems
    else:
        pairs = list(pairs)
        singles = {p for pair in pairs for p in pair}
    for x in singles:
        v = _value(ring, norm, x)
        if v < 0:
            problems.append(f"|{x}| < 0")
        if (v == 0) != ring.is_zero(x):
            problems.append(f"|{x}| = {v} violates definiteness")
    for x, y in pairs:
        vx, vy = _value(ring, norm, x), _value(ring, norm, y)
        if _value(ring, norm, ring.add(x, y)) > vx + vy:
            problems.append(f"triangle inequality fails at ({x}, {y})")
        if _value(ring, norm, ring.mul(x, y)) > vx * vy:
            problems.append(f"submultiplicativity fails at ({x}, {y})")
    return problems


def random_elements(ring: Ring, count: int, rng: random.Random, bound: int = 50) -> list:
    if ring.is_finite:
        elems = ring.elements()
        return [rng.choice(elems) for _ in range(count)]
    if isinstance(ring, Rationals):
        return [Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(count)]
    return [rng.randint(-bound, bound) for _ in range(count)]


@dataclass(frozen=True)
class NormedRing:
    """A ring paired with a norm.  Finite rings get a full axiom check."""

    ring: Ring
    norm: Norm

    def __post_init__(self):
        _check_compatible(self.ring, self.norm)
        if self.ring.is_finite:
            problems = check_norm_axioms(self.ring, self.norm)
            if problems:
                raise DomainError("invalid norm: " + "; ".join(problems[:3]))

    def abs(self, x) -> Fraction:
        return _value(self.ring, self.norm, x)

    @cached_property
    def separation(self) -> Fraction | None:
        return separation(self.ring, self.norm)

    @cached_property
    def unit_norm(self) -> Fraction:
        return self.abs(self.ring.one)

    def ball(self, radius) -> tuple:
        return ring_ball(self.ring, self.norm, radius)

    def to_spec(self) -> dict:
        return {"ring": self.ring.to_spec(), "norm": self.norm.to_spec()}

    def __str__(self):
        return f"{self.ring} with {self.norm.kind} norm"


def _homogeneous_factor(norm: Norm) -> Fraction | None:
    """lambda with |x| = lambda * |x|_abs for absolute-derived norms, else None."""
    if isinstance(norm, AbsoluteNorm):
        return Fraction(1)
    if isinstance(norm, ScaledNorm):
        f = _homogeneous_factor(norm.base)
        return None if f is None else f * norm.factor
    if isinstance(norm, SymmetrizedNorm):
        f = _homogeneous_factor(norm.base)
        return None if f is None else 2 * f
    return None


def _discrete_factor(norm: Norm) -> Fraction | None:
    """c with |x| = c for all x != 0 (discrete-derived norms), else None."""
    if isinstance(norm, DiscreteNorm):
        return Fraction(1)
    if isinstance(norm, ScaledNorm):
        f = _discrete_factor(norm.base)
        return None if f is None else f * norm.factor
    if isinstance(norm, SymmetrizedNorm):
        f = _discrete_factor(norm.base)
        return None if f is None else 2 * f
    return None


def separation(ring: Ring, norm: Norm) -> Fraction | None:
    """Largest eps with |x| >= eps for every x != 0, or None if there is none."""
    _check_compatible(ring, norm)
    if ring.is_finite:
        nonzero = [_value(ring, norm, x) for x in ring.elements() if not ring.is_zero(x)]
        return min(nonzero)
    disc = _discrete_factor(norm)
    if disc is not None:
        return disc
    hom = _homogeneous_factor(norm)
    if hom is not None:
        if isinstance(ring, Integers):
            return hom
        if isinstance(ring, Rationals):
            return None
    raise UnsupportedError(f"no closed form for the separation of {norm.kind} on {ring}")


def rescale_to_one_separated(ring: Ring, norm: Norm) -> Norm:
    eps = separation(ring, norm)
    if eps is None:
        raise UnsupportedError(f"{norm.kind} norm on {ring} is not separated")
    if eps >= 1:
        return norm
    return ScaledNorm(norm, 1 / eps)


def ring_ball(ring: Ring, norm: Norm, radius) -> tuple:
    """All r with |r| <= radius, sorted by ring sort key."""
    radius = as_fraction(radius)
    _check_compatible(ring, norm)
    if radius < 0:
        return ()
    if ring.is_finite:
        return tuple(x for x in ring.elements() if _value(ring, norm, x) <= radius)
    disc = _discrete_factor(norm)
    if disc is not None:
        if radius < disc:
            return (ring.zero,)
        raise UnsupportedError(f"ball of radius {radius} in {ring} is infinite")
    hom = _homogeneous_factor(norm)
    if hom is not None and isinstance(ring, Integers):
        bound = int(radius / hom)
        return tuple(range(-bound, bound + 1))
    if hom is not None and isinstance(ring, Rationals) and radius == 0:
        return (ring.zero,)
    raise UnsupportedError(f"ball of radius {radius} in {ring} is infinite")


# -- tagged-record (de)serialisation ------------------------------------------


def ring_from_spec(spec: dict) -> Ring:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError(f"ring must be a tagged record, got {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "integers":
            return Integers()
        if kind == "rationals":
            return Rationals()
        if kind == "modular":
            return ModularIntegers(int(spec["m"]))
        if kind == "prime_field":
            return PrimeField(int(spec["p"]))
        if kind == "table":
            return TableRing(
                spec["add"], spec["mul"], spec.get("zero", 0), spec.get("one", 1), spec.get("names")
            )
    except KeyError as exc:
        raise SchemaError(f"ring record missing field {exc}") from exc
    raise SchemaError(f"unknown ring kind {kind!r}")


def norm_from_spec(spec: dict) -> Norm:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError(f"norm must be a tagged record, got {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "absolute":
            return AbsoluteNorm()
        if kind == "discrete":
            return DiscreteNorm()
        if kind == "scaled":
            return ScaledNorm(norm_from_spec(spec["base"]), as_fraction(spec["factor"]))
        if kind == "symmetrized":
            return SymmetrizedNorm(norm_from_spec(spec["base"]))
        if kind == "table":
            return TableNorm(tuple(spec["values"]))
    except KeyError as exc:
        raise SchemaError(f"norm record missing field {exc}") from exc
    raise SchemaError(f"unknown norm kind {kind!r}")


def parse_ring_shorthand(text: str) -> NormedRing:
    """'Z', 'Q', 'F2', 'F5', 'Z/4' with their default norms (absolute / discrete)."""
    t = text.strip()
    if t.upper() == "Z":
        return NormedRing(Integers(), AbsoluteNorm())
    if t.upper() == "Q":
        return NormedRing(Rationals(), AbsoluteNorm())
    if t[:1] in "Ff" and t[1:].isdigit():
        return NormedRing(PrimeField(int(t[1:])), DiscreteNorm())
    if t.upper().startswith("Z/") and t[2:].isdigit():
        return NormedRing(ModularIntegers(int(t[2:])), DiscreteNorm())
    raise DomainError(f"unknown ring shorthand {text!r}")
