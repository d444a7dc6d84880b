"""Free R[Gamma]-chain complexes with finite bases, and chains in them.

A cell ``Cell(i, b, g)`` is the basis element g.b of the free R-module
L_i with R-basis Gamma B_i; ``b`` is the index of the basis element in B_i.
Cells sort lexicographically by (degree, basis index, group element), which
is the tie-breaker for every enumeration in the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    BoundarySquareError,
    DanglingBasisError,
    DegreeError,
    DomainError,
    SchemaError,
)
from .group_model import CyclicGroup, FreeAbelianGroup, Group, TrivialGroup, group_from_spec
from .normed_ring import NormedRing, norm_from_spec, parse_ring_shorthand, ring_from_spec


class Cell(NamedTuple):
    degree: int
    basis: int
    gamma: object


@dataclass(frozen=True, eq=False)
class Chain:
    """Immutable finitely supported chain; ``terms`` never holds zeros.

    Build chains through :class:`FreeComplex` methods, which know the ring.
    """

    degree: int
    terms: Mapping

    def items(self) -> list[tuple[Cell, object]]:
        return sorted(self.terms.items())

    def cells(self) -> list[Cell]:
        return sorted(self.terms)

    def support(self) -> set[Cell]:
        return set(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __contains__(self, cell):
        return cell in self.terms

    def __getitem__(self, cell):
        return self.terms[cell]

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.degree == other.degree and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.degree, tuple(self.items())))

    def __repr__(self):
        return f"Chain({self.degree}, {dict(self.items())})"


class BoundaryTerm(NamedTuple):
    word: tuple  # generator word, kept for serialisation
    target: int
    coeff: object


class FreeComplex:
    """A non-negative free chain complex L_0 <- L_1 <- ... <- L_n.

    ``bases[i]`` lists the names of B_i; ``boundaries[i][b]`` lists the terms
    of the boundary of the basis cell b in degree i (empty for i = 0).
    ``truncated`` marks the top degree as a skeleton cut of a longer complex.
    """

    def __init__(
        self,
        ring: NormedRing,
        group: Group,
        bases: Sequence[Sequence[str]],
        boundaries: Sequence[Sequence[Sequence[BoundaryTerm]]],
        truncated: bool = False,
        augmentation: dict | None = None,
        name: str | None = None,
    ):
        self.ring = ring
        self.group = group
        self.bases = [list(b) for b in bases]
        if not self.bases:
            raise SchemaError("a complex needs at least degree 0")
        if len(boundaries) != len(self.bases):
            raise SchemaError("one boundary table per degree required")
        self.truncated = truncated
        self.augmentation = augmentation
        self.name = name
        self._index = []
        for i, names in enumerate(self.bases):
            if len(set(names)) != len(names):
                raise SchemaError(f"duplicate basis names in degree {i}")
            self._index.append({n: k for k, n in enumerate(names)})
        R = ring.ring
        self.raw: list[list[list[BoundaryTerm]]] = []
        # canonical boundary at the identity: list of (h, target, coeff)
        self._bd: list[list[tuple]] = []
        for i, table in enumerate(boundaries):
            if len(table) != len(self.bases[i]):
                raise SchemaError(f"degree {i}: boundary table does not match the basis")
            raw_i, bd_i = [], []
            for b, terms in enumerate(table):
                terms = [BoundaryTerm(tuple(w), t, R.coerce(a)) for w, t, a in terms]
                if i == 0 and terms:
                    raise SchemaError("degree 0 cells have no boundary")
                acc: dict = {}
                for w, t, a in terms:
                    if not 0 <= t < len(self.bases[i - 1]):
                        raise DanglingBasisError(f"{self.bases[i][b]} refers to a missing cell")
                    if R.is_zero(a):
                        raise SchemaError(f"zero coefficient in the boundary of {self.bases[i][b]}")
                    key = (group.evaluate_word(w), t)
                    acc[key] = R.add(acc.get(key, R.zero), a)
                raw_i.append(terms)
                bd_i.append(sorted((h, t, a) for (h, t), a in acc.items() if not R.is_zero(a)))
            self.raw.append(raw_i)
            self._bd.append(bd_i)
        self.verify_d_squared()

    # -- basic data ---------------------------------------------------------
    @property
    def top_degree(self) -> int:
        return len(self.bases) - 1

    def rank(self, i: int) -> int:
        return len(self.bases[i]) if 0 <= i <= self.top_degree else 0

    def basis_index(self, i: int, name: str) -> int:
        try:
            return self._index[i][name]
        except (KeyError, IndexError):
            raise DomainError(f"no basis cell {name!r} in degree {i}") from None

    def basis_boundary(self, i: int, b: int) -> list[tuple]:
        """Terms (h, target, coeff) of the boundary of e.b in degree i."""
        return self._bd[i][b]

    def cell(self, i: int, name: str | int, gamma=None) -> Cell:
        b = name if isinstance(name, int) else self.basis_index(i, name)
        if not 0 <= b < self.rank(i):
            raise DomainError(f"basis index {b} out of range in degree {i}")
        g = self.group.identity if gamma is None else self.group.coerce(gamma)
        return Cell(i, b, g)

    def check_degree(self, i: int) -> None:
        if not 0 <= i <= self.top_degree:
            raise DegreeError(f"degree {i} outside 0..{self.top_degree}")

    def all_cells(self, i: int) -> list[Cell]:
        """Every cell of Gamma B_i; finite groups only."""
        self.check_degree(i)
        return [Cell(i, b, g) for b in range(self.rank(i)) for g in self.group.elements()]

    def cells_within(self, i: int, radius: int) -> list[Cell]:
        self.check_degree(i)
        ball = self.group.ball(radius)
        return [Cell(i, b, g) for b in range(self.rank(i)) for g in ball]

    # -- chains -------------------------------------------------------------
    def chain(self, degree: int, terms: Mapping | Iterable[tuple] = ()) -> Chain:
        """Chain from (cell, coeff) pairs; repeated cells are summed."""
        R = self.ring.ring
        pairs = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for cell, a in pairs:
            if cell.degree != degree:
                raise DegreeError(f"cell {cell} is not in degree {degree}")
            acc[cell] = R.add(acc.get(cell, R.zero), R.coerce(a))
        return Chain(degree, {c: a for c, a in acc.items() if not R.is_zero(a)})

    def zero(self, degree: int) -> Chain:
        return Chain(degree, {})

    def basis_chain(self, cell: Cell, coeff=None) -> Chain:
        R = self.ring.ring
        return self.chain(cell.degree, [(cell, R.one if coeff is None else coeff)])

    def add(self, a: Chain, b: Chain) -> Chain:
        if a.degree != b.degree:
            raise DegreeError("cannot add chains of different degrees")
        R = self.ring.ring
        out = dict(a.terms)
        for c, v in b.terms.items():
            nv = R.add(out.get(c, R.zero), v)
            if R.is_zero(nv):
                out.pop(c, None)
            else:
                out[c] = nv
        return Chain(a.degree, out)

    def scale(self, r, a: Chain) -> Chain:
        R = self.ring.ring
        r = R.coerce(r)
        out = {}
        for c, v in a.terms.items():
            nv = R.mul(r, v)
            if not R.is_zero(nv):
                out[c] = nv
        return Chain(a.degree, out)

    def neg(self, a: Chain) -> Chain:
        R = self.ring.ring
        return self.scale(R.neg(R.one), a)

    def sub(self, a: Chain, b: Chain) -> Chain:
        return self.add(a, self.neg(b))

    def sum(self, degree: int, chains: Iterable[Chain]) -> Chain:
        out = self.zero(degree)
        for c in chains:
            out = self.add(out, c)
        return out

    def translate_cell(self, g, cell: Cell) -> Cell:
        return Cell(cell.degree, cell.basis, self.group.multiply(g, cell.gamma))

    def translate(self, g, a: Chain) -> Chain:
        g = self.group.coerce(g)
        return Chain(a.degree, {self.translate_cell(g, c): v for c, v in a.terms.items()})

    def cell_boundary_terms(self, cell: Cell) -> list[tuple[Cell, object]]:
        """(cell, coeff) pairs of the boundary of a basis cell; duplicates impossible."""
        G = self.group
        return [
            (Cell(cell.degree - 1, t, G.multiply(cell.gamma, h)), a)
            for h, t, a in self._bd[cell.degree][cell.basis]
        ]

    def boundary(self, a: Chain) -> Chain:
        if a.degree < 1:
            raise DegreeError("the boundary is not defined in degree 0")
        if a.degree > self.top_degree:
            raise DegreeError(f"degree {a.degree} exceeds the top degree {self.top_degree}")
        R = self.ring.ring
        out: dict = {}
        for cell, r in a.terms.items():
            for tc, v in self.cell_boundary_terms(cell):
                out[tc] = R.add(out.get(tc, R.zero), R.mul(r, v))
        return Chain(a.degree - 1, {c: v for c, v in out.items() if not R.is_zero(v)})

    def cell_weight(self, cell: Cell) -> int:
        return 1 + self.group.word_length(cell.gamma)

    def norm(self, a: Chain) -> Fraction:
        return sum((self.ring.abs(v) for v in a.terms.values()), Fraction(0))

    def weighted_norm(self, a: Chain) -> Fraction:
        return sum(
            (self.ring.abs(v) * self.cell_weight(c) for c, v in a.terms.items()), Fraction(0)
        )

    def chain_norm(self, a: Chain, weighted: bool = False) -> Fraction:
        return self.weighted_norm(a) if weighted else self.norm(a)

    def is_cycle(self, a: Chain) -> bool:
        return a.degree == 0 or self.boundary(a).is_zero()

    # -- checks -------------------------------------------------------------
    def verify_d_squared(self) -> None:
        for i in range(2, self.top_degree + 1):
            for b in range(self.rank(i)):
                cell = Cell(i, b, self.group.identity)
                dd = self.boundary(self.boundary(self.basis_chain(cell)))
                if not dd.is_zero():
                    raise BoundarySquareError(
                        f"d(d({self.bases[i][b]})) != 0 in degree {i}", self.bases[i][b]
                    )

    def zero_boundary_cells(self) -> list[tuple[int, str]]:
        return [
            (i, self.bases[i][b])
            for i in range(1, self.top_degree + 1)
            for b in range(self.rank(i))
            if not self._bd[i][b]
        ]

    # -- naming and serialisation -----------------------------------------
    def format_cell(self, cell: Cell) -> str:
        word = self.group.word_for(cell.gamma)
        name = self.bases[cell.degree][cell.basis]
        return name + ("@" + ",".join(str(m) for m in word) if word else "")

    def parse_cell(self, degree: int, text: str) -> Cell:
        name, _, word = text.strip().partition("@")
        try:
            w = [int(t) for t in word.split(",") if t.strip()]
        except ValueError:
            raise DomainError(f"bad cell word in {text!r}") from None
        return self.cell(degree, name, self.group.evaluate_word(w))

    def chain_to_json(self, a: Chain) -> dict:
        R = self.ring.ring
        return {
            "degree": a.degree,
            "terms": [
                [self.bases[c.degree][c.basis], self.group.word_for(c.gamma), R.element_to_json(v)]
                for c, v in a.items()
            ],
        }

    def chain_from_json(self, data: dict) -> Chain:
        try:
            degree = int(data["degree"])
            self.check_degree(degree)
            R = self.ring.ring
            terms = [
                (self.cell(degree, name, self.group.evaluate_word(word)), R.element_from_json(a))
                for name, word, a in data["terms"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise SchemaError(f"malformed chain record: {exc}") from exc
        return self.chain(degree, terms)

    def format_chain(self, a: Chain) -> str:
        if a.is_zero():
            return "0"
        R = self.ring.ring
        parts = []
        for c, v in a.items():
            coeff = R.element_to_json(v)
            parts.append(f"{coeff}*{self.format_cell(c)}")
        return " + ".join(parts)

    def to_spec(self) -> dict:
        R = self.ring.ring
        degrees = []
        for i, names in enumerate(self.bases):
            entry: dict = {"i": i, "basis": list(names)}
            if i > 0:
                entry["boundary"] = {
                    names[b]: [
                        [list(t.word), self.bases[i - 1][t.target], R.element_to_json(t.coeff)]
                        for t in self.raw[i][b]
                    ]
                    for b in range(len(names))
                }
            degrees.append(entry)
        spec = {
            "ring": R.to_spec(),
            "norm": self.ring.norm.to_spec(),
            "group": self.group.to_spec(),
            "degrees": degrees,
            "truncated": self.truncated,
        }
        if self.name:
            spec["name"] = self.name
        if self.augmentation is not None:
            spec["augmentation"] = self.augmentation
        return spec

    def __eq__(self, other):
        return isinstance(other, FreeComplex) and self.to_spec() == other.to_spec()

    def __hash__(self):
        return hash(json.dumps(self.to_spec(), sort_keys=True))

    def __repr__(self):
        ranks = [len(b) for b in self.bases]
        return f"FreeComplex({self.name or 'unnamed'}, ranks={ranks}, {self.ring})"


def complex_from_spec(spec: dict) -> FreeComplex:
    if not isinstance(spec, dict):
        raise SchemaError("complex file must hold a JSON object")
    for key in ("ring", "norm", "group", "degrees"):
        if key not in spec:
            raise SchemaError(f"complex record missing field {key!r}")
    ring = ring_from_spec(spec["ring"])
    norm = norm_from_spec(spec["norm"])
    try:
        nring = NormedRing(ring, norm)
    except DomainError as exc:
        raise SchemaError(str(exc)) from exc
    group = group_from_spec(spec["group"])
    degrees = spec["degrees"]
    if not isinstance(degrees, list) or not degrees:
        raise SchemaError("'degrees' must be a nonempty list")
    degrees = sorted(degrees, key=lambda d: d.get("i", -1) if isinstance(d, dict) else -1)
    if [d.get("i") for d in degrees] != list(range(len(degrees))):
        raise SchemaError("degrees must be numbered 0, 1, ..., n without gaps")
    bases = []
    for d in degrees:
        basis = d.get("basis")
        if not isinstance(basis, list) or not all(isinstance(n, str) for n in basis):
            raise SchemaError(f"degree {d['i']}: basis must be a list of names")
        bases.append(basis)
    boundaries = []
    for i, d in enumerate(degrees):
        table = d.get("boundary", {}) or {}
        if not isinstance(table, dict):
            raise SchemaError(f"degree {i}: boundary must map names to term lists")
        if i == 0 and table:
            raise SchemaError("degree 0 cells have no boundary")
        unknown = set(table) - set(bases[i])
        if unknown:
            raise DanglingBasisError(f"degree {i}: boundary given for unknown cells {sorted(unknown)}")
        rows = []
        for name in bases[i]:
            terms = []
            for term in table.get(name, []):
                if not isinstance(term, (list, tuple)) or len(term) != 3:
                    raise SchemaError(f"{name}: boundary terms are [word, target, coeff]")
                word, target, coeff = term
                if not isinstance(word, list):
                    raise SchemaError(f"{name}: word must be a list of generator indices")
                if target not in bases[i - 1]:
                    raise DanglingBasisError(f"{name} refers to missing cell {target!r}")
                try:
                    a = ring.element_from_json(coeff)
                except DomainError as exc:
                    raise SchemaError(f"{name}: bad coefficient {coeff!r}") from exc
                terms.append((tuple(word), bases[i - 1].index(target), a))
            rows.append(terms)
        boundaries.append(rows)
    return FreeComplex(
        nring, group, bases, boundaries,
        truncated=bool(spec.get("truncated", False)),
        augmentation=spec.get("augmentation"),
        name=spec.get("name"),
    )


def load_complex(path: str | Path) -> FreeComplex:
    text = Path(path).read_text(encoding="utf-8")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return complex_from_spec(spec)


def save_complex(cx: FreeComplex, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cx.to_spec(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- built-in complexes -------------------------------------------------------


def _normed(ring: NormedRing | str | None) -> NormedRing:
    if ring is None:
        return parse_ring_shorthand("Z")
    if isinstance(ring, str):
        return parse_ring_shorthand(ring)
    return ring


def _term(group: Group, h, target: int, coeff) -> tuple:
    return (tuple(group.word_for(group.coerce(h))), target, coeff)


def cyclic_resolution(k: int, n_max: int = 2, ring: NormedRing | str | None = None) -> FreeComplex:
    """... -> R[Z/k] --N--> R[Z/k] --(1-t)--> R[Z/k], truncated at n_max."""
    if k < 2 or n_max < 1:
        raise DomainError("cyclic resolution needs k >= 2 and n_max >= 1")
    nring = _normed(ring)
    R = nring.ring
    G = CyclicGroup(k)
    one, mone = R.one, R.neg(R.one)
    bases = [[f"b{i}"] for i in range(n_max + 1)]
    bds: list = [[[]]]
    for i in range(1, n_max + 1):
        if i % 2:
            terms = [_term(G, 0, 0, one), _term(G, 1, 0, mone)]
        else:
            terms = [_term(G, j, 0, one) for j in range(k)]
        bds.append([terms])
    aug = {"kind": "augmentation", "degree0": {"b0": R.element_to_json(one)}}
    return FreeComplex(nring, G, bases, bds, truncated=True, augmentation=aug,
                       name=f"cyclic-resolution-{k}")


def cayley_complex(group: Group, ring: NormedRing | str | None = None) -> FreeComplex:
    """Vertex v and one edge e_s per generator with boundary s.v - v."""
    nring = _normed(ring)
    R = nring.ring
    names = [f"e_{group.generator_label(s)}" for s in range(len(group.generators))]
    bds = [[[]], [[_term(group, s, 0, R.one), ((), 0, R.neg(R.one))] for s in group.generators]]
    aug = {"kind": "augmentation", "degree0": {"v": R.element_to_json(R.one)}}
    return FreeComplex(nring, group, [["v"], names], bds, truncated=True, augmentation=aug,
                       name="cayley")


def fox_boundary(group: Group, relator: Sequence[int], ring: NormedRing) -> list[tuple]:
    """Boundary of a relator 2-cell in the Cayley 1-skeleton (Fox calculus)."""
    R = ring.ring
    terms = []
    prefix = group.identity
    for m in relator:
        s = group.generator_move(m)
        if m > 0:
            terms.append(_term(group, prefix, abs(m) - 1, R.one))
            prefix = group.multiply(prefix, s)
        else:
            prefix = group.multiply(prefix, s)
            terms.append(_term(group, prefix, abs(m) - 1, R.neg(R.one)))
    return terms


def presentation_complex(group: Group, relators: Sequence[Sequence[int]],
                         ring: NormedRing | str | None = None,
                         relator_names: Sequence[str] | None = None,
                         truncated: bool = True, name: str = "presentation") -> FreeComplex:
    """Cellular chains of the universal cover of a presentation complex."""
    nring = _normed(ring)
    cay = cayley_complex(group, nring)
    names = list(relator_names) if relator_names else [f"f{j}" for j in range(len(relators))]
    for r in relators:
        if group.evaluate_word(r) != group.identity:
            raise DomainError(f"relator {list(r)} is not trivial in the group")
    bds = [cay.raw[0], cay.raw[1], [fox_boundary(group, r, nring) for r in relators]]
    return FreeComplex(nring, group, cay.bases + [names], bds, truncated=truncated,
                       augmentation=cay.augmentation, name=name)


def z2_presentation_complex(ring: NormedRing | str | None = None) -> FreeComplex:
    """Z^2 = <x, y | [x, y]>; the boundary of f is e_x + x e_y - y e_x - e_y."""
    return presentation_complex(FreeAbelianGroup(2), [[1, 2, -1, -2]], ring, ["f"],
                                truncated=False, name="z2-presentation")


def cyclic_presentation_complex(k: int, ring: NormedRing | str | None = None) -> FreeComplex:
    """Z/k = <t | t^k>, a resolution through degree 2."""
    return presentation_complex(CyclicGroup(k), [[1] * k], ring, ["f"], name=f"cyclic-presentation-{k}")


def z6_two_generator_complex(ring: NormedRing | str | None = None) -> FreeComplex:
    """Z/6 generated by a = t^2, b = t^3 with relators a^3, b^2, [a, b]."""
    G = CyclicGroup(6, [2, 3], ["a", "b"])
    return presentation_complex(G, [[1, 1, 1], [2, 2], [1, 2, -1, -2]], ring,
                                ["r_a3", "r_b2", "r_ab"], name="z6-two-generator")


def tripod(ring: NormedRing | str | None = None) -> FreeComplex:
    """A simplicial tripod over the trivial group: centre c, leaves p1..p3."""
    nring = _normed(ring)
    R = nring.ring
    bases = [["c", "p1", "p2", "p3"], ["e1", "e2", "e3"]]
    bds = [[[], [], [], []], [[((), j, R.one), ((), 0, R.neg(R.one))] for j in (1, 2, 3)]]
    return FreeComplex(nring, TrivialGroup(), bases, bds, truncated=False, name="tripod")


def commutator_cycle(n: int, cx: FreeComplex, r=None) -> Chain:
    """r times the loop x^n y^n x^-n y^-n in the Z^2 presentation complex."""
    if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    G = cx.group
    if not isinstance(G, FreeAbelianGroup) or G.rank != 2 or cx.rank(1) != 2:
        raise DomainError("commutator cycles live in the Z^2 presentation complex")
    R = cx.ring.ring
    r = R.one if r is None else R.coerce(r)
    word = [1] * n + [2] * n + [-1] * n + [-2] * n
    terms = []
    for h, t, a in fox_boundary(G, word, cx.ring):
        terms.append((Cell(1, t, G.evaluate_word(h)), R.mul(r, a)))
    return cx.chain(1, terms)


BUILTINS = {
    "cyclic": "cyclic resolution of Z/k (k, n, ring)",
    "cayley-cyclic": "Cayley complex of Z/k with S = {t} (k, ring)",
    "cayley-free-abelian": "Cayley complex of Z^n (n, ring)",
    "cyclic-presentation": "presentation complex of <t | t^k> (k, ring)",
    "z2": "presentation complex of <x, y | [x, y]> (ring)",
    "z6-two-generator": "Z/6 with generators t^2, t^3 (ring)",
    "tripod": "simplicial tripod over the trivial group (ring)",
}


def builtin_complex(name: str, **params) -> FreeComplex:
    ring = params.pop("ring", None)

    def need(key, default=None):
        if key in params:
            return int(params.pop(key))
        if default is None:
            raise DomainError(f"builtin {name!r} needs parameter {key!r}")
        return default

    if name == "cyclic":
        cx = cyclic_resolution(need("k"), need("n", 2), ring)
    elif name == "cayley-cyclic":
        cx = cayley_complex(CyclicGroup(need("k")), ring)
    elif name == "cayley-free-abelian":
        cx = cayley_complex(FreeAbelianGroup(need("n", 2)), ring)
    elif name == "cyclic-presentation":
        cx = cyclic_presentation_complex(need("k"), ring)
    elif name == "z2":
        cx = z2_presentation_complex(ring)
    elif name == "z6-two-generator":
        cx = z6_two_generator_complex(ring)
    elif name == "tripod":
        cx = tripod(ring)
    else:
        raise DomainError(f"unknown builtin complex {name!r}; known: {', '.join(BUILTINS)}")
    if params:
        raise DomainError(f"unused parameters for builtin {name!r}: {sorted(params)}")
    return cx
