"""Basis collections, the closure P, the extension N-tilde and the thickenings N^{k,j}."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .chain_complex import Cell, FreeComplex
from .errors import DegreeError, DomainError
from .support_geometry import K, boundary_support, build_gr, gr_neighbors, neighbor_cells_above


class BasisCollection:
    """Per-degree finite sets of cells U_i of Gamma B_i."""

    __slots__ = ("_sets",)

    def __init__(self, sets: Mapping[int, Iterable[Cell]] | None = None):
        clean = {}
        for i, cells in (sets or {}).items():
            fs = frozenset(cells)
            if any(c.degree != i for c in fs):
                raise DomainError(f"cell of wrong degree in U_{i}")
            if fs:
                clean[i] = fs
        self._sets = clean

    @classmethod
    def from_cells(cls, cells: Iterable[Cell]) -> "BasisCollection":
        sets: dict = {}
        for c in cells:
            sets.setdefault(c.degree, set()).add(c)
        return cls(sets)

    def __getitem__(self, i: int) -> frozenset:
        return self._sets.get(i, frozenset())

    def degrees(self) -> list[int]:
        return sorted(self._sets)

    @property
    def dimension(self) -> int:
        """Largest i with U_i nonempty, -1 for the empty collection."""
        return max(self._sets, default=-1)

    def counts(self, top: int | None = None) -> list[int]:
        top = self.dimension if top is None else top
        return [len(self[i]) for i in range(top + 1)]

    def size(self) -> int:
        return sum(len(s) for s in self._sets.values())

    def cells(self) -> list[Cell]:
        return sorted(c for s in self._sets.values() for c in s)

    def truncate(self, k: int) -> "BasisCollection":
        """U_{* <= k}; shares the underlying frozensets rather than copying them."""
        out = BasisCollection.__new__(BasisCollection)
        out._sets = {i: s for i, s in self._sets.items() if i <= k}
        return out

    def union(self, other: "BasisCollection") -> "BasisCollection":
        keys = set(self._sets) | set(other._sets)
        return BasisCollection({i: self[i] | other[i] for i in keys})

    def issubset(self, other: "BasisCollection") -> bool:
        return all(s <= other[i] for i, s in self._sets.items())

    def is_closed(self, cx: FreeComplex) -> bool:
        return all(
            w in self[i - 1]
            for i, s in self._sets.items() if i > 0
            for u in s for w in boundary_support(cx, u)
        )

    def __eq__(self, other):
        return isinstance(other, BasisCollection) and self._sets == other._sets

    def __hash__(self):
        return hash(frozenset(self._sets.items()))

    def __repr__(self):
        return f"BasisCollection({self.counts()})"


def close_P(cx: FreeComplex, U: BasisCollection) -> BasisCollection:
    """Smallest collection closed under differentials containing U."""
    top = U.dimension
    sets = {i: set(U[i]) for i in range(top + 1)}
    for i in range(top, 0, -1):
        for u in sets[i]:
            sets[i - 1].update(boundary_support(cx, u))
    return BasisCollection(sets)


def tilde_N(cx: FreeComplex, U: BasisCollection, max_degree: int | None = None) -> BasisCollection:
    """N-tilde_i = U_i together with S(u) for u in U_{i-1}; degrees above ``max_degree`` dropped."""
    top = U.dimension + 1
    top = min(top, cx.top_degree)
    if max_degree is not None:
        top = min(top, max_degree)
    sets: dict = {0: set(U[0])} if top >= 0 else {}
    for i in range(1, top + 1):
        s = set(U[i])
        for u in U[i - 1]:
            s.update(neighbor_cells_above(cx, u))
        sets[i] = s
    return BasisCollection(sets)


def thicken_step(cx: FreeComplex, V: BasisCollection, k: int) -> BasisCollection:
    """N^{k,1}(V) = P(N-tilde_{* <= k}(P(V)))."""
    return close_P(cx, tilde_N(cx, close_P(cx, V), max_degree=k))


def _check_k(cx: FreeComplex, k: int) -> None:
    if not 0 <= k <= cx.top_degree:
        raise DegreeError(f"thickening degree bound {k} outside 0..{cx.top_degree}")


def thicken(cx: FreeComplex, U: BasisCollection, k: int, j: int) -> BasisCollection:
    """The j-step k-thickening N^{k,j}(U)."""
    _check_k(cx, k)
    if j < 0:
        raise DomainError("number of steps must be >= 0")
    N = close_P(cx, U)
    for _ in range(j):
        N = thicken_step(cx, N, k)
    return N


@dataclass
class ThickeningRun:
    steps: list[BasisCollection] = field(default_factory=list)
    saturated_at: int | None = None

    def counts(self, k: int) -> list[list[int]]:
        return [s.counts(k) for s in self.steps]


def thickening_chain(cx: FreeComplex, U: BasisCollection, k: int, j_max: int) -> ThickeningRun:
    """N^{k,0}, N^{k,1}, ... up to j_max, stopping once a step adds nothing."""
    _check_k(cx, k)
    run = ThickeningRun([close_P(cx, U)])
    for j in range(1, j_max + 1):
        nxt = thicken_step(cx, run.steps[-1], k)
        if nxt == run.steps[-1]:
            run.saturated_at = j - 1
            break
        run.steps.append(nxt)
    return run


def full_skeleton(cx: FreeComplex, k: int) -> BasisCollection:
    return BasisCollection({i: cx.all_cells(i) for i in range(k + 1)})


# -- exhaustion conditions ------------------------------------------------------

PASS = "pass"
FAIL = "fail"
ORBIT = "proved by orbit certificate"
BALL = "verified on ball"
UNVERIFIED = "unverified"
SEED = "seed-dependent"
NA = "not applicable"

_ACCEPTABLE = {PASS, ORBIT, SEED, NA}


@dataclass
class ExhaustionReport:
    k: int
    conditions: dict
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v in _ACCEPTABLE for v in self.conditions.values())

    @property
    def failed(self) -> bool:
        return any(v == FAIL for v in self.conditions.values())

    def to_json(self) -> dict:
        return {"k": self.k, "conditions": dict(self.conditions), "details": dict(self.details)}


def _bfs_within(cx: FreeComplex, start: Cell, targets: set, radius: int) -> set:
    """Targets reachable from start in Gr(Gamma B_1) using cells of word length <= radius."""
    G = cx.group
    seen = {start}
    queue = deque([start])
    found = set()
    while queue and len(found) < len(targets):
        u = queue.popleft()
        if u in targets:
            found.add(u)
        for v in gr_neighbors(cx, u):
            if v not in seen and G.word_length(v.gamma) <= radius:
                seen.add(v)
                queue.append(v)
    if start in targets:
        found.add(start)
    return found


def exhaustion_conditions(cx: FreeComplex, k: int, seed: BasisCollection | None = None,
                          radius: int | None = None) -> ExhaustionReport:
    """Check the hypotheses (1)-(4) of the connectivity filtration theorem."""
    _check_k(cx, k)
    G = cx.group
    cond: dict = {}
    details: dict = {}
    if seed is None:
        cond["1"] = SEED
    else:
        cond["1"] = PASS if seed.size() else FAIL
    degenerate = [f"{name} (degree {i})" for i, name in cx.zero_boundary_cells() if i <= k]
    cond["2"] = FAIL if degenerate else PASS
    if degenerate:
        details["2"] = degenerate
    if cx.top_degree < 1 or cx.rank(1) == 0:
        cond["3"] = FAIL if cx.rank(0) else NA
        cond["4"] = FAIL if cx.rank(0) else NA
        return ExhaustionReport(k, cond, details)

    # (4) is Gamma-equivariant: it suffices that every b' in B_0 occurs in some d b
    hit = {t for b in range(cx.rank(1)) for _, t, _ in cx.basis_boundary(1, b)}
    missing = [cx.bases[0][t] for t in range(cx.rank(0)) if t not in hit]
    if G.is_finite:
        covered = {w for u in cx.all_cells(1) for w in boundary_support(cx, u)}
        cond["4"] = PASS if covered == set(cx.all_cells(0)) else FAIL
    else:
        cond["4"] = FAIL if missing else ORBIT
    if missing:
        details["4"] = missing

    if G.is_finite:
        cond["3"] = PASS if build_gr(cx, cx.all_cells(1)).is_connected() else FAIL
        return ExhaustionReport(k, cond, details)

    # orbit certificate: all e.b joined to e.b_0, and every s.b_0 joined to b_0
    r = 2 * K(cx, 1) + 2 if radius is None else radius
    b0 = Cell(1, 0, G.identity)
    targets = {Cell(1, b, G.identity) for b in range(cx.rank(1))}
    targets |= {Cell(1, 0, s) for s in G.generators}
    found = _bfs_within(cx, b0, targets, r)
    details["3"] = {"radius": r, "certificate_cells": len(targets), "reached": len(found)}
    if found == targets:
        cond["3"] = ORBIT
    elif build_gr(cx, cx.cells_within(1, r)).is_connected():
        cond["3"] = BALL
    else:
        cond["3"] = UNVERIFIED
    return ExhaustionReport(k, cond, details)


# -- orbit representatives of connected subsets ------------------------------------


def canonical_form(cx: FreeComplex, U: Iterable[Cell]) -> tuple[Cell, ...]:
    """Lexicographically least translate of U having some cell at the identity."""
    cells = sorted(U)
    if not cells:
        return ()
    G = cx.group
    best = None
    for c in cells:
        g = G.inverse(c.gamma)
        t = tuple(sorted(cx.translate_cell(g, x) for x in cells))
        if best is None or t < best:
            best = t
    return best


def orbit_representatives(cx: FreeComplex, i: int, l: int) -> list[tuple[Cell, ...]]:
    """One canonical representative per orbit of connected U in Gamma B_i with |U| <= l.

    Includes the empty set.  Built by extending representatives of size m by
    a neighbouring cell; every connected set arises this way from a connected
    subset (drop a leaf of a spanning tree).
    """
    cx.check_degree(i)
    if l < 0:
        raise DomainError("l must be >= 0")
    G = cx.group
    reps: list[tuple[Cell, ...]] = [()]
    if l == 0:
        return reps
    level = sorted({(Cell(i, b, G.identity),) for b in range(cx.rank(i))})
    bound = 2 * K(cx, i) * l
    for m in range(1, l + 1):
        reps.extend(level)
        if m == l:
            break
        nxt = set()
        for U in level:
            Us = set(U)
            for u in U:
                for v in gr_neighbors(cx, u):
                    if v not in Us:
                        nxt.add(canonical_form(cx, Us | {v}))
        level = sorted(nxt)
    for U in reps:
        if any(G.word_length(c.gamma) > bound for c in U):
            raise AssertionError(f"representative {U} leaves the ball of radius {bound}")
    return reps


def orbit_count_bruteforce(cx: FreeComplex, i: int, l: int) -> int:
    """Orbit count of connected subsets of size <= l by listing every subset (finite groups)."""
    cells = cx.all_cells(i)
    forms = {()}
    for m in range(1, l + 1):
        for U in itertools.combinations(cells, m):
            if build_gr(cx, U).is_connected():
                forms.add(canonical_form(cx, U))
    return len(forms)
