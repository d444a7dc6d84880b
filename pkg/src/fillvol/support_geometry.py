"""Supports, the support graph Gr(U), and the constants A_i, K_i and S(u)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable

from .chain_complex import Cell, Chain, FreeComplex
from .errors import DegreeError, DomainError


def supp_R(c: Chain) -> set[Cell]:
    return c.support()


def supp_Gamma(c: Chain) -> set:
    return {cell.gamma for cell in c.terms}


@dataclass(frozen=True)
class GeometricConstants:
    degree: int
    A: frozenset
    K: int


def _cache(cx: FreeComplex) -> dict:
    # complexes are immutable after construction, so per-object memo is safe
    return cx.__dict__.setdefault("_support_cache", {})


def constants(cx: FreeComplex, i: int) -> GeometricConstants:
    """A_i = union of supp_Gamma(d b) over b in B_i and K_i = max word length on A_i."""
    if i < 0:
        raise DegreeError("negative degree")
    memo = _cache(cx)
    key = ("K", i)
    if key not in memo:
        if i == 0 or i > cx.top_degree:
            memo[key] = GeometricConstants(i, frozenset(), 0)
        else:
            A = frozenset(h for b in range(cx.rank(i)) for h, _, _ in cx.basis_boundary(i, b))
            K = max((cx.group.word_length(h) for h in A), default=0)
            memo[key] = GeometricConstants(i, A, K)
    return memo[key]


def K(cx: FreeComplex, i: int) -> int:
    return constants(cx, i).K


def _sources(cx: FreeComplex, i: int) -> dict:
    """For degree i: target basis index -> list of (h, source basis) with h.target in d(source)."""
    memo = _cache(cx)
    key = ("src", i)
    if key not in memo:
        table: dict = {}
        for b in range(cx.rank(i)):
            for h, t, _ in cx.basis_boundary(i, b):
                table.setdefault(t, []).append((h, b))
        memo[key] = table
    return memo[key]


def neighbor_cells_above(cx: FreeComplex, u: Cell) -> list[Cell]:
    """S(u): the cells v of degree deg(u)+1 with u in supp_R(d v), sorted.

    For a top-degree cell the answer is empty.  When the complex is a
    truncation that emptiness is an artefact of the cut, so a warning is issued.
    """
    i = u.degree
    if i < 0 or i > cx.top_degree:
        raise DegreeError(f"cell degree {i} outside the complex")
    if i == cx.top_degree:
        if cx.truncated:
            warnings.warn(f"S(u) requested at the truncated top degree {i}; returning the empty set",
                          stacklevel=2)
        return []
    G = cx.group
    out = set()
    for h, b in _sources(cx, i + 1).get(u.basis, ()):
        out.add(Cell(i + 1, b, G.multiply(u.gamma, G.inverse(h))))
    return sorted(out)


def neighbor_cells_scan(cx: FreeComplex, u: Cell) -> list[Cell]:
    """S(u) by scanning all cells of word length <= l(u) + K_{i+1}; an oracle."""
    i = u.degree
    if i >= cx.top_degree:
        return []
    radius = cx.group.word_length(u.gamma) + K(cx, i + 1)
    out = []
    for v in cx.cells_within(i + 1, radius):
        if any(w == u for w, _ in cx.cell_boundary_terms(v)):
            out.append(v)
    return sorted(out)


def boundary_support(cx: FreeComplex, u: Cell) -> list[Cell]:
    if u.degree == 0:
        return []
    return [w for w, _ in cx.cell_boundary_terms(u)]


def gr_neighbors(cx: FreeComplex, u: Cell) -> list[Cell]:
    """Neighbours of u in the full support graph Gr(Gamma B_i)."""
    out = set()
    for w in boundary_support(cx, u):
        out.update(neighbor_cells_above(cx, w))
    out.discard(u)
    return sorted(out)


@dataclass
class SupportGraph:
    vertices: list[Cell]
    adjacency: dict = field(default_factory=dict)

    def edges(self) -> list[tuple[Cell, Cell]]:
        return sorted((u, v) for u in self.vertices for v in self.adjacency[u] if u < v)

    @property
    def edge_count(self) -> int:
        return sum(len(n) for n in self.adjacency.values()) // 2

    def degrees(self) -> list[int]:
        return [len(self.adjacency[v]) for v in self.vertices]

    def is_regular(self) -> int | None:
        degs = set(self.degrees())
        return degs.pop() if len(degs) == 1 else None

    def components(self) -> list[list[Cell]]:
        seen: set = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp, stack = [], [v]
            seen.add(v)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.adjacency[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def classify(self) -> str:
        """'edgeless', 'cycle', 'complete' or 'other' (up to isomorphism)."""
        n, m = len(self.vertices), self.edge_count
        if m == 0:
            return "edgeless"
        if m == n * (n - 1) // 2:
            return "complete"
        if n >= 3 and self.is_regular() == 2 and self.is_connected():
            return "cycle"
        return "other"

    def summary(self) -> dict:
        return {
            "vertices": len(self.vertices),
            "edges": self.edge_count,
            "regular": self.is_regular(),
            "class": self.classify(),
        }


def build_gr(cx: FreeComplex, U: Iterable[Cell]) -> SupportGraph:
    """Gr(U): edges join cells whose boundaries share a cell of the degree below."""
    verts = sorted(set(U))
    degs = {u.degree for u in verts}
    if len(degs) > 1:
        raise DomainError("support graph vertices must share one degree")
    adj: dict = {v: set() for v in verts}
    incident: dict = {}
    for u in verts:
        for w in boundary_support(cx, u):
            incident.setdefault(w, []).append(u)
    for group in incident.values():
        for a in group:
            for b in group:
                if a != b:
                    adj[a].add(b)
    return SupportGraph(verts, {v: sorted(n) for v, n in adj.items()})


def connected_components(cx: FreeComplex, c: Chain) -> list[Chain]:
    """Split c along the components of Gr(supp c), ordered by least cell."""
    g = build_gr(cx, c.terms)
    return [Chain(c.degree, {x: c.terms[x] for x in comp}) for comp in g.components()]


def is_connected_chain(cx: FreeComplex, c: Chain) -> bool:
    return build_gr(cx, c.terms).is_connected()


# -- the inequalities of the connectivity estimates ---------------------------


def check_boundary_estimate(cx: FreeComplex, x: Cell) -> list[str]:
    """l(x) <= l(v) + K_i and ||x||^G <= ||v||^G + K_i for v in supp(d x)."""
    k = K(cx, x.degree)
    G = cx.group
    bad = []
    for v in boundary_support(cx, x):
        if G.word_length(x.gamma) > G.word_length(v.gamma) + k:
            bad.append(f"length estimate fails for {x} over {v}")
        if cx.cell_weight(x) > cx.cell_weight(v) + k:
            bad.append(f"weighted estimate fails for {x} over {v}")
    return bad


def check_edge_estimate(cx: FreeComplex, x: Cell, y: Cell) -> list[str]:
    k = K(cx, x.degree)
    G = cx.group
    bad = []
    if G.word_length(y.gamma) > G.word_length(x.gamma) + 2 * k:
        bad.append(f"edge length estimate fails for {x} -- {y}")
    if cx.cell_weight(y) > cx.cell_weight(x) + 2 * k:
        bad.append(f"edge weighted estimate fails for {x} -- {y}")
    return bad


def check_connected_chain_estimate(cx: FreeComplex, c: Chain) -> list[str]:
    """||y||^G <= ||x||^G + 2K||c|| and ||c||^G <= (||x||^G + 2K||c||)||c|| for x, y in supp c.

    Valid for connected c over a 1-separated ring.
    """
    k = K(cx, c.degree)
    n = cx.norm(c)
    wn = cx.weighted_norm(c)
    bad = []
    weights = {x: cx.cell_weight(x) for x in c.terms}
    lo, hi = min(weights.values(), default=0), max(weights.values(), default=0)
    if hi > lo + 2 * k * n:
        bad.append("pairwise weighted estimate fails")
    for x, w in weights.items():
        if wn > (w + 2 * k * n) * n:
            bad.append(f"weighted-to-plain estimate fails at {x}")
    return bad


def local_finiteness_bound(cx: FreeComplex, i: int) -> int:
    """|{g : l(g) <= 2K_i}| * |B_i|, an upper bound for the valence in Gr(Gamma B_i)."""
    return len(cx.group.ball(2 * K(cx, i))) * cx.rank(i)
