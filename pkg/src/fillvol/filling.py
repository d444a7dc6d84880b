"""Filling volumes, the brute-force oracle, fill-by-thickening and filling-function tables.

A filling of an (n-1)-cycle c is an n-chain b with d b = c.  Every solver
works on a finite set of candidate n-cells (a "window") and solves the
linear system d b = c restricted to it:

* over a finite field by Gauss-Jordan elimination plus a search of the
  affine solution space,
* over Z by column Hermite reduction plus branch and bound on the lattice of
  integer kernel vectors,
* over Q with denominators bounded by an explicit L, by rescaling to Z,
* over other finite rings by constraint-propagating depth first search.

Exact minima come from a certified window.  If UB is the norm of any filling
and the ring is eps-separated, every component of an optimal filling touches
the boundary, so it contains a cell of S(w) for some w in supp(c) and has at
most UB/eps cells.  All its cells then lie within support-graph distance
floor(UB/eps) - 1 of those seed cells.
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .chain_complex import Cell, Chain, FreeComplex
from .errors import (
    BudgetExceeded,
    DegreeError,
    DomainError,
    FillingNotFound,
    NoFillingExists,
    UnsupportedError,
)
from .linalg import enumerate_field_affine, f2_min_weight, min_cost_lattice_point, solve_field, solve_integer
from .normed_ring import Integers, Rationals, _discrete_factor, _homogeneous_factor, ring_ball
from .support_geometry import K, connected_components, gr_neighbors, neighbor_cells_above
from .thickening import BasisCollection, close_P, thicken_step

EXACT = "exact minimum"
UPPER = "upper bound only"


@dataclass(frozen=True)
class Budget:
    """Search limits.  ``box`` and ``window_radius`` override derived values."""

    j_cap: int = 20
    node_cap: int = 2_000_000
    enum_cap: int = 1 << 22
    support_cap: int = 20_000
    box: int | None = None
    window_radius: int | None = None
    denominator: int | None = None


@dataclass
class FillingProblem:
    cx: FreeComplex
    cycle: Chain
    weighted: bool = False
    budget: Budget = field(default_factory=Budget)

    def __post_init__(self):
        n = self.cycle.degree + 1
        if n > self.cx.top_degree:
            raise DegreeError(f"no cells in degree {n} to fill with")
        if self.cycle.degree >= 1 and not self.cx.is_cycle(self.cycle):
            raise DomainError("the chain to fill is not a cycle")

    @property
    def degree(self) -> int:
        return self.cycle.degree + 1

    def norm(self, b: Chain) -> Fraction:
        return self.cx.chain_norm(b, self.weighted)


@dataclass
class FillingResult:
    filling: Chain
    value: Fraction
    status: str
    trace: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status == EXACT


def _verified(p: FillingProblem, b: Chain, status: str, trace: dict) -> FillingResult:
    if p.cx.boundary(b) != p.cycle:
        raise AssertionError("internal error: computed chain does not fill the cycle")
    return FillingResult(b, p.norm(b), status, trace)


# -- ring classification -----------------------------------------------------------


def ring_class(cx: FreeComplex) -> str:
    R, norm = cx.ring.ring, cx.ring.norm
    if isinstance(R, Integers):
        if _homogeneous_factor(norm) is not None:
            return "integer"
        return "integer-other"
    if isinstance(R, Rationals):
        if _homogeneous_factor(norm) is not None:
            return "rational"
        return "rational-other"
    if R.is_finite:
        return "field" if R.is_field else "finite"
    return "other"


def _lambda(cx: FreeComplex) -> Fraction:
    return _homogeneous_factor(cx.ring.norm)


def _separation(cx: FreeComplex, denominator: int | None = None) -> Fraction | None:
    cls = ring_class(cx)
    if cls == "rational":
        return None if denominator is None else _lambda(cx) / denominator
    try:
        return cx.ring.separation
    except UnsupportedError:
        return None


# -- linear systems on a window ----------------------------------------------------


def _columns(cx: FreeComplex, cells: Sequence[Cell]) -> list[dict]:
    return [dict(cx.cell_boundary_terms(u)) for u in cells]


def _weights(cx: FreeComplex, cells: Sequence[Cell], weighted: bool) -> list[int]:
    return [cx.cell_weight(u) if weighted else 1 for u in cells]


def _to_chain(cx: FreeComplex, degree: int, cells: Sequence[Cell], x: Sequence) -> Chain:
    return cx.chain(degree, [(u, v) for u, v in zip(cells, x)])


@dataclass
class _SpaceSolution:
    chain: Chain
    minimal: bool  # minimal among fillings supported in the window
    info: dict


def _lcm_denominators(values: Iterable) -> int:
    L = 1
    for v in values:
        L = math.lcm(L, Fraction(v).denominator)
    return L


def solve_in_window(p: FillingProblem, cells: Sequence[Cell], minimize: bool = True,
                    upper: Fraction | None = None) -> _SpaceSolution | None:
    """A filling supported on ``cells`` (None if none exists there).

    With ``minimize`` the result has least norm among such fillings whenever
    ``minimal`` is set; otherwise it is just some filling.
    """
    cx, c, n = p.cx, p.cycle, p.degree
    cells = sorted(cells)
    if len(cells) > p.budget.support_cap:
        raise BudgetExceeded(f"window of {len(cells)} cells exceeds the support cap")
    cls = ring_class(cx)
    R = cx.ring.ring
    cols = _columns(cx, cells)
    rhs = dict(c.terms)
    w = _weights(cx, cells, p.weighted)
    info: dict = {"cells": len(cells), "ring_class": cls}
    if cls == "field":
        sol = solve_field(R, cols, rhs)
        if sol is None:
            return None
        info["kernel_dim"] = len(sol.kernel)
        if not minimize or not sol.kernel:
            return _SpaceSolution(_to_chain(cx, n, cells, sol.particular), not sol.kernel, info)
        nr = cx.ring
        try:
            if R.size == 2:
                weights = [nr.abs(R.one) * wi for wi in w]
                x, _ = f2_min_weight(sol.particular, sol.kernel, weights, p.budget.enum_cap)
            else:
                def cost(x):
                    return sum((nr.abs(v) * wi for v, wi in zip(x, w)), Fraction(0))
                x, _ = enumerate_field_affine(R, sol.particular, sol.kernel, cost, p.budget.enum_cap)
        except BudgetExceeded as exc:
            info["budget"] = str(exc)
            return _SpaceSolution(_to_chain(cx, n, cells, sol.particular), False, info)
        return _SpaceSolution(_to_chain(cx, n, cells, x), True, info)
    if cls in ("integer", "rational", "integer-other"):
        if cls == "rational":
            qsol = solve_field(R, cols, rhs)
            if qsol is None:
                return None
            L = p.budget.denominator or _lcm_denominators(list(rhs.values()) + list(qsol.particular))
            if any((Fraction(v) * L).denominator != 1 for v in rhs.values()):
                raise DomainError(f"denominator bound {L} does not cover the cycle")
            info["denominator"] = L
            zrhs = {k: int(Fraction(v) * L) for k, v in rhs.items()}
            zcols = [{k: int(v) for k, v in col.items()} for col in cols]
            zsol = solve_integer(zcols, zrhs)
            if zsol is None:
                return None
            scale = Fraction(1, L)
        else:
            L = 1
            zsol = solve_integer(cols, rhs)
            if zsol is None:
                return None
            scale = Fraction(1)
        info["kernel_dim"] = len(zsol.kernel)
        part = zsol.particular

        def back(x):
            return [Fraction(v) * scale if cls == "rational" else v for v in x]

        if not zsol.kernel:
            return _SpaceSolution(_to_chain(cx, n, cells, back(part)), True, info)
        if not minimize or cls == "integer-other":
            return _SpaceSolution(_to_chain(cx, n, cells, back(part)), False, info)
        lam = _lambda(cx) * scale
        weights = [lam * wi for wi in w]
        part_cost = sum((wt * abs(v) for wt, v in zip(weights, part)), Fraction(0))
        bound = part_cost if upper is None else min(part_cost, upper)
        # any point costing <= bound has |x_j| <= bound / weight_j
        box = int(bound / min(weights)) if weights else 0
        if p.budget.box is not None and L == 1:
            box = min(box, p.budget.box)
        info["box"] = box
        try:
            found = min_cost_lattice_point(part, zsol.kernel, weights, box, p.budget.node_cap, upper=bound)
        except BudgetExceeded as exc:
            info["budget"] = str(exc)
            return _SpaceSolution(_to_chain(cx, n, cells, back(part)), False, info)
        x = part if found is None else found[0]
        return _SpaceSolution(_to_chain(cx, n, cells, back(x)), True, info)
    if cls == "finite":
        values = {u: list(R.elements()) for u in cells}
        try:
            best = _dfs_minimum(p, cells, values)
        except BudgetExceeded as exc:
            info["budget"] = str(exc)
            raise
        if best is None:
            return None
        return _SpaceSolution(best, True, info)
    raise UnsupportedError(f"no solver for {cx.ring}")


# -- constraint-propagating depth first search ---------------------------------------


def _dfs(cx: FreeComplex, cells: Sequence[Cell], rhs: dict, values: dict, costs: Callable,
         state: dict, node_cap: int) -> Iterator[tuple[list, Fraction]]:
    """Yield assignments x (one value per cell) with sum x_j d(cells_j) = rhs.

    ``state['bound']`` caps the accumulated cost (strictly once
    ``state['strict']`` is set); callers may tighten it between yields.
    Each boundary row is checked as soon as its last incident cell is set.
    """
    R = cx.ring.ring
    n = len(cells)
    col_rows = [list(cx.cell_boundary_terms(u)) for u in cells]
    last: dict = {}
    for j, rows in enumerate(col_rows):
        for r, _ in rows:
            last[r] = j
    for r, v in rhs.items():
        if r not in last and not R.is_zero(v):
            return
    done_at: list[list] = [[] for _ in range(n)]
    for r, j in last.items():
        done_at[j].append(r)
    cand = []
    for j, u in enumerate(cells):
        vals = sorted(((costs(j, v), R.sort_key(v), v) for v in values[u]), key=lambda t: (t[0], t[1]))
        cand.append([(cv, v) for cv, _, v in vals])
    partial: dict = {}
    x: list = [None] * n
    acc = [Fraction(0)] * (n + 1)
    idx = [-1] * n
    nodes = 0
    j = 0

    def apply(j, v, sign):
        for r, a in col_rows[j]:
            t = R.mul(v, a)
            partial[r] = R.add(partial.get(r, R.zero), t if sign > 0 else R.neg(t))

    def over(total):
        b = state["bound"]
        if b is None:
            return False
        return total >= b if state["strict"] else total > b

    if n == 0:
        if all(R.is_zero(v) for v in rhs.values()):
            yield [], Fraction(0)
        return
    while j >= 0:
        if x[j] is not None:
            apply(j, x[j], -1)
            x[j] = None
        idx[j] += 1
        if idx[j] >= len(cand[j]):
            idx[j] = -1
            j -= 1
            continue
        cv, v = cand[j][idx[j]]
        total = acc[j] + cv
        if over(total):
            # candidates are sorted by cost, so the rest of this level is worse
            idx[j] = len(cand[j])
            continue
        nodes += 1
        if nodes > node_cap:
            raise BudgetExceeded(f"depth first search exceeded {node_cap} nodes")
        x[j] = v
        apply(j, v, +1)
        if any(not R.is_zero(R.sub(partial.get(r, R.zero), rhs.get(r, R.zero))) for r in done_at[j]):
            continue
        acc[j + 1] = total
        if j + 1 == n:
            yield list(x), total
            continue
        j += 1
        idx[j] = -1


def _dfs_minimum(p: FillingProblem, cells: Sequence[Cell], values: dict) -> Chain | None:
    cx = p.cx
    w = _weights(cx, cells, p.weighted)
    nr = cx.ring
    state = {"bound": None, "strict": False}
    best = None
    for x, cost in _dfs(cx, cells, dict(p.cycle.terms), values,
                        lambda j, v: nr.abs(v) * w[j], state, p.budget.node_cap):
        best = x
        state["bound"], state["strict"] = cost, True
    if best is None:
        return None
    return _to_chain(cx, p.degree, cells, best)


# -- windows -------------------------------------------------------------------------


def seed_cells(cx: FreeComplex, c: Chain) -> set[Cell]:
    """The union of S(w) over w in supp(c)."""
    out: set = set()
    for w in c.terms:
        out.update(neighbor_cells_above(cx, w))
    return out


def graph_ball(cx: FreeComplex, seeds: Iterable[Cell], radius: int, cap: int) -> list[Cell]:
    """Cells within distance ``radius`` of ``seeds`` in the full support graph."""
    dist = {s: 0 for s in seeds}
    queue = deque(sorted(dist))
    while queue:
        u = queue.popleft()
        if dist[u] >= radius:
            continue
        for v in gr_neighbors(cx, u):
            if v not in dist:
                dist[v] = dist[u] + 1
                if len(dist) > cap:
                    raise BudgetExceeded(f"window exceeds {cap} cells")
                queue.append(v)
    return sorted(dist)


def certified_radius(value: Fraction, eps: Fraction) -> int:
    return max(0, math.floor(value / eps) - 1)


def certified_window(p: FillingProblem, upper: Fraction) -> list[Cell]:
    """All n-cells that can occur in a filling of norm <= ``upper`` with no closed component."""
    cx = p.cx
    if cx.group.is_finite:
        return cx.all_cells(p.degree)
    eps = _separation(cx, p.budget.denominator)
    if eps is None:
        raise UnsupportedError("certified windows need a separated norm")
    return graph_ball(cx, seed_cells(cx, p.cycle), certified_radius(upper, eps), p.budget.support_cap)


# -- public solvers ---------------------------------------------------------------------


def fill_bruteforce(p: FillingProblem, cells: Sequence[Cell] | None = None) -> FillingResult:
    """Exhaustive oracle: depth first search over coefficient vectors on a window.

    Finite rings use all ring elements, Z the box [-B, B] and Q the multiples
    of 1/L in that box.  The answer is flagged exact when the searched space
    provably contains a minimal filling: the window covers the whole module
    or the certified window for the value found, and the box covers every
    coefficient a cheaper filling could have.
    """
    cx, c, n = p.cx, p.cycle, p.degree
    R = cx.ring.ring
    if c.is_zero():
        return FillingResult(cx.zero(n), Fraction(0), EXACT, {"solver": "bruteforce"})
    G = cx.group
    radius = None
    if cells is None:
        if G.is_finite:
            cells = cx.all_cells(n)
        else:
            radius = 2 if p.budget.window_radius is None else p.budget.window_radius
            cells = graph_ball(cx, seed_cells(cx, c), radius, p.budget.support_cap)
    cells = sorted(cells)
    whole = G.is_finite and len(cells) == len(cx.all_cells(n))
    cls = ring_class(cx)
    L = 1
    if R.is_finite:
        values = {u: list(R.elements()) for u in cells}
        box = None
    else:
        if cls not in ("integer", "rational"):
            raise UnsupportedError(f"no brute-force value set for {cx.ring}")
        if p.budget.box is None:
            raise DomainError("the brute-force oracle over Z or Q needs an explicit box")
        box = p.budget.box
        if cls == "rational":
            L = p.budget.denominator or _lcm_denominators(c.terms.values())
            vals = [Fraction(k, L) for k in range(-box * L, box * L + 1)]
        else:
            vals = list(range(-box, box + 1))
        values = {u: vals for u in cells}
    trace = {"solver": "bruteforce", "cells": len(cells), "box": box}
    if L != 1:
        trace["denominator"] = L
    best = _dfs_minimum(p, cells, values)
    if best is None:
        if whole and box is None:
            raise NoFillingExists("the cycle is not a boundary", trace)
        raise FillingNotFound("no filling inside the searched window", trace)
    value = p.norm(best)
    certified = True
    if box is not None:
        eps_coeff = _lambda(cx) / L
        # a cheaper filling has each |coefficient| <= value / lambda
        certified = box >= value / (_lambda(cx)) and eps_coeff > 0
    if not whole:
        eps = _separation(cx, L if cls == "rational" else None)
        if eps is None or radius is None:
            certified = certified and False
        else:
            certified = certified and radius >= certified_radius(value, eps)
    return _verified(p, best, EXACT if certified else UPPER, trace)


def fill_by_thickening(p: FillingProblem, j_cap: int | None = None, minimize: bool = True) -> FillingResult:
    """Solve d b = c inside N^{n,j}(supp c) for j = 0, 1, ... up to ``j_cap``."""
    cx, c, n = p.cx, p.cycle, p.degree
    j_cap = p.budget.j_cap if j_cap is None else j_cap
    if c.is_zero():
        return FillingResult(cx.zero(n), Fraction(0), EXACT, {"solver": "thicken", "a": 0, "D": 0})
    N = close_P(cx, BasisCollection.from_cells(c.terms))
    sizes = []
    for j in range(j_cap + 1):
        if j > 0:
            nxt = thicken_step(cx, N, n)
            saturated = nxt == N
            N = nxt
        else:
            saturated = False
        cells = sorted(N[n])
        sizes.append(len(cells))
        sol = solve_in_window(p, cells, minimize) if cells else None
        if sol is not None:
            whole = cx.group.is_finite and len(cells) == cx.rank(n) * cx.group.order
            trace = {"solver": "thicken", "a": j, "D": len(cells), "sizes": sizes, **sol.info}
            status = EXACT if whole and sol.minimal else UPPER
            return _verified(p, sol.chain, status, trace)
        if saturated:
            trace = {"solver": "thicken", "sizes": sizes, "saturated_at": j - 1}
            if cx.group.is_finite and len(cells) == cx.rank(n) * cx.group.order:
                raise NoFillingExists("the cycle is not a boundary", trace)
            raise FillingNotFound("thickening saturated without a filling", trace)
    raise FillingNotFound(f"no filling within {j_cap} thickening steps",
                          {"solver": "thicken", "sizes": sizes, "j_cap": j_cap})


def filling_volume(p: FillingProblem) -> FillingResult:
    """Minimal filling: thickening for an upper bound, then the certified window."""
    cx, c, n = p.cx, p.cycle, p.degree
    if c.is_zero():
        return FillingResult(cx.zero(n), Fraction(0), EXACT, {"solver": "exact"})
    ub = fill_by_thickening(p, minimize=True)
    if ub.exact:
        ub.trace["solver"] = "exact"
        return ub
    cls = ring_class(cx)
    if cls in ("integer-other", "rational-other", "other"):
        ub.trace["note"] = "no exact minimiser for this norm; thickening bound only"
        return ub
    if cls == "rational" and p.budget.denominator is None:
        L = _lcm_denominators(list(c.terms.values()) + list(ub.filling.terms.values()))
        p = replace(p, budget=replace(p.budget, denominator=L))
    window = certified_window(p, ub.value)
    sol = solve_in_window(p, window, True, upper=ub.value)
    if sol is None:
        raise AssertionError("certified window lost the known filling")
    trace = {"solver": "exact", "upper_bound": ub.value, "thickening": ub.trace, **sol.info}
    best = sol.chain if p.norm(sol.chain) <= ub.value else ub.filling
    return _verified(p, best, EXACT if sol.minimal else UPPER, trace)


def fv(cx: FreeComplex, c: Chain, weighted: bool = False, budget: Budget | None = None) -> Fraction:
    """Shorthand for the exact filling volume; raises if exactness is not reached."""
    res = filling_volume(FillingProblem(cx, c, weighted, budget or Budget()))
    if not res.exact:
        raise BudgetExceeded(f"only an upper bound {res.value} was reached")
    return res.value


# -- decomposition-based bounded filling --------------------------------------------------


@dataclass
class BoundedFilling:
    filling: Chain
    components: int
    bound_plain: Fraction | None
    bound_weighted: Fraction | None
    checked: str  # "table", "observed" or "inconclusive"
    component_values: list = field(default_factory=list)


def bounded_filling(cx: FreeComplex, c: Chain, wtable: "FillingFunctionTable | None" = None,
                    budget: Budget | None = None, filler: Callable | None = None) -> BoundedFilling:
    """Fill c component by component, each translated to the identity first.

    Returns y with d y = c.  The norm bounds ||y|| <= ||c|| A(||c||) and
    ||y||^G <= ||c|| ||c||^G A(||c||), A(x) = FV^G(x + 2 K x^2) + 1, are
    checked with A from ``wtable`` when it covers the argument, and otherwise
    with the observed component values (which bound FV^G from below).
    """
    budget = budget or Budget()
    n = c.degree + 1
    if c.is_zero():
        return BoundedFilling(cx.zero(n), 0, Fraction(0), Fraction(0), "observed")
    G = cx.group
    parts = []
    values = []
    for idx, comp in enumerate(connected_components(cx, c)):
        h = min(comp.terms).gamma
        shifted = cx.translate(G.inverse(h), comp)
        try:
            if filler is not None:
                y0 = filler(shifted)
                val = cx.weighted_norm(y0)
            else:
                res = filling_volume(FillingProblem(cx, shifted, True, budget))
                y0, val = res.filling, res.value
        except FillingNotFound as exc:
            exc.trace["component"] = idx
            raise
        parts.append(cx.translate(h, y0))
        values.append(val)
    y = cx.sum(n, parts)
    if cx.boundary(y) != c:
        raise AssertionError("bounded filling does not fill the cycle")
    x = cx.norm(c)
    xw = cx.weighted_norm(c)
    arg = x + 2 * K(cx, n - 1) * x * x
    A_obs = max(values) + 1
    checked = "observed"
    A = A_obs
    if wtable is not None:
        tv = wtable.lookup(arg)
        if tv is not None:
            A = max(A, tv + 1)
            checked = "table"
    ok = cx.norm(y) <= x * A and cx.weighted_norm(y) <= x * xw * A
    if not ok:
        if checked == "table":
            raise AssertionError("bounded filling violates its norm bound")
        checked = "inconclusive"
    return BoundedFilling(y, len(parts), x * A, x * xw * A, checked, values)


# -- filling-function tables ---------------------------------------------------------------------

STATUS_EXACT = "exact"
STATUS_LOWER = "lower-bound"
STATUS_PARTIAL = "partial"


@dataclass
class TableEntry:
    l: int
    value: Fraction
    status: str


@dataclass
class FillingFunctionTable:
    degree: int
    weighted: bool
    entries: list[TableEntry]
    info: dict = field(default_factory=dict)

    def value(self, l: int) -> Fraction:
        return self.entries[l].value

    def values(self) -> list[Fraction]:
        return [e.value for e in self.entries]

    @property
    def l_max(self) -> int:
        return len(self.entries) - 1

    @property
    def complete(self) -> bool:
        return all(e.status == STATUS_EXACT for e in self.entries)

    def lookup(self, x) -> Fraction | None:
        """Exact value at real x when covered; None beyond the table."""
        x = Fraction(x)
        if x < 0:
            return Fraction(0)
        sat = self.info.get("saturation")
        if sat is not None and x >= sat:
            return self.info["sup"]
        k = math.floor(x)
        if k > self.l_max:
            return None
        return self.entries[k].value

    def lower(self, x) -> Fraction:
        """A lower bound at x: the value at the largest sample point <= x."""
        v = self.lookup(x)
        if v is not None:
            return v
        return self.entries[-1].value

    def is_monotone(self) -> bool:
        vals = self.values()
        return all(a <= b for a, b in zip(vals, vals[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "value", "status"])
        for e in self.entries:
            w.writerow([e.l, _fmt(e.value), e.status])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "weighted": self.weighted,
            "entries": [{"l": e.l, "value": _fmt(e.value), "status": e.status} for e in self.entries],
        }


def _fmt(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("FILLVOL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _ball_values(cx: FreeComplex, l_max) -> list:
    R, norm = cx.ring.ring, cx.ring.norm
    return [v for v in ring_ball(R, norm, l_max) if not R.is_zero(v)]


def enumerate_cycles(cx: FreeComplex, cells: Sequence[Cell], bound: Fraction, weighted: bool,
                     values: list, exact_support: bool, node_cap: int) -> Iterator[tuple[Chain, Fraction]]:
    """Cycles supported in ``cells`` with (weighted) norm <= bound."""
    R = cx.ring.ring
    nr = cx.ring
    d = cells[0].degree if cells else 0
    vals = values if exact_support else [R.zero] + values
    w = _weights(cx, cells, weighted)
    state = {"bound": Fraction(bound), "strict": False}
    if d == 0:
        raise DegreeError("tables start at filling degree 2")
    for x, cost in _dfs(cx, list(cells), {}, {u: vals for u in cells},
                        lambda j, v: nr.abs(v) * w[j], state, node_cap):
        yield _to_chain(cx, d, cells, x), cost


def _rep_cycles(args) -> list[tuple[Chain, Fraction, Fraction | None, str]]:
    """Worker: every connected cycle supported exactly on one representative, with its FV."""
    cx, rep, l_max, budget = args
    out = []
    values = _ball_values(cx, l_max)
    try:
        for cyc, norm in enumerate_cycles(cx, list(rep), Fraction(l_max), False, values, True,
                                          budget.node_cap):
            try:
                res = filling_volume(FillingProblem(cx, cyc, False, budget))
                out.append((cyc, norm, res.value, STATUS_EXACT if res.exact else STATUS_LOWER))
            except (BudgetExceeded, FillingNotFound, UnsupportedError):
                out.append((cyc, norm, None, STATUS_PARTIAL))
    except BudgetExceeded:
        # every cycle on this support has norm >= |rep| * eps
        out.append((None, len(rep) * _separation(cx), None, STATUS_PARTIAL))
    return out


def _map(fn, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _knapsack_upper(D: list[Fraction]) -> list[Fraction]:
    """F(l) = max(D(l), max_a D(a) + F(l - a)): the max over partitions of l."""
    F = [Fraction(0)] * len(D)
    for l in range(1, len(D)):
        best = D[l]
        for a in range(1, l):
            best = max(best, D[a] + F[l - a])
        F[l] = best
    return F


def _adjacent(cx: FreeComplex, A: Iterable[Cell], B: set[Cell]) -> bool:
    for u in A:
        if u in B:
            return True
        for v in gr_neighbors(cx, u):
            if v in B:
                return True
    return False


def filling_function_table(cx: FreeComplex, n: int, l_max: int, mode: str = "orbit",
                           budget: Budget | None = None, workers: int | None = None) -> FillingFunctionTable:
    """FV^n(l) for l = 0..l_max (cycles in degree n-1, fillings in degree n).

    ``orbit`` mode enumerates connected cycles over orbit representatives of
    connected supports and combines them; ``full`` mode (finite groups) lists
    every cycle and fills it with the brute-force oracle.
    """
    from .thickening import orbit_representatives

    budget = budget or Budget()
    if n < 2 or n > cx.top_degree:
        raise DegreeError(f"filling degree must lie in 2..{cx.top_degree}")
    if l_max < 0:
        raise DomainError("l_max must be >= 0")
    if mode == "full":
        return _full_table(cx, n, l_max, budget)
    if mode != "orbit":
        raise DomainError(f"unknown table mode {mode!r}")
    eps = _separation(cx)
    if eps is None or eps <= 0:
        raise UnsupportedError("filling tables need a separated norm with finite balls")
    _ball_values(cx, l_max)  # raises when R_{<= l} is infinite
    s_max = math.floor(Fraction(l_max) / eps)
    reps = [r for r in orbit_representatives(cx, n - 1, s_max) if r]
    results = _map(_rep_cycles, [(cx, r, l_max, budget) for r in reps], worker_count(workers))
    connected = [rec for chunk in results for rec in chunk]
    integral = all(Fraction(nv).denominator == 1 for _, nv, _, _ in connected)
    D = [Fraction(0)] * (l_max + 1)
    partial_from = None
    lower_from = None
    for cyc, nv, val, st in connected:
        if st == STATUS_PARTIAL:
            k = math.ceil(nv)
            partial_from = k if partial_from is None else min(partial_from, k)
            continue
        if st == STATUS_LOWER:
            k = math.ceil(nv)
            lower_from = k if lower_from is None else min(lower_from, k)
        k = math.ceil(nv)
        if k <= l_max:
            D[k] = max(D[k], val)
    for l in range(1, l_max + 1):
        D[l] = max(D[l], D[l - 1])
    lower = list(D)
    upper = _knapsack_upper(D) if integral else None
    info = {"mode": "orbit", "representatives": len(reps), "connected_cycles": len(connected),
            "refined": 0}
    unresolved = [l for l in range(l_max + 1) if upper is None or upper[l] > lower[l]]
    if unresolved and cx.group.is_finite:
        info["refined"] = _refine_multicomponent(cx, n, l_max, connected, lower, budget)
        unresolved = []
    entries = []
    for l in range(l_max + 1):
        if partial_from is not None and l >= partial_from:
            st = STATUS_PARTIAL
        elif l in unresolved or (lower_from is not None and l >= lower_from):
            st = STATUS_LOWER
        else:
            st = STATUS_EXACT
        entries.append(TableEntry(l, lower[l], st))
    return FillingFunctionTable(n, False, entries, info)


def _refine_multicomponent(cx: FreeComplex, n: int, l_max: int, connected: list, lower: list,
                           budget: Budget) -> int:
    """Raise ``lower`` using cycles with several components (finite groups only).

    A cycle whose components sum to at most the current lower value cannot
    raise the table, so only the others are filled exactly.
    """
    G = cx.group
    comps = [(cyc, nv, val) for cyc, nv, val, st in connected if st != STATUS_PARTIAL and val is not None]
    comps.sort(key=lambda t: (t[1], t[0].items()))
    evaluated = 0
    seen: set = set()

    def raise_lower(norm: Fraction, val: Fraction):
        for l in range(math.ceil(norm), l_max + 1):
            if lower[l] < val:
                lower[l] = val

    def rec(start: int, placed: list, support: set, norm: Fraction, fvsum: Fraction, count: int):
        nonlocal evaluated
        if count >= 2:
            k = math.ceil(norm)
            if fvsum > lower[k]:
                total = cx.sum(n - 1, placed)
                key = tuple(sorted(total.items()))
                if key not in seen:
                    seen.add(key)
                    res = filling_volume(FillingProblem(cx, total, False, budget))
                    evaluated += 1
                    if not res.exact:
                        raise BudgetExceeded("multi-component refinement lost exactness")
                    raise_lower(norm, res.value)
        for idx in range(start, len(comps)):
            cyc, nv, val = comps[idx]
            if norm + nv > l_max:
                break
            translates = [G.identity] if count == 0 else G.elements()
            for g in translates:
                moved = cx.translate(g, cyc)
                cells = set(moved.terms)
                if count and _adjacent(cx, cells, support):
                    continue
                rec(idx, placed + [moved], support | cells, norm + nv, fvsum + val, count + 1)

    rec(0, [], set(), Fraction(0), Fraction(0), 0)
    return evaluated


def _full_table(cx: FreeComplex, n: int, l_max: int, budget: Budget) -> FillingFunctionTable:
    if not cx.group.is_finite:
        raise UnsupportedError("full enumeration needs a finite group")
    values = _ball_values(cx, l_max)
    cells = cx.all_cells(n - 1)
    best = [Fraction(0)] * (l_max + 1)
    status = STATUS_EXACT
    count = 0
    partial = False
    try:
        for cyc, norm in enumerate_cycles(cx, cells, Fraction(l_max), False, values, False, budget.node_cap):
            count += 1
            if cyc.is_zero():
                continue
            res = fill_bruteforce(FillingProblem(cx, cyc, False, budget))
            if not res.exact:
                status = STATUS_LOWER
            k = math.ceil(norm)
            best[k] = max(best[k], res.value)
    except BudgetExceeded:
        partial = True
    for l in range(1, l_max + 1):
        best[l] = max(best[l], best[l - 1])
    entries = [TableEntry(l, best[l], STATUS_PARTIAL if partial and l > 0 else status)
               for l in range(l_max + 1)]
    return FillingFunctionTable(n, False, entries, {"mode": "full", "cycles": count})


def weighted_filling_table(cx: FreeComplex, n: int, l_max: int, budget: Budget | None = None) -> FillingFunctionTable:
    """FV^{G,n}(l) by listing every cycle of weighted norm <= l_max.

    Weighted norm <= l forces 1 + l(g) <= l/eps on every cell, so the list is finite.
    """
    budget = budget or Budget()
    if n < 2 or n > cx.top_degree:
        raise DegreeError(f"filling degree must lie in 2..{cx.top_degree}")
    eps = _separation(cx)
    if eps is None or eps <= 0:
        raise UnsupportedError("weighted tables need a separated norm")
    values = _ball_values(cx, l_max)
    radius = math.floor(Fraction(l_max) / eps) - 1
    cells = cx.cells_within(n - 1, radius) if radius >= 0 else []
    best = [Fraction(0)] * (l_max + 1)
    status = STATUS_EXACT
    count = 0
    partial = False
    try:
        found = enumerate_cycles(cx, cells, Fraction(l_max), True, values, False, budget.node_cap) if cells else ()
        for cyc, wn in found:
            count += 1
            if cyc.is_zero():
                continue
            res = filling_volume(FillingProblem(cx, cyc, True, budget))
            if not res.exact:
                status = STATUS_LOWER
            k = math.ceil(wn)
            best[k] = max(best[k], res.value)
    except BudgetExceeded:
        partial = True
        status = STATUS_PARTIAL
    for l in range(1, l_max + 1):
        best[l] = max(best[l], best[l - 1])
    info = {"mode": "weighted", "cycles": count}
    if cx.group.is_finite and cx.ring.ring.is_finite and status == STATUS_EXACT:
        # every cycle has weighted norm <= the largest possible one, so the
        # table is constant from there on
        sat = _max_weighted_cycle_norm(cx, n, values)
        if sat is not None and sat <= l_max:
            info["saturation"] = sat
            info["sup"] = best[l_max]
    entries = [TableEntry(l, best[l], STATUS_PARTIAL if partial and l > 0 else status)
               for l in range(l_max + 1)]
    return FillingFunctionTable(n, True, entries, info)


def _max_weighted_cycle_norm(cx: FreeComplex, n: int, values: list) -> Fraction | None:
    R = cx.ring.ring
    allvals = [v for v in R.elements() if not R.is_zero(v)]
    if len(allvals) != len(values):
        return None
    cap = sum((max(cx.ring.abs(v) for v in allvals) * cx.cell_weight(u) for u in cx.all_cells(n - 1)),
              Fraction(0))
    return cap


def weighted_sup_table(cx: FreeComplex, n: int, budget: Budget | None = None) -> FillingFunctionTable:
    """Weighted table reaching saturation (finite group and finite ring)."""
    if not (cx.group.is_finite and cx.ring.ring.is_finite):
        raise UnsupportedError("saturation needs a finite group and a finite ring")
    values = [v for v in cx.ring.ring.elements() if not cx.ring.ring.is_zero(v)]
    cap = _max_weighted_cycle_norm(cx, n, values)
    return weighted_filling_table(cx, n, math.ceil(cap), budget)


# -- coarse comparison -------------------------------------------------------------------------


def preccurlyeq_witness(f: FillingFunctionTable | dict, g: FillingFunctionTable | dict,
                        C_max: int, D_max: int) -> tuple[int, int] | None:
    """Least (C, D) with f(v) <= C g(Cv + D) + Cv + D at every sample v of f.

    g off its samples is replaced by its value at the largest sample point not
    exceeding the argument (a lower bound for nondecreasing g), so a witness
    found here is a finite-sample witness only.
    """
    fs = _samples(f)
    gs = _samples(g)
    if not fs or not gs:
        raise DomainError("empty table")
    if max(fs) < min(gs) or min(fs) > max(gs):
        raise DomainError("tables do not overlap")
    gkeys = sorted(gs)

    def g_at(x):
        best = None
        for k in gkeys:
            if k <= x:
                best = gs[k]
            else:
                break
        return Fraction(0) if best is None else best

    for C in range(1, C_max + 1):
        for D in range(0, D_max + 1):
            if all(fv <= C * g_at(C * v + D) + C * v + D for v, fv in fs.items()):
                return C, D
    return None


def _samples(t) -> dict:
    if isinstance(t, FillingFunctionTable):
        return {e.l: e.value for e in t.entries}
    return {Fraction(k): Fraction(v) for k, v in dict(t).items()}


@dataclass
class PolyCheck:
    x: int
    fv: Fraction
    wfv: Fraction
    rhs_i: Fraction
    rhs_ii: Fraction
    ok_i: bool
    ok_ii: bool


def polynomial_equivalence_check(cx: FreeComplex, fv_table: FillingFunctionTable,
                                 wfv_table: FillingFunctionTable) -> list[PolyCheck]:
    """Check FV(x) <= x FV^G(x + 2K_{n-1} x^2) + 1 and FV^G(x) <= 3K_n (FV(x)+1)^2 + x (FV(x)+1).

    FV^G off the table is taken at the largest sample point below the
    argument, which only makes the first inequality harder to satisfy.
    Rows stop where FV^G is unknown; past saturation it is the sup.
    """
    n = fv_table.degree
    A = 2 * K(cx, n - 1)
    B = 3 * K(cx, n)
    out = []
    for x in range(fv_table.l_max + 1):
        f = fv_table.value(x)
        w = wfv_table.lookup(x)
        if w is None:
            break
        rhs_i = x * wfv_table.lower(x + A * x * x) + 1
        rhs_ii = B * (f + 1) ** 2 + x * (f + 1)
        out.append(PolyCheck(x, f, w, rhs_i, rhs_ii, f <= rhs_i, w <= rhs_ii))
    return out
