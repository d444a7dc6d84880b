"""Chain maps and homotopies induced by a quasi-isometry, with their constants.

Given a (K, K)-quasi-isometry f: G -> H with quasi-inverse h, and free
complexes LG, LH whose degrees 0 and 1 are Cayley graphs, we build

* f_0(g v) = f(g) v,
* f_1(g e_s) = the edge path along the lexicographically least geodesic from
  f(g) to f(gs),
* f_k(g b) = a bounded filling of f_{k-1}(d(g b)) for k >= 2,

the same for h, and a homotopy s with d s_i + s_{i-1} d = id - h_i f_i.
Images are computed lazily per cell and memoised, so on an infinite group
only the cells a computation touches are ever built.  Every identity and
every norm bound is checked on the working region (the whole complex for a
finite group, a word-length ball otherwise).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .chain_complex import Cell, Chain, FreeComplex
from .errors import DegreeError, DomainError, RegionError
from .filling import (
    UPPER,
    Budget,
    FillingFunctionTable,
    FillingProblem,
    FillingResult,
    bounded_filling,
    filling_volume,
    weighted_sup_table,
)
from .group_model import Group
from .support_geometry import K as K_const


@dataclass
class QuasiIsometryData:
    """f: G -> H and h: H -> G as finite tables, plus the constant K.

    ``radius`` bounds the sampled balls for infinite groups; finite groups
    are always tabulated and checked on every element.
    """

    source: Group
    target: Group
    K: int
    f: Mapping
    h: Mapping
    radius: int | None = None
    closeness: int = field(init=False, default=0)

    def __post_init__(self):
        if isinstance(self.K, bool) or not isinstance(self.K, int) or self.K < 1:
            raise DomainError(f"K must be a positive integer, got {self.K!r}")
        G, H = self.source, self.target
        self.f = {G.coerce(g): H.coerce(v) for g, v in dict(self.f).items()}
        self.h = {H.coerce(g): G.coerce(v) for g, v in dict(self.h).items()}
        dom_g = _domain(G, self.radius)
        dom_h = _domain(H, self.radius)
        for g in dom_g:
            if g not in self.f:
                raise DomainError(f"f is not defined at {g!r}")
        for g in dom_h:
            if g not in self.h:
                raise DomainError(f"h is not defined at {g!r}")
        _check_qi(G, H, self.f, dom_g, self.K, "f")
        _check_qi(H, G, self.h, dom_h, self.K, "h")
        worst = 0
        for g in dom_g:
            fg = self.f[g]
            if fg not in self.h:
                continue
            worst = max(worst, G.distance(self.h[fg], g))
        if worst > self.K:
            raise DomainError(f"h o f is only {worst}-close to the identity, K = {self.K}")
        self.closeness = worst

    @classmethod
    def from_functions(cls, source: Group, target: Group, K: int, f: Callable, h: Callable,
                       radius: int | None = None) -> "QuasiIsometryData":
        ftab = {g: f(g) for g in _domain(source, radius)}
        htab = {g: h(g) for g in _domain(target, radius)}
        return cls(source, target, K, ftab, htab, radius)

    @classmethod
    def identity(cls, source: Group, target: Group, K: int, radius: int | None = None) -> "QuasiIsometryData":
        """The identity on a common underlying set, e.g. one group with two generating sets."""
        return cls.from_functions(source, target, K, target.coerce, source.coerce, radius)

    def inverse(self) -> "QuasiIsometryData":
        return QuasiIsometryData(self.target, self.source, self.K, self.h, self.f, self.radius)

    def forward(self, g, cell: Cell | None = None):
        try:
            return self.f[g]
        except KeyError:
            raise RegionError(f"the map table does not cover {g!r}", cell) from None

    def back(self, g, cell: Cell | None = None):
        try:
            return self.h[g]
        except KeyError:
            raise RegionError(f"the quasi-inverse table does not cover {g!r}", cell) from None


def _domain(G: Group, radius: int | None) -> list:
    if G.is_finite:
        return list(G.elements())
    if radius is None:
        raise DomainError("infinite groups need a sampling radius")
    return G.ball(radius)


def _check_qi(G: Group, H: Group, f: Mapping, dom: list, K: int, label: str) -> None:
    for a, b in itertools.combinations(dom, 2):
        d = G.distance(a, b)
        e = H.distance(f[a], f[b])
        if e > K * d + K or d > K * e + K:
            raise DomainError(f"{label} violates the ({K}, {K}) inequalities at {a!r}, {b!r}")


def check_cayley_shape(cx: FreeComplex) -> None:
    """Degree 0 is one vertex and degree 1 has one edge e_s with d e_s = s v - v per generator."""
    G = cx.group
    R = cx.ring.ring
    if cx.top_degree < 1 or cx.rank(0) != 1 or cx.rank(1) != len(G.generators):
        raise DomainError("degrees 0 and 1 must form a Cayley graph")
    for b, s in enumerate(G.generators):
        want = sorted([(s, 0, R.one), (G.identity, 0, R.neg(R.one))])
        if s == G.identity or sorted(cx.basis_boundary(1, b)) != want:
            raise DomainError(f"edge {cx.bases[1][b]} is not the Cayley edge of generator {b + 1}")


def path_chain(cx: FreeComplex, start, moves: list[int]) -> Chain:
    """The 1-chain of the edge path from ``start`` along the generator moves."""
    G = cx.group
    R = cx.ring.ring
    terms = []
    p = start
    for m in moves:
        s = G.generator_move(m)
        if m > 0:
            terms.append((Cell(1, m - 1, p), R.one))
            p = G.multiply(p, s)
        else:
            p = G.multiply(p, s)
            terms.append((Cell(1, -m - 1, p), R.neg(R.one)))
    return cx.chain(1, terms)


def _region(cx: FreeComplex, i: int, radius: int | None) -> list[Cell]:
    if cx.group.is_finite:
        return cx.all_cells(i)
    if radius is None:
        raise DomainError("infinite groups need a region radius")
    return cx.cells_within(i, radius)


def _C(cx: FreeComplex, k: int) -> Fraction:
    """C_k = max ||d b|| over b in B_k."""
    return max((cx.norm(cx.boundary(cx.basis_chain(cx.cell(k, b, cx.group.identity))))
                for b in range(cx.rank(k))), default=Fraction(0))


def _M(cx: FreeComplex, k: int) -> Fraction:
    """M_k with ||d x||^G <= M_k ||x||^G: the largest weighted norm of a basis boundary, at least 1."""
    vals = [cx.weighted_norm(cx.boundary(cx.basis_chain(cx.cell(k, b, cx.group.identity))))
            for b in range(cx.rank(k))]
    return max([Fraction(1)] + vals)


class FillingConstants:
    """A^k(x) = FV^{G,k}(x + 2 K_{k-1} x^2) + 1 from weighted tables, when they cover x."""

    def __init__(self, cx: FreeComplex, tables: Mapping[int, FillingFunctionTable] | None = None,
                 budget: Budget | None = None):
        self.cx = cx
        self.tables = dict(tables or {})
        self.budget = budget or Budget()

    def table(self, k: int) -> FillingFunctionTable | None:
        if k not in self.tables:
            cx = self.cx
            if cx.group.is_finite and cx.ring.ring.is_finite and 2 <= k <= cx.top_degree:
                self.tables[k] = weighted_sup_table(cx, k, self.budget)
            else:
                self.tables[k] = None
        return self.tables[k]

    def A(self, k: int, x) -> Fraction | None:
        if x is None:
            return None
        t = self.table(k)
        if t is None:
            return None
        arg = Fraction(x) + 2 * K_const(self.cx, k - 1) * Fraction(x) ** 2
        v = t.lookup(arg)
        return None if v is None else v + 1


def _mul(*xs):
    out = Fraction(1)
    for x in xs:
        if x is None:
            return None
        out *= x
    return out


def _add(*xs):
    if any(x is None for x in xs):
        return None
    return sum(xs, Fraction(0))


def _fmt(q) -> str | None:
    if q is None:
        return None
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class PartialChainMap:
    """f_i: LG_i -> LH_i for i <= n, with proof constants D_i, D~_i and observed maxima."""

    def __init__(self, qi: QuasiIsometryData, LG: FreeComplex, LH: FreeComplex, n: int,
                 radius: int | None = None, consts_H: FillingConstants | None = None,
                 budget: Budget | None = None):
        self.qi, self.LG, self.LH, self.n = qi, LG, LH, n
        self.radius = radius
        self.budget = budget or Budget()
        self.consts_H = consts_H or FillingConstants(LH, budget=self.budget)
        self.images: dict[Cell, Chain] = {}
        self.fill_checks: dict[Cell, str] = {}
        self.D: list = []
        self.Dw: list = []
        self.observed_D: list = []
        self.observed_Dw: list = []
        self.identity_checks: list[int] = []
        self.bound_checks: list[str] = []
        self.region_sizes: list[int] = []

    def image(self, cell: Cell) -> Chain:
        if cell in self.images:
            return self.images[cell]
        i = cell.degree
        if i > self.n:
            raise DegreeError(f"the chain map is built only through degree {self.n}")
        LG, LH = self.LG, self.LH
        if i == 0:
            out = LH.basis_chain(Cell(0, 0, self.qi.forward(cell.gamma, cell)))
        elif i == 1:
            g = cell.gamma
            gs = LG.group.multiply(g, LG.group.generators[cell.basis])
            a, b = self.qi.forward(g, cell), self.qi.forward(gs, cell)
            out = path_chain(LH, a, LH.group.path(a, b))
        else:
            c = self.apply(LG.boundary(LG.basis_chain(cell)))
            bf = bounded_filling(LH, c, self.consts_H.table(i), self.budget)
            self.fill_checks[cell] = bf.checked
            out = bf.filling
        self.images[cell] = out
        return out

    def apply(self, x: Chain) -> Chain:
        LH = self.LH
        out = LH.zero(x.degree)
        for cell, a in x.items():
            out = LH.add(out, LH.scale(a, self.image(cell)))
        return out

    def build(self) -> "PartialChainMap":
        LG, LH, K = self.LG, self.LH, self.qi.K
        G, H = LG.group, LH.group
        one = LG.ring.unit_norm
        f_e = H.word_length(self.qi.forward(G.identity))
        for i in range(self.n + 1):
            region = _region(LG, i, self.radius)
            self.region_sizes.append(len(region))
            ok = 0
            obs, obsw = Fraction(0), Fraction(0)
            for cell in region:
                y = self.image(cell)
                if i >= 1:
                    if LH.boundary(y) != self.apply(LG.boundary(LG.basis_chain(cell))):
                        raise AssertionError(f"chain map identity fails at {LG.format_cell(cell)}")
                ok += 1
                obs = max(obs, LH.norm(y) / one)
                obsw = max(obsw, LH.weighted_norm(y) / (one * LG.cell_weight(cell)))
            self.identity_checks.append(ok)
            self.observed_D.append(obs)
            self.observed_Dw.append(obsw)
            if i == 0:
                D, Dw = Fraction(1), Fraction(2 * K + f_e)
            elif i == 1:
                K1 = K_const(LH, 1)
                D = Fraction(2 * K + 1)
                Dw = (2 * K + 1) * (self.Dw[0] + K1 + 4 * K * K1)
            else:
                x = _mul(self.D[i - 1], _C(LG, i))
                A = self.consts_H.A(i, x)
                D = _mul(x, A)
                Dw = _mul(_M(LG, i), self.Dw[i - 1], x, A)
            self.D.append(D)
            self.Dw.append(Dw)
            self.bound_checks.append(_bound_status(obs, D, obsw, Dw, i))
        return self

    def report(self) -> dict:
        return {
            "degrees": [
                {
                    "degree": i,
                    "region": self.region_sizes[i],
                    "identity_checks": self.identity_checks[i],
                    "D": _fmt(self.D[i]),
                    "D_weighted": _fmt(self.Dw[i]),
                    "observed_D": _fmt(self.observed_D[i]),
                    "observed_D_weighted": _fmt(self.observed_Dw[i]),
                    "bounds": self.bound_checks[i],
                }
                for i in range(len(self.D))
            ],
        }


def _bound_status(obs, C, obsw, Cw, i) -> str:
    if C is None or Cw is None:
        return "inconclusive"
    if obs > C or obsw > Cw:
        raise AssertionError(f"degree {i}: observed ratio exceeds the proof constant")
    return "pass"


def build_chain_map(qi: QuasiIsometryData, LG: FreeComplex, LH: FreeComplex, n: int,
                    radius: int | None = None, consts_H: FillingConstants | None = None,
                    budget: Budget | None = None) -> PartialChainMap:
    """f_0, ..., f_n with the chain map identity and norm bounds checked on the region."""
    if LG.group != qi.source or LH.group != qi.target:
        raise DomainError("complexes do not match the groups of the quasi-isometry")
    if LG.ring != LH.ring:
        raise DomainError("both complexes must use the same normed ring")
    check_cayley_shape(LG)
    check_cayley_shape(LH)
    if n < 0 or n > min(LG.top_degree, LH.top_degree):
        raise DegreeError(f"degree {n} not available in both complexes")
    return PartialChainMap(qi, LG, LH, n, radius, consts_H, budget).build()


class PartialHomotopy:
    """s_i: LG_i -> LG_{i+1} for i <= n-1 with d s_i + s_{i-1} d = id - h_i f_i."""

    def __init__(self, qi: QuasiIsometryData, f_map: PartialChainMap, h_map: PartialChainMap,
                 LG: FreeComplex, n: int, consts_G: FillingConstants | None = None,
                 budget: Budget | None = None):
        self.qi, self.f_map, self.h_map, self.LG, self.n = qi, f_map, h_map, LG, n
        self.budget = budget or Budget()
        self.consts_G = consts_G or FillingConstants(LG, budget=self.budget)
        self.images: dict[Cell, Chain] = {}
        self.E: list = []
        self.Ew: list = []
        self.F: list = []
        self.observed_E: list = []
        self.observed_Ew: list = []
        self.identity_checks: list[int] = []
        self.bound_checks: list[str] = []

    def hf(self, x: Chain) -> Chain:
        return self.h_map.apply(self.f_map.apply(x))

    def image(self, cell: Cell) -> Chain:
        if cell in self.images:
            return self.images[cell]
        LG = self.LG
        i = cell.degree
        if i >= self.n:
            raise DegreeError(f"the homotopy is built only through degree {self.n - 1}")
        G = LG.group
        if i == 0:
            g = cell.gamma
            target = self.qi.back(self.qi.forward(g, cell), cell)
            # d s_0(g) = g - h f(g): the reversed path from g to h f(g)
            out = LG.neg(path_chain(LG, g, G.path(g, target)))
        else:
            x = LG.basis_chain(cell)
            c = LG.sub(LG.sub(x, self.hf(x)), self.apply(LG.boundary(x)))
            bf = bounded_filling(LG, c, self.consts_G.table(i + 1), self.budget)
            out = bf.filling
        self.images[cell] = out
        return out

    def apply(self, x: Chain) -> Chain:
        LG = self.LG
        out = LG.zero(x.degree + 1)
        for cell, a in x.items():
            out = LG.add(out, LG.scale(a, self.image(cell)))
        return out

    def build(self) -> "PartialHomotopy":
        LG, K = self.LG, self.qi.K
        one = LG.ring.unit_norm
        D, Dw = self.f_map.D, self.f_map.Dw
        Dp, Dpw = self.h_map.D, self.h_map.Dw
        for i in range(self.n):
            region = _region(LG, i, self.f_map.radius)
            ok = 0
            obs, obsw = Fraction(0), Fraction(0)
            for cell in region:
                x = LG.basis_chain(cell)
                y = self.image(cell)
                lhs = LG.boundary(y)
                if i >= 1:
                    lhs = LG.add(lhs, self.apply(LG.boundary(x)))
                if lhs != LG.sub(x, self.hf(x)):
                    raise AssertionError(f"homotopy identity fails at {LG.format_cell(cell)}")
                ok += 1
                obs = max(obs, LG.norm(y) / one)
                obsw = max(obsw, LG.weighted_norm(y) / (one * LG.cell_weight(cell)))
            self.identity_checks.append(ok)
            self.observed_E.append(obs)
            self.observed_Ew.append(obsw)
            if i == 0:
                K1 = K_const(LG, 1)
                F = None
                E = Fraction(K)
                Ew = Fraction(K * (1 + K1 + 2 * K1 * (K - 1)))
            else:
                F = _add(one, _mul(Dp[i], D[i], one), _mul(self.E[i - 1], _C(LG, i)))
                A = self.consts_G.A(i + 1, F)
                E = _mul(F, A)
                Ew = _mul(E, _add(one, _mul(Dw[i], Dpw[i], one), _mul(self.Ew[i - 1], _M(LG, i))))
            self.F.append(F)
            self.E.append(E)
            self.Ew.append(Ew)
            self.bound_checks.append(_bound_status(obs, E, obsw, Ew, i))
        return self

    def report(self) -> dict:
        return {
            "degrees": [
                {
                    "degree": i,
                    "identity_checks": self.identity_checks[i],
                    "F": _fmt(self.F[i]),
                    "E": _fmt(self.E[i]),
                    "E_weighted": _fmt(self.Ew[i]),
                    "observed_E": _fmt(self.observed_E[i]),
                    "observed_E_weighted": _fmt(self.observed_Ew[i]),
                    "bounds": self.bound_checks[i],
                }
                for i in range(len(self.E))
            ],
        }


def build_homotopy(qi: QuasiIsometryData, f_map: PartialChainMap, h_map: PartialChainMap,
                   LG: FreeComplex, n: int, consts_G: FillingConstants | None = None,
                   budget: Budget | None = None) -> PartialHomotopy:
    """s_0, ..., s_{n-1}; needs f_map through n-1 and h_map through n-1 (h_n for transfers)."""
    if f_map.LG is not LG or h_map.LH is not LG:
        raise DomainError("the chain maps must start and end at LG")
    if n < 1 or n > min(f_map.n, h_map.n):
        raise DegreeError("the homotopy degree exceeds the chain maps")
    return PartialHomotopy(qi, f_map, h_map, LG, n, consts_G, budget).build()


def qi_transfer_filling(qi: QuasiIsometryData, f_map: PartialChainMap, h_map: PartialChainMap,
                        s: PartialHomotopy, z: Chain, budget: Budget | None = None) -> FillingResult:
    """Fill z in LG by filling f(z) in LH and pulling back: y = h_n(b) + s_{n-1}(z).

    The norm is checked against D'_n (||b|| + 1) + E_{n-1} ||z||; since b is
    a minimal filling of f_{n-1}(z) and ||f_{n-1}(z)|| <= D_{n-1} ||z||,
    this implies the bound with FV_H(D_{n-1} ||z||).
    """
    LG, LH = f_map.LG, f_map.LH
    n = z.degree + 1
    if z.is_zero():
        return FillingResult(LG.zero(n), Fraction(0), UPPER, {"solver": "qi-transfer"})
    if n > h_map.n or n > s.n:
        raise DegreeError(f"transfer into degree {n} needs h_{n} and s_{n - 1}")
    fz = f_map.apply(z)
    res = filling_volume(FillingProblem(LH, fz, False, budget or Budget()))
    b = res.filling
    y = LG.add(h_map.apply(b), s.apply(z))
    if LG.boundary(y) != z:
        raise AssertionError("transferred chain does not fill the cycle")
    value = LG.norm(y)
    Dp, E = h_map.D[n], s.E[n - 1]
    bound = _add(_mul(Dp, _add(res.value, Fraction(1))), _mul(E, LG.norm(z)))
    trace = {
        "solver": "qi-transfer",
        "fv_target": res.value,
        "fv_target_exact": res.exact,
        "image_norm": LH.norm(fz),
        "image_bound": _mul(f_map.D[n - 1], LG.norm(z)),
        "bound": bound,
    }
    if bound is None:
        trace["bound_check"] = "inconclusive"
    else:
        if value > bound or LH.norm(fz) > trace["image_bound"]:
            raise AssertionError("transferred filling exceeds its bound")
        trace["bound_check"] = "pass"
    return FillingResult(y, value, UPPER, trace)


def transfer_setup(qi: QuasiIsometryData, LG: FreeComplex, LH: FreeComplex, n: int,
                   radius: int | None = None, budget: Budget | None = None):
    """f through n-1, h through n and s through n-1: everything needed to fill (n-1)-cycles of LG."""
    budget = budget or Budget()
    cG = FillingConstants(LG, budget=budget)
    cH = FillingConstants(LH, budget=budget)
    f_map = build_chain_map(qi, LG, LH, n, radius, cH, budget)
    h_map = build_chain_map(qi.inverse(), LH, LG, n, radius, cG, budget)
    s = build_homotopy(qi, f_map, h_map, LG, n, cG, budget)
    return f_map, h_map, s
