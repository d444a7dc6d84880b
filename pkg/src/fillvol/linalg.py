"""Exact linear algebra over fields and over Z.

Matrices are sparse and column oriented: a matrix is a list of columns, each
column a ``dict`` mapping a hashable row key to a nonzero entry.  Vectors over
the column index set are plain lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import BudgetExceeded, UnsupportedError
from .normed_ring import Integers, Ring


@dataclass
class AffineSolution:
    """Solutions ``particular + span(kernel)`` of ``A x = rhs``.

    Over Z the kernel is a Z-basis of the integer kernel lattice.
    """

    particular: list
    kernel: list[list]


def _ordered_rows(columns: Sequence[dict], rhs: dict) -> list:
    keys = set(rhs)
    for col in columns:
        keys.update(col)
    try:
        return sorted(keys)
    except TypeError:
        return sorted(keys, key=repr)


def solve_field(ring: Ring, columns: Sequence[dict], rhs: dict) -> AffineSolution | None:
    """Gauss-Jordan elimination over a field; None when inconsistent."""
    if not ring.is_field:
        raise UnsupportedError(f"{ring} is not a field")
    n = len(columns)
    zero = ring.zero
    row_keys = _ordered_rows(columns, rhs)
    rows: list[dict[int, object]] = []
    rhs_vals = []
    index = {k: i for i, k in enumerate(row_keys)}
    for _ in row_keys:
        rows.append({})
        rhs_vals.append(zero)
    for j, col in enumerate(columns):
        for k, v in col.items():
            if not ring.is_zero(v):
                rows[index[k]][j] = v
    for k, v in rhs.items():
        rhs_vals[index[k]] = v

    pivots: list[tuple[int, int]] = []  # (row position, column)
    col_rows: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        for j in row:
            col_rows.setdefault(j, set()).add(r)
    used_rows: set[int] = set()
    for j in range(n):
        cands = [r for r in col_rows.get(j, ()) if r not in used_rows]
        if not cands:
            continue
        pr = min(cands, key=lambda r: (len(rows[r]), r))
        used_rows.add(pr)
        prow = rows[pr]
        inv = ring.inv(prow[j])
        if inv != ring.one:
            for c in list(prow):
                prow[c] = ring.mul(inv, prow[c])
            rhs_vals[pr] = ring.mul(inv, rhs_vals[pr])
        for r in list(col_rows[j]):
            if r == pr:
                continue
            row = rows[r]
            factor = row[j]
            for c, v in prow.items():
                nv = ring.sub(row.get(c, zero), ring.mul(factor, v))
                if ring.is_zero(nv):
                    if c in row:
                        del row[c]
                        col_rows[c].discard(r)
                else:
                    if c not in row:
                        col_rows.setdefault(c, set()).add(r)
                    row[c] = nv
            rhs_vals[r] = ring.sub(rhs_vals[r], ring.mul(factor, rhs_vals[pr]))
        pivots.append((pr, j))
    for r in range(len(rows)):
        if r not in used_rows and not ring.is_zero(rhs_vals[r]):
            return None
    pivot_cols = {j: r for r, j in pivots}
    particular = [zero] * n
    for j, r in pivot_cols.items():
        particular[j] = rhs_vals[r]
    kernel = []
    for f in range(n):
        if f in pivot_cols:
            continue
        vec = [zero] * n
        vec[f] = ring.one
        for j, r in pivot_cols.items():
            v = rows[r].get(f)
            if v is not None:
                vec[j] = ring.neg(v)
        kernel.append(vec)
    return AffineSolution(particular, kernel)


def field_rank(ring: Ring, columns: Sequence[dict]) -> int:
    sol = solve_field(ring, columns, {})
    assert sol is not None
    return len(columns) - len(sol.kernel)


def solve_integer(columns: Sequence[dict], rhs: dict) -> AffineSolution | None:
    """Integer solutions of ``A x = rhs`` via column Hermite reduction.

    Unimodular column operations bring A to echelon form H = A U.  Solving
    H y = rhs is forward substitution with divisibility checks, and the zero
    columns of H give a Z-basis of the kernel as columns of U.
    """
    n = len(columns)
    cols = [{k: int(v) for k, v in c.items() if v} for c in columns]
    trans = [{j: 1} for j in range(n)]  # U, column j as sparse dict
    row_keys = _ordered_rows(columns, rhs)
    incidence: dict = {}
    for j, c in enumerate(cols):
        for k in c:
            incidence.setdefault(k, set()).add(j)
    live = set(range(n))
    pivot_of_row: dict = {}

    def axpy(dst: int, src: int, q: int) -> None:
        """col[dst] += q * col[src] (and the same on U)."""
        if q == 0:
            return
        d, s = cols[dst], cols[src]
        for k, v in s.items():
            nv = d.get(k, 0) + q * v
            if nv:
                if k not in d:
                    incidence.setdefault(k, set()).add(dst)
                d[k] = nv
            elif k in d:
                del d[k]
                incidence[k].discard(dst)
        td, ts = trans[dst], trans[src]
        for k, v in ts.items():
            nv = td.get(k, 0) + q * v
            if nv:
                td[k] = nv
            elif k in td:
                del td[k]

    for key in row_keys:
        while True:
            cands = [j for j in incidence.get(key, ()) if j in live]
            if not cands:
                break
            if len(cands) == 1:
                p = cands[0]
                if cols[p][key] < 0:
                    for k in cols[p]:
                        cols[p][k] = -cols[p][k]
                    for k in trans[p]:
                        trans[p][k] = -trans[p][k]
                pivot_of_row[key] = p
                live.discard(p)
                break
            p = min(cands, key=lambda j: (abs(cols[j][key]), len(cols[j]), j))
            a = cols[p][key]
            for j in cands:
                if j != p:
                    axpy(j, p, -(cols[j][key] // a))
    residual = {k: int(v) for k, v in rhs.items() if v}
    y: dict[int, int] = {}
    for key in row_keys:
        val = residual.get(key, 0)
        p = pivot_of_row.get(key)
        if p is None:
            if val:
                return None
            continue
        if not val:
            continue
        a = cols[p][key]
        if val % a:
            return None
        q = val // a
        y[p] = q
        for k, v in cols[p].items():
            nv = residual.get(k, 0) - q * v
            if nv:
                residual[k] = nv
            else:
                residual.pop(k, None)
    particular = [0] * n
    for p, q in y.items():
        for k, v in trans[p].items():
            particular[k] += q * v
    kernel = []
    for j in sorted(live):
        if cols[j]:
            continue
        vec = [0] * n
        for k, v in trans[j].items():
            vec[k] = v
        kernel.append(vec)
    return AffineSolution(particular, kernel)


def integer_row_echelon(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite echelon form of an integer matrix (zero rows dropped).

    Every returned row has a positive leading entry strictly to the right of
    the previous row's leading entry.
    """
    work = [list(r) for r in rows if any(r)]
    if not work:
        return []
    ncols = len(work[0])
    out = []
    for c in range(ncols):
        while True:
            nz = [r for r in work if r[c]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda r: abs(r[c]))
            for r in nz:
                if r is not piv:
                    q = r[c] // piv[c]
                    for t in range(c, ncols):
                        r[t] -= q * piv[t]
        nz = [r for r in work if r[c]]
        if nz:
            piv = nz[0]
            if piv[c] < 0:
                piv[:] = [-v for v in piv]
            out.append(piv)
            work = [r for r in work if r is not piv and any(r)]
        if not work:
            break
    return out


def spans_integer_lattice(vectors: Sequence[Sequence[int]], dim: int) -> bool:
    """True when ``vectors`` generate Z^dim as a group."""
    ech = integer_row_echelon(vectors)
    return len(ech) == dim and all(r[i] == 1 for i, r in enumerate(ech))


def min_cost_lattice_point(
    particular: Sequence[int],
    kernel: Sequence[Sequence[int]],
    weights: Sequence[Fraction],
    box: int,
    node_cap: int = 2_000_000,
    upper: Fraction | None = None,
) -> tuple[list[int], Fraction] | None:
    """Minimise sum w_j |x_j| over x = particular + Z-span(kernel) with |x_j| <= box.

    The kernel basis is put in row echelon form so that the coordinate at the
    t-th pivot depends only on the first t multipliers; each multiplier then
    ranges over a finite interval forced by the box.  Branch and bound on the
    cost of the already determined coordinates.  Points costing more than
    ``upper`` are never returned.
    """
    n = len(particular)
    ech = integer_row_echelon([list(k) for k in kernel])
    pivots = [next(i for i, v in enumerate(r) if v) for r in ech]
    d = len(ech)
    best: list = [None, None]
    nodes = [0]

    def cost(x, lo, hi):
        return sum(weights[i] * abs(x[i]) for i in range(lo, hi))

    def feasible(x, lo, hi):
        return all(abs(x[i]) <= box for i in range(lo, hi))

    def rec(t: int, x: list[int], acc: Fraction):
        nodes[0] += 1
        if nodes[0] > node_cap:
            raise BudgetExceeded("lattice enumeration node cap exceeded")
        # coordinates in [lo, hi) become final once t multipliers are fixed
        lo = pivots[t - 1] if t > 0 else 0
        hi = pivots[t] if t < d else n
        if not feasible(x, lo, hi):
            return
        acc = acc + cost(x, lo, hi)
        if best[1] is not None and acc >= best[1]:
            return
        if upper is not None and acc > upper:
            return
        if t == d:
            best[0], best[1] = list(x), acc
            return
        row = ech[t]
        p = pivots[t]
        a = row[p]
        # need |x_p + m a| <= box
        lo_m = -((box + x[p]) // a)
        hi_m = (box - x[p]) // a
        ms = sorted(range(lo_m, hi_m + 1), key=lambda m: (abs(x[p] + m * a), m))
        for m in ms:
            if m == 0:
                rec(t + 1, x, acc)
            else:
                y = [xi + m * ri for xi, ri in zip(x, row)]
                rec(t + 1, y, acc)

    rec(0, list(particular), Fraction(0))
    if best[0] is None:
        return None
    return best[0], best[1]


def enumerate_field_affine(
    ring: Ring,
    particular: Sequence,
    kernel: Sequence[Sequence],
    cost: Callable[[Sequence], Fraction],
    cap: int,
) -> tuple[list, Fraction]:
    """Exhaustive minimisation of ``cost`` over a finite affine space."""
    elems = ring.elements()
    total = len(elems) ** len(kernel)
    if total > cap:
        raise BudgetExceeded(f"affine space of size {total} exceeds cap {cap}")
    best_x, best_c = list(particular), cost(particular)
    if not kernel:
        return best_x, best_c
    # mixed-radix counter; exactly one digit changes per step, so x is
    # updated by a single kernel vector multiple
    seq = list(elems)
    digits = [0] * len(kernel)
    x = list(particular)
    while True:
        t = 0
        while t < len(digits):
            old = seq[digits[t]]
            digits[t] = (digits[t] + 1) % len(seq)
            delta = ring.sub(seq[digits[t]], old)
            x = [ring.add(xi, ring.mul(delta, ki)) for xi, ki in zip(x, kernel[t])]
            if digits[t] != 0:
                break
            t += 1
        if t == len(digits):
            break
        c = cost(x)
        if c < best_c:
            best_x, best_c = list(x), c
    return best_x, best_c


def f2_min_weight(
    particular: Sequence[int], kernel: Sequence[Sequence[int]], weights: Sequence[Fraction], cap: int
) -> tuple[list[int], Fraction]:
    """Minimum weight point of a coset over F_2 using bitmasks and a Gray code."""
    n = len(particular)
    d = len(kernel)
    if 2**d > cap:
        raise BudgetExceeded(f"affine space of size 2^{d} exceeds cap {cap}")

    def mask(v):
        m = 0
        for i, b in enumerate(v):
            if b % 2:
                m |= 1 << i
        return m

    classes: dict[Fraction, int] = {}
    for i, w in enumerate(weights):
        classes[w] = classes.get(w, 0) | (1 << i)
    cls = list(classes.items())

    def cost(m):
        return sum(w * bin(m & cm).count("1") for w, cm in cls)

    x = mask(particular)
    kms = [mask(k) for k in kernel]
    best_m, best_c = x, cost(x)
    for step in range(1, 2**d):
        bit = (step & -step).bit_length() - 1
        x ^= kms[bit]
        c = cost(x)
        if c < best_c:
            best_m, best_c = x, c
    return [(best_m >> i) & 1 for i in range(n)], best_c


def is_integer_ring(ring: Ring) -> bool:
    return isinstance(ring, Integers)
