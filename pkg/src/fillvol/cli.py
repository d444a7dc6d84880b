"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 budget exhausted or
inconclusive, 3 input error.  All output is deterministic: JSON is written
with sorted keys and rationals are rendered as ``p/q`` strings.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from .chain_complex import BUILTINS, Chain, FreeComplex, builtin_complex, commutator_cycle, load_complex, save_complex
from .errors import (
    BoundarySquareError,
    BudgetExceeded,
    DomainError,
    FillingNotFound,
    FillvolError,
    NoFillingExists,
    RegionError,
    SchemaError,
    UnsupportedError,
)
from .filling import (
    STATUS_PARTIAL,
    Budget,
    FillingProblem,
    fill_bruteforce,
    fill_by_thickening,
    filling_function_table,
    filling_volume,
    weighted_filling_table,
)
from .normed_ring import check_norm_axioms, random_elements
from .qi_transfer import QuasiIsometryData, build_chain_map, build_homotopy, FillingConstants
from .support_geometry import build_gr
from .thickening import BasisCollection, exhaustion_conditions, thickening_chain

OK, VERIFY_FAIL, INCONCLUSIVE, INPUT_ERROR = 0, 1, 2, 3


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def _dump(obj, out) -> None:
    out.write(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")


def _fmt(q) -> str:
    return _jsonable(Fraction(q))


# -- argument parsing helpers -----------------------------------------------------


def parse_complex(text: str) -> FreeComplex:
    """A file path or ``builtin:NAME[:key=val,...]``."""
    if text.startswith("builtin:"):
        _, _, rest = text.partition(":")
        name, _, params = rest.partition(":")
        kwargs = {}
        for item in filter(None, params.split(",")):
            key, eq, val = item.partition("=")
            if not eq:
                raise DomainError(f"builtin parameter {item!r} is not key=value")
            kwargs[key.strip()] = val.strip()
        return builtin_complex(name, **kwargs)
    return load_complex(text)


def parse_cycle(cx: FreeComplex, text: str) -> Chain:
    """JSON chain (file or inline), ``commutator:n[:r]`` or ``boundary:DEG:cell``."""
    if text.startswith("commutator:"):
        parts = text.split(":")
        n = int(parts[1])
        r = Fraction(parts[2]) if len(parts) > 2 else None
        if r is not None and r.denominator == 1:
            r = r.numerator
        return commutator_cycle(n, cx, r)
    if text.startswith("boundary:"):
        _, deg, cell = text.split(":", 2)
        return cx.boundary(cx.basis_chain(cx.parse_cell(int(deg), cell)))
    if text.lstrip().startswith("{"):
        data = json.loads(text)
    else:
        data = json.loads(Path(text).read_text(encoding="utf-8"))
    return cx.chain_from_json(data)


def _budget(args) -> Budget:
    kw = {}
    for name in ("j_cap", "node_cap", "box", "window_radius", "denominator"):
        v = getattr(args, name, None)
        if v is not None:
            if v <= 0 and name != "window_radius":
                raise DomainError(f"--{name.replace('_', '-')} must be positive")
            kw[name] = v
    return Budget(**kw)


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# -- commands -----------------------------------------------------------------------


def cmd_check(args, out) -> int:
    try:
        cx = parse_complex(args.complex)
    except BoundarySquareError as exc:
        _dump({"ok": False, "d_squared": "fail", "cell": exc.cell, "message": str(exc)}, out)
        return VERIFY_FAIL
    report = {
        "name": cx.name,
        "ring": str(cx.ring),
        "ranks": [cx.rank(i) for i in range(cx.top_degree + 1)],
        "d_squared": "pass",
    }
    R, norm = cx.ring.ring, cx.ring.norm
    if R.is_finite:
        problems = check_norm_axioms(R, norm)
    else:
        rng = random.Random(0)
        xs = random_elements(R, 2000, rng)
        problems = check_norm_axioms(R, norm, list(zip(xs[::2], xs[1::2])))
    report["norm_axioms"] = "pass" if not problems else problems[:5]
    ex = exhaustion_conditions(cx, cx.top_degree, radius=args.radius)
    report["exhaustion"] = ex.to_json()
    ok = not problems and not ex.failed
    report["ok"] = ok
    _dump(report, out)
    return OK if ok else VERIFY_FAIL


def _cells_arg(cx: FreeComplex, degree: int, text: str | None):
    if not text:
        return None
    return [cx.parse_cell(degree, t) for t in text.split(";") if t.strip()]


def cmd_graph(args, out) -> int:
    cx = parse_complex(args.complex)
    cells = _cells_arg(cx, args.degree, args.cells)
    if cells is None:
        cells = cx.all_cells(args.degree) if cx.group.is_finite else cx.cells_within(args.degree, args.radius)
    g = build_gr(cx, cells)
    _dump({
        "degree": args.degree,
        "summary": g.summary(),
        "adjacency": {cx.format_cell(u): [cx.format_cell(v) for v in g.adjacency[u]] for u in g.vertices},
    }, out)
    return OK


def cmd_thicken(args, out) -> int:
    cx = parse_complex(args.complex)
    cells = _cells_arg(cx, args.degree, args.cells)
    if not cells:
        raise DomainError("--cells must name at least one cell")
    run = thickening_chain(cx, BasisCollection.from_cells(cells), args.k, args.steps)
    out.write("step," + ",".join(f"n{i}" for i in range(args.k + 1)) + "\n")
    for j, counts in enumerate(run.counts(args.k)):
        out.write(f"{j}," + ",".join(str(c) for c in counts) + "\n")
    out.write(f"# saturated_at={run.saturated_at if run.saturated_at is not None else 'none'}\n")
    return OK


def cmd_fv(args, out) -> int:
    cx = parse_complex(args.complex)
    z = parse_cycle(cx, args.cycle)
    p = FillingProblem(cx, z, args.norm == "weighted", _budget(args))
    if args.solver == "oracle":
        res = fill_bruteforce(p)
    elif args.solver == "thicken":
        res = fill_by_thickening(p)
    else:
        res = filling_volume(p)
    _dump({
        "cycle_norm": cx.chain_norm(z, p.weighted),
        "value": res.value,
        "status": res.status,
        "filling": cx.chain_to_json(res.filling),
        "trace": res.trace,
    }, out)
    if args.solver == "exact" and not res.exact:
        return INCONCLUSIVE
    return OK


def _write_table(table, args, out) -> int:
    if args.format == "json":
        _dump(table.to_json(), out)
    else:
        out.write(table.to_csv())
    if any(e.status == STATUS_PARTIAL for e in table.entries):
        return INCONCLUSIVE
    return OK


def cmd_fv_table(args, out) -> int:
    cx = parse_complex(args.complex)
    if args.lmax < 0:
        raise DomainError("--lmax must be >= 0")
    b = _budget(args)
    if args.mode == "weighted":
        table = weighted_filling_table(cx, args.degree, args.lmax, b)
    else:
        table = filling_function_table(cx, args.degree, args.lmax, args.mode, b)
    return _write_table(table, args, out)


def cmd_repro(args, out) -> int:
    if args.which == "fig1":
        cx = builtin_complex("cyclic", k=args.k, n=args.degrees)
        rows = []
        for i in range(args.degrees + 1):
            summary = build_gr(cx, cx.all_cells(i)).summary()
            summary["degree"] = i
            rows.append(summary)
        _dump({"k": args.k, "graphs": rows}, out)
        return OK
    if args.which == "z2-nonfinite":
        out.write("ring,n,r,norm,fv,status\n")
        code = OK
        for ring, rfun in (("Z", lambda n: 1), ("Q", lambda n: Fraction(1, n))):
            cx = builtin_complex("z2", ring=ring)
            for n in range(1, args.nmax + 1):
                r = rfun(n)
                c = commutator_cycle(n, cx, r)
                res = filling_volume(FillingProblem(cx, c, False, _budget(args)))
                if not res.exact:
                    code = INCONCLUSIVE
                out.write(f"{ring},{n},{_fmt(r)},{_fmt(cx.norm(c))},{_fmt(res.value)},"
                          f"{'exact' if res.exact else 'upper-bound'}\n")
        return code
    if args.which == "cyclic-fv":
        cx = builtin_complex("cyclic", k=args.k, n=max(2, args.degree), ring=f"F{args.p}")
        table = filling_function_table(cx, args.degree, args.lmax, "orbit", _budget(args))
        return _write_table(table, args, out)
    raise DomainError(f"unknown reproduction {args.which!r}")


def load_map(path: str, G, H, K: int | None, radius: int | None) -> QuasiIsometryData:
    """Map file: {"K": k, "f": "identity" | [[g, f(g)], ...], "h": ...}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise SchemaError("map file must hold a JSON object")
    K = K if K is not None else data.get("K")
    if K is None:
        raise DomainError("the quasi-isometry constant K is missing")
    f, h = data.get("f", "identity"), data.get("h", "identity")
    if f == "identity" and h == "identity":
        return QuasiIsometryData.identity(G, H, int(K), radius)
    try:
        ftab = {G.element_from_json(a): H.element_from_json(b) for a, b in f}
        htab = {H.element_from_json(a): G.element_from_json(b) for a, b in h}
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed map table: {exc}") from exc
    return QuasiIsometryData(G, H, int(K), ftab, htab, radius)


def cmd_qi_verify(args, out) -> int:
    LG = parse_complex(args.source)
    LH = parse_complex(args.target)
    qi = load_map(args.map, LG.group, LH.group, args.K, args.radius)
    b = _budget(args)
    cG, cH = FillingConstants(LG, budget=b), FillingConstants(LH, budget=b)
    f_map = build_chain_map(qi, LG, LH, args.n, args.radius, cH, b)
    h_map = build_chain_map(qi.inverse(), LH, LG, args.n, args.radius, cG, b)
    report = {"K": qi.K, "closeness": qi.closeness, "f": f_map.report(), "h": h_map.report()}
    statuses = f_map.bound_checks + h_map.bound_checks
    if args.n >= 1:
        s = build_homotopy(qi, f_map, h_map, LG, args.n, cG, b)
        report["s"] = s.report()
        statuses += s.bound_checks
    report["bounds"] = "pass" if all(x == "pass" for x in statuses) else "inconclusive"
    _dump(report, out)
    return OK if report["bounds"] == "pass" else INCONCLUSIVE


def cmd_export_builtin(args, out) -> int:
    cx = parse_complex("builtin:" + args.name)
    if args.out and args.out != "-":
        save_complex(cx, args.out)
    else:
        _dump(cx.to_spec(), out)
    return OK


# -- parser ---------------------------------------------------------------------------


def _add_budget(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("budget")
    g.add_argument("--j-cap", type=int, help="thickening steps before giving up")
    g.add_argument("--node-cap", type=int, help="search-tree node limit")
    g.add_argument("--box", type=int, help="coefficient box for the oracle over Z or Q")
    g.add_argument("--window-radius", type=int, help="support-graph radius of the oracle window")
    g.add_argument("--denominator", type=int, help="denominator bound L over Q")


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fillvol", description="Homological filling volumes of groups.")
    ap.add_argument("--out", "-o", help="output file (default stdout)")
    # -o is also accepted after the subcommand; SUPPRESS keeps the global value otherwise
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", "-o", default=argparse.SUPPRESS, help="output file (default stdout)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)
    cplx_help = "complex file or builtin:NAME[:key=val,...]; builtins: " + ", ".join(BUILTINS)

    p = command("check", help="validate a complex")
    p.add_argument("--complex", required=True, help=cplx_help)
    p.add_argument("--radius", type=int, help="radius for the exhaustion certificate")
    p.set_defaults(func=cmd_check)

    p = command("graph", help="support graph Gr(U) as an adjacency list")
    p.add_argument("--complex", required=True, help=cplx_help)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--cells", help="semicolon-separated cells name@w1,w2 (default: all / ball)")
    p.add_argument("--radius", type=int, default=1, help="ball radius for infinite groups")
    p.set_defaults(func=cmd_graph)

    p = command("thicken", help="cell counts of the thickening chain")
    p.add_argument("--complex", required=True, help=cplx_help)
    p.add_argument("--degree", type=int, required=True, help="degree of the seed cells")
    p.add_argument("--cells", required=True, help="semicolon-separated seed cells")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--steps", type=int, default=20)
    p.set_defaults(func=cmd_thicken)

    p = command("fv", help="filling volume of one cycle")
    p.add_argument("--complex", required=True, help=cplx_help)
    p.add_argument("--cycle", required=True, help="JSON file, inline JSON, commutator:n[:r] or boundary:DEG:cell")
    p.add_argument("--norm", choices=["l1", "weighted"], default="l1")
    p.add_argument("--solver", choices=["oracle", "thicken", "exact"], default="exact")
    _add_budget(p)
    p.set_defaults(func=cmd_fv)

    p = command("fv-table", help="filling function table")
    p.add_argument("--complex", required=True, help=cplx_help)
    p.add_argument("--degree", type=int, required=True, help="filling degree n (cycles in degree n-1)")
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--mode", choices=["orbit", "full", "weighted"], default="orbit")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_budget(p)
    p.set_defaults(func=cmd_fv_table)

    p = command("repro", help="reproduce worked examples")
    p.add_argument("which", choices=["fig1", "z2-nonfinite", "cyclic-fv"])
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--degrees", type=int, default=3, help="top degree for fig1")
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--lmax", type=int, default=6)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_budget(p)
    p.set_defaults(func=cmd_repro)

    p = command("qi-verify", help="build and verify quasi-isometry chain maps")
    p.add_argument("--source", required=True, help=cplx_help)
    p.add_argument("--target", required=True, help=cplx_help)
    p.add_argument("--map", required=True, help="JSON map file")
    p.add_argument("--K", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=int, help="region radius for infinite groups")
    _add_budget(p)
    p.set_defaults(func=cmd_qi_verify)

    p = command("export-builtin", help="write a built-in complex as JSON")
    p.add_argument("name", help="NAME[:key=val,...]")
    p.set_defaults(func=cmd_export_builtin)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        out, close = _open_out(None if args.command == "export-builtin" else args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.func(args, out)
    except (BoundarySquareError, NoFillingExists, AssertionError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return VERIFY_FAIL
    except (BudgetExceeded, FillingNotFound, RegionError, UnsupportedError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return INCONCLUSIVE
    except (FillvolError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    finally:
        if close:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
