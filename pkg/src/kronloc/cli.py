"""Command line entry point: ``kronloc <command> ...``.

Exit codes: 0 on success, 2 on bad input, 3 when a search cap is hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Sequence

import mpmath

from .covering import CensusCapExceeded, enumerate_localization_data
from .formulas import (
    FormulaError,
    conjecture_f,
    douglas_constant,
    euler_34,
    euler_d_dplus1,
    euler_tree_family,
    lower_bound_L,
)
from .glueing import GlueError, decompose, starting_vector
from .quiver import (
    BipartiteQuiver,
    QuiverError,
    SweepCapExceeded,
    classify_root,
    find_destabilizing,
    normalize_kronecker,
)
from .series import (
    SeriesError,
    asymptotic_coeff_estimate,
    lagrange_power_coeff,
    parse_phi,
    solve_functional,
    x0_inverse,
)

EXIT_OK, EXIT_INPUT, EXIT_CAP = 0, 2, 3

DEFAULTS = {
    "cap": 10**7,
    "precision": 64,
    "threads": os.cpu_count() or 1,
    "format": "text",
}


class InputError(ValueError):
    pass


def load_config(path: str | None) -> dict:
    """Read ``key = value`` lines; '#' starts a comment."""
    cfg = dict(DEFAULTS)
    if not path:
        return cfg
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{no}: expected key = value")
        key, val = (s.strip().strip('"') for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise InputError(f"{path}:{no}: unknown key {key!r}")
        cfg[key] = val if key == "format" else int(val)
    return cfg


def _settings(args: argparse.Namespace) -> dict:
    cfg = load_config(getattr(args, "config", None))
    for key in ("cap", "precision", "threads", "format"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key in ("cap", "precision", "threads"):
        if int(cfg[key]) < 1:
            raise InputError(f"{key} must be positive")
    if cfg["format"] not in ("text", "json", "dot"):
        raise InputError("format must be text, json or dot")
    return cfg


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _num(x, digits: int) -> str:
    return mpmath.nstr(x, digits)


# ---------------------------------------------------------------------------
# commands


def _same_orbit(m: int, a: tuple[int, int], b: tuple[int, int]) -> bool:
    na, _ = normalize_kronecker((m, *a))
    nb, _ = normalize_kronecker((m, *b))
    return (na.d, na.e) == (nb.d, nb.e)


def cmd_euler(args, cfg) -> tuple[int, str]:
    m, d, e = args.m, args.d, args.e
    if m < 3:
        raise InputError("need m >= 3")
    if d < 0 or e < 0 or d + e == 0:
        raise InputError("need a nonzero non-negative (d, e)")
    if gcd(d, e) != 1:
        note = ""
        if d == e or e == (m - 1) * d or d == (m - 1) * e:
            note = " (the stable locus of (n,n) and (n,(m-1)n) has Euler characteristic 0 for n >= 2)"
        raise InputError(f"({d},{e}) is not coprime{note}")
    rep, moves = normalize_kronecker((m, d, e))
    out = {"m": m, "d": d, "e": e, "normalForm": [rep.d, rep.e], "moves": moves,
           "crossChecks": [], "status": "exact"}
    kind = classify_root((m, d, e))
    if kind == "not-a-root":
        out.update(value="0", route="not a root: the stable moduli space is empty")
    elif kind == "real":
        out.update(value="1", route="real root: the moduli space is a point")
    else:
        k = next((k for k in (rep.d - 1, rep.d, rep.d + 1)
                  if k >= 1 and _same_orbit(m, (k, k + 1), (rep.d, rep.e))), None)
        if k is not None:
            res = euler_d_dplus1(m, k)
            out.update(value=str(res.value), route=f"closed form for ({k},{k + 1})",
                       crossChecks=res.to_json_obj()["crossChecks"])
            if (d, e) == (k + 1, (m - 1) * (k + 1) + 1):
                out["crossChecks"].append({"name": "tree family form at the input",
                                           "pass": euler_tree_family(m, k + 1) == res.value})
        elif _same_orbit(m, (3, 4), (rep.d, rep.e)):
            res = euler_34(m)
            out.update(value=str(res.value), route="(3,4) family sum and polynomial",
                       crossChecks=res.to_json_obj()["crossChecks"])
        else:
            try:
                census = enumerate_localization_data(m, rep.d, rep.e, type1_only=False,
                                                     cap=cfg["cap"])
            except CensusCapExceeded as exc:
                out.update(value=None, status="partial", route="census", partial=exc.partial,
                           cap=cfg["cap"], type1Only=False)
                return EXIT_CAP, _dump(out)
            out.update(route=f"census of ({rep.d},{rep.e}), cap {cfg['cap']}, type1Only false",
                       cap=cfg["cap"], type1Only=False, data=len(census.data))
            if census.total_chi is None:
                out.update(value=None, status="flagged",
                           note="positive-dimensional fixed components found; not resolved")
            else:
                out.update(value=str(census.total_chi))
    if cfg["format"] == "json":
        return EXIT_OK, _dump(out)
    lines = [str(out["value"]) if out["value"] is not None else "unknown",
             f"route: {out['route']}", f"status: {out['status']}"]
    for c in out["crossChecks"]:
        lines.append(f"check {c['name']}: {'pass' if c['pass'] else 'FAIL'}")
    return EXIT_OK, "\n".join(lines)


def cmd_enumerate(args, cfg) -> tuple[int, str]:
    m, d, e = args.m, args.d, args.e
    if m < 2 or d < 0 or e < 0 or d + e == 0:
        raise InputError("need m >= 2 and a nonzero non-negative (d, e)")
    try:
        rep = enumerate_localization_data(m, d, e, type1_only=args.type1_only,
                                          cap=cfg["cap"], max_dim=args.max_dim)
    except CensusCapExceeded as exc:
        return EXIT_CAP, _dump({"m": m, "d": d, "e": e, "status": "cap exceeded",
                                "cap": exc.cap, "partial": exc.partial})
    emit = args.emit or ("dot" if cfg["format"] == "dot" else None)
    written = []
    if emit:
        outdir = Path(args.out or f"census-m{m}-d{d}-e{e}")
        outdir.mkdir(parents=True, exist_ok=True)
        for x in rep.data:
            name = outdir / f"{x.digest()}.{emit}"
            text = x.to_dot() if emit == "dot" else _dump(x.to_json_obj()) + "\n"
            name.write_text(text)
            written.append(str(name))
    if cfg["format"] == "json":
        obj = rep.to_json_obj()
        if emit:
            obj["files"] = written
        return EXIT_OK, _dump(obj)
    total = "flagged (positive-dimensional components)" if rep.total_chi is None else str(rep.total_chi)
    lines = [f"data: {len(rep.data)}", f"totalChi: {total}",
             f"type1Only: {str(rep.type1_only).lower()}"]
    for x, dim, fold in zip(rep.data, rep.moduli_dims, rep.folded):
        lines.append(f"  {x.digest()}  vertices={len(x.vertices)} moduliDim={dim}"
                     + ("  folds in the abelian cover" if fold else ""))
    lines += [f"wrote {w}" for w in written]
    return EXIT_OK, "\n".join(lines)


def cmd_decompose(args, cfg) -> tuple[int, str]:
    chain = decompose(args.d, args.e)
    sv = starting_vector(args.d, args.e)
    obj = chain.to_json_obj()
    if cfg["format"] == "json":
        return EXIT_OK, _dump({**obj, "startingVector": [sv.ds, sv.es]})
    lines = [f"tuple: {list(chain.tuple)}", f"starting vector: ({sv.ds},{sv.es})"]
    for s in chain.chain:
        t = s.target
        lines.append(f"  ({t[0]},{t[1]}) = ({s.ds},{s.es}) + {s.k}*({s.d},{s.e})")
    return EXIT_OK, "\n".join(lines)


def cmd_lowerbound(args, cfg) -> tuple[int, str]:
    if gcd(args.d, args.e) != 1:
        raise InputError("need coprime (d, e)")
    res = lower_bound_L(args.m, args.d, args.e, dps=cfg["precision"])
    if cfg["format"] == "json":
        return EXIT_OK, _dump(res.to_json_obj(cfg["precision"]))
    return EXIT_OK, "\n".join([
        f"a={res.a}", f"K={res.K}", f"L={_num(res.L, 20)}",
        f"family: n={res.n} tuple={list(res.tuple)} via ({res.reflected[0]},{res.reflected[1]})",
    ])


def cmd_series(args, cfg) -> tuple[int, str]:
    dps = cfg["precision"]
    js = cfg["format"] == "json"
    if args.series_cmd == "coeff":
        val = lagrange_power_coeff(args.a, args.b, args.m, args.n)
        return EXIT_OK, _dump({"value": str(val)}) if js else str(val)
    if args.series_cmd == "solve":
        y = solve_functional(parse_phi(args.phi), args.order)
        coeffs = [str(c) for c in y.coeffs]
        return EXIT_OK, _dump({"phi": args.phi, "order": args.order, "coeffs": coeffs}) if js \
            else " ".join(coeffs)
    if args.series_cmd == "x0":
        inv = x0_inverse(args.a, args.b, dps)
        with mpmath.workdps(dps):
            x0 = 1 / inv.value
        if js:
            return EXIT_OK, _dump({"x0": _num(x0, dps), "x0Inverse": _num(inv.value, dps),
                                   "factor": inv.factor, "base": str(inv.base),
                                   "exponent": str(inv.exponent)})
        return EXIT_OK, f"{_num(x0, 20)}\nx0^-1 = {_num(inv.value, 20)} = {inv.factor}*({inv.base})^({inv.exponent})"
    if args.series_cmd == "asym":
        est = asymptotic_coeff_estimate((args.a, args.b), args.n, dps)
        exact = lagrange_power_coeff(args.a, args.b, 1, args.n)
        if js:
            return EXIT_OK, _dump({"estimate": _num(est, dps), "exact": str(exact)})
        return EXIT_OK, f"{_num(est, 20)}\nexact = {exact}"
    raise InputError("unknown series command")


def cmd_stability(args, cfg) -> tuple[int, str]:
    try:
        text = Path(args.quiver).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.quiver}: {exc}") from exc
    q = BipartiteQuiver.from_json(text)
    strict_wit = find_destabilizing(q, True, cfg["cap"])
    if strict_wit is None:
        verdict, wit = "stable", None
    else:
        semi_wit = find_destabilizing(q, False, cfg["cap"])
        verdict, wit = ("semistable", strict_wit) if semi_wit is None else ("unstable", semi_wit)
        if args.strict and verdict == "semistable":
            verdict = "not stable (semistable)"
    if cfg["format"] == "json":
        return EXIT_OK, _dump({"verdict": verdict, "witness": wit,
                               "dimensionType": list(q.dimension_type), "tree": q.is_tree()})
    lines = [verdict]
    if wit is not None:
        lines.append("destabilizing sub-dimension: "
                     + ", ".join(f"{v}={wit[v]}" for v in q.vertices if wit[v]))
    if not q.is_tree():
        lines.append("note: the quiver is not a tree")
    return EXIT_OK, "\n".join(lines)


def cmd_conjecture_f(args, cfg) -> tuple[int, str]:
    try:
        r = Fraction(args.r)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {args.r!r}") from exc
    dps = cfg["precision"]
    val = conjecture_f(args.m, r, dps)
    k = douglas_constant(args.m, dps)
    if cfg["format"] == "json":
        return EXIT_OK, _dump({"f": _num(val, dps), "K": _num(k, dps), "r": str(r),
                               "m": args.m, "status": "conjectural"})
    return EXIT_OK, f"{_num(val, 20)}\nK = {_num(k, 20)}\nstatus: conjectural"


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json", "dot"], default=argparse.SUPPRESS)
    common.add_argument("--cap", type=int, default=argparse.SUPPRESS, help="search cap (default 10^7)")
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS, help="decimal digits (default 64)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="accepted for compatibility; work runs in one thread")
    common.add_argument("--config", default=argparse.SUPPRESS, help="file with key = value lines")

    p = argparse.ArgumentParser(prog="kronloc", parents=[common],
                                description="Euler characteristics of Kronecker moduli by localization.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def mde(sp, need_m=True):
        if need_m:
            sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--d", type=int, required=True)
        sp.add_argument("--e", type=int, required=True)

    sp = sub.add_parser("euler", parents=[common], help="Euler characteristic of M(d,e)")
    mde(sp)
    sp.set_defaults(func=cmd_euler)

    sp = sub.add_parser("enumerate", parents=[common], help="census of stable tree data")
    mde(sp)
    sp.add_argument("--type1-only", action="store_true")
    sp.add_argument("--max-dim", type=int, default=12)
    sp.add_argument("--emit", choices=["dot", "json"], default=None)
    sp.add_argument("--out", default=None, help="directory for emitted files")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("decompose", parents=[common], help="glueing decomposition of (d, e)")
    mde(sp, need_m=False)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("lowerbound", parents=[common], help="growth lower bound L")
    mde(sp)
    sp.set_defaults(func=cmd_lowerbound)

    sp = sub.add_parser("series", parents=[common], help="tree generating functions")
    ss = sp.add_subparsers(dest="series_cmd", required=True)
    c = ss.add_parser("coeff", parents=[common])
    for name in ("a", "b", "m", "n"):
        c.add_argument(f"--{name}", type=int, required=True)
    c = ss.add_parser("solve", parents=[common])
    c.add_argument("--phi", required=True)
    c.add_argument("--order", type=int, required=True)
    c = ss.add_parser("x0", parents=[common])
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--b", type=int, required=True)
    c = ss.add_parser("asym", parents=[common])
    for name in ("a", "b", "n"):
        c.add_argument(f"--{name}", type=int, required=True)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("stability", parents=[common], help="generic stability of a quiver file")
    sp.add_argument("quiver")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--strict", dest="strict", action="store_true", default=True)
    g.add_argument("--non-strict", dest="strict", action="store_false")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("conjecture-f", parents=[common], help="the conjectural function f")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", required=True, help="rational, e.g. 8/5")
    sp.set_defaults(func=cmd_conjecture_f)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _settings(args)
        code, text = args.func(args, cfg)
    except (SweepCapExceeded, CensusCapExceeded) as exc:
        print(_dump({"status": "cap exceeded", "error": str(exc)}))
        return EXIT_CAP
    except (InputError, QuiverError, GlueError, SeriesError, FormulaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(text)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
