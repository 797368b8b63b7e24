"""Command line front end.

    python -m burkholder_lab constants --p-grid 1.5:3.5:1
    python -m burkholder_lab verify --family walk:depth=4 --p 3
    python -m burkholder_lab scan --p-grid 1.1:4.0:0.1 --family walk --depth 5 --csv scan.csv
    python -m burkholder_lab search --p 3 --direction minimize --depth 4 --seed 1 --out r.json

Exit status: 0 when every check passes, 1 when any check fails, 2 on
input or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import math
import sys

from . import __version__
from .families import SpecError, build_family
from .fileformat import FileFormatError, load, martingale_to_dict
from .report import Tolerances
from .scalar import (PExponent, comparability_bound, displayed_burkholder_constants,
                     estimate_comparability)
from .scan import CSV_COLUMNS, p_scan
from .search import EnvelopeViolation, SearchSpace, multi_restart_search
from .tree import OutcomeTree, TreeError
from .verify import run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_grid(text: str) -> list[float]:
    """``lo:hi:step`` inclusive of ``hi`` (up to rounding), or a single value."""
    parts = text.split(":")
    try:
        nums = [float(x) for x in parts]
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected lo:hi:step") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError(f"bad grid {text!r}; expected lo:hi:step")
    lo, hi, step = nums
    if not step > 0:
        raise UsageError(f"grid step must be positive, got {step}")
    if hi < lo:
        raise UsageError(f"grid bounds reversed: {lo} > {hi}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def _exponents(args) -> list[float]:
    if args.p is not None and args.p_grid is not None:
        raise UsageError("give either --p or --p-grid, not both")
    ps = [args.p] if args.p is not None else parse_grid(args.p_grid) if args.p_grid else None
    if not ps:
        raise UsageError("an exponent is required (--p or --p-grid)")
    for p in ps:
        if not p > 1:
            raise UsageError(f"exponent must satisfy p > 1, got {p}")
    return ps


def _clean(x):
    if isinstance(x, float):
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def make_report(command: str, args: dict, payload: dict) -> dict:
    """Report with metadata; ``payload_sha256`` hashes the payload only, so
    the timestamp does not affect it."""
    payload = _clean(payload)
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return {
        "meta": {
            "command": command,
            "args": _clean(args),
            "version": __version__,
            "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        },
        "payload": payload,
        "payload_sha256": hashlib.sha256(blob.encode()).hexdigest(),
    }


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=1, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _tol(args) -> Tolerances:
    return Tolerances(identity=args.tol_identity, inequality=args.tol_ineq)


def cmd_constants(args) -> int:
    rows = []
    for p in _exponents(args):
        pe = PExponent.from_p(p)
        if p < 2:
            closed = {"d_p": comparability_bound(p, "lower"),
                      "D_p_estimate": estimate_comparability(p, "upper")}
        else:
            closed = {"D_p": comparability_bound(p, "upper"),
                      "d_p_estimate": estimate_comparability(p, "lower")}
        rows.append({"p": p, "c_p": pe.c_p, "C_p": pe.C_p,
                     "C_p_printed": displayed_burkholder_constants(p)[1],
                     **closed, "doob": pe.doob, "q": pe.q})
    _emit(make_report("constants", {"p": args.p, "p_grid": args.p_grid},
                      {"rows": rows}), args.out)
    return EXIT_OK


def _inputs(args):
    if bool(args.input) == bool(args.family):
        raise UsageError("give exactly one of --input or --family")
    if args.input:
        return [(args.input, load(args.input))]
    return build_family(args.family, depth=args.depth, seed=args.seed)


def cmd_verify(args) -> int:
    ps = _exponents(args)
    members = _inputs(args)
    tol = _tol(args)
    suites = []
    ok = True
    for label, proc in members:
        for p in ps:
            rep = run_suite(proc, p, tol, seed=args.seed)
            ok &= rep.overall_pass
            suites.append({"input": label, **rep.to_dict()})
    meta = {"input": args.input, "family": args.family, "depth": args.depth,
            "seed": args.seed, "p": args.p, "p_grid": args.p_grid,
            "tol_identity": tol.identity, "tol_ineq": tol.inequality}
    _emit(make_report("verify", meta, {"overall_pass": ok, "suites": suites}), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scan(args) -> int:
    if args.p_grid is None:
        raise UsageError("scan needs --p-grid")
    ps = _exponents(args)
    tol = _tol(args)
    build_family(args.family, depth=args.depth, seed=args.seed)  # validate early
    rows = p_scan(args.family, ps, depth=args.depth, seed=args.seed,
                  restarts=args.restarts, budget=args.budget, tol=tol, workers=args.workers)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow([repr(x) if isinstance(x, float) else x for x in r.csv_row()])
    meta = {"p_grid": args.p_grid, "family": args.family, "depth": args.depth,
            "seed": args.seed, "restarts": args.restarts, "budget": args.budget,
            "tol_identity": tol.identity, "tol_ineq": tol.inequality}
    ok = all(r.passed for r in rows)
    _emit(make_report("scan", meta, {"all_pass": ok, "rows": [r.to_dict() for r in rows]}),
          args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_search(args) -> int:
    if args.p is None or not args.p > 1:
        raise UsageError("search needs --p with p > 1")
    try:
        tree = OutcomeTree.regular(args.depth, args.branching)
    except TreeError as exc:
        raise UsageError(str(exc)) from None
    space = SearchSpace(tree)
    meta = {"p": args.p, "direction": args.direction, "depth": args.depth,
            "branching": args.branching, "restarts": args.restarts,
            "budget": args.budget, "seed": args.seed}
    try:
        res = multi_restart_search(space, args.p, args.direction, args.restarts,
                                   args.seed, args.budget, workers=args.workers)
    except EnvelopeViolation as exc:
        _emit(make_report("search", meta, {"error": str(exc)}), args.out)
        return EXIT_FAIL
    payload = {"result": res.to_dict(), "certificate": martingale_to_dict(res.certificate)}
    _emit(make_report("search", meta, payload), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="burkholder-lab",
                                 description="Check Burkholder-inequality constants on finite martingales.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, tol=False):
        sp.add_argument("--p", type=float)
        sp.add_argument("--p-grid", help="lo:hi:step (inclusive)")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        if tol:
            sp.add_argument("--tol-identity", type=float, default=Tolerances.identity)
            sp.add_argument("--tol-ineq", type=float, default=Tolerances.inequality)

    sp = sub.add_parser("constants", help="tabulate c_p, C_p, comparability and Doob constants")
    common(sp)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("verify", help="run the full check suite on a martingale")
    common(sp, tol=True)
    sp.add_argument("--input", help="martingale JSON file")
    sp.add_argument("--family", help="generator spec, e.g. walk:depth=4")
    sp.add_argument("--depth", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("scan", help="verify and search over a grid of exponents")
    common(sp, tol=True)
    sp.add_argument("--family", default="walk")
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--budget", type=int, default=2000)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--csv", help="also write a flat CSV table")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("search", help="search for extremal martingales on a complete tree")
    common(sp)
    sp.add_argument("--direction", choices=("minimize", "maximize"), default="minimize")
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--branching", type=int, default=2)
    sp.add_argument("--restarts", type=int, default=100)
    sp.add_argument("--budget", type=int, default=5000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FileFormatError, SpecError, TreeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
