"""Conjugate-point scans for steady Euler flows on the flat torus.

Exit codes: 0 success, 1 validation or usage error, 2 numerical threshold
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional

from . import fieldio, isochrone, kolmogorov
from .conjugacy import conjugacy_report
from .kolmogorov import KolmogorovParams, reference_norm2
from .torus import GeometryMismatchError

EXIT_OK, EXIT_USAGE, EXIT_THRESHOLD, EXIT_IO = 0, 1, 2, 3
DEFAULT_VERIFY_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError(f"must be positive (alpha > 0), got {text!r}")
    return x


def _positive_int(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if x < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text!r}")
    return x


def _float_list(text: str) -> list[float]:
    return [_positive_float(t) for t in text.split(",") if t.strip()]


def _pair(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return vals[0], vals[1]


def _tolerance(flag: Optional[float], default: float) -> float:
    if flag is not None:
        return flag
    env = os.environ.get("CONJSCAN_TOL")
    if env:
        try:
            return _positive_float(env)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"CONJSCAN_TOL: {exc}")
    return default


# -- output helpers ---------------------------------------------------------

def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_value(r[c]) for c in columns])
    return buf.getvalue()


def to_json(obj) -> str:
    def clean(o):
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, list):
            return [clean(v) for v in o]
        return _json_value(o)
    return json.dumps(clean(obj), indent=1) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w") as fh:
        fh.write(text)


# -- commands ---------------------------------------------------------------

def cmd_scan(args) -> int:
    records = kolmogorov.scan(args.alpha, args.nmax, args.mmax, threads=args.threads)
    rows = [r.row() for r in records]
    if args.format == "json":
        text = to_json(rows)
    else:
        text = to_csv(rows, kolmogorov.ScanRecord.COLUMNS)
    _emit(text, args.out)
    failed = [r for r in records if r.status.startswith("error")]
    for r in failed:
        print(f"cell (n={r.params.n}, m={r.params.m}): {r.status}", file=sys.stderr)
    return EXIT_THRESHOLD if failed else EXIT_OK


MC_COLUMNS = ("label", "mc", "mc_curvature", "curvature_term", "p_advect_norm2",
              "stationarity", "identity_gap", "tc", "mc_normalized", "tc_normalized",
              "status")


def cmd_mc(args) -> int:
    u0 = fieldio.read_velocity(args.state)
    tests = [fieldio.read_velocity(p) for p in args.test]
    for path, v in zip(args.test, tests):
        if v.geometry != u0.geometry:
            raise GeometryMismatchError(
                f"alpha mismatch: state has alpha={u0.geometry.alpha}, "
                f"{path} has alpha={v.geometry.alpha}")
    report = conjugacy_report(u0, tests, labels=list(args.test))
    ref = reference_norm2(u0)
    rows = []
    for res in report.results:
        row = res.to_dict()
        mcn = res.mc / ref if ref > 0 else math.nan
        row["mc_normalized"] = mcn
        row["tc_normalized"] = math.pi * math.sqrt(2.0 / mcn) if mcn > 0 else None
        rows.append(row)
    if args.format == "json":
        text = to_json({"alpha": u0.geometry.alpha, "results": rows,
                        "best": None if report.best is None else rows[report.best]["label"]})
    else:
        text = to_csv(rows, MC_COLUMNS)
    _emit(text, args.out)
    return EXIT_OK


def verify_grid(alphas, n_max: int, m_max: int, tol: float,
                exclude_resonant: bool = False, perturb: float = 0.0,
                threads: int = 1) -> dict:
    """Numeric-vs-closed-form comparison over ``1 <= |n|, |m|``."""
    cells = [KolmogorovParams(n, m, a) for a in alphas
             for n in range(-n_max, n_max + 1) if n != 0
             for m in range(-m_max, m_max + 1) if m != 0]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            recs = list(pool.map(kolmogorov.scan_cell, cells))
    else:
        recs = [kolmogorov.scan_cell(p) for p in cells]
    out = {"alphas": list(alphas), "n_max": n_max, "m_max": m_max, "tolerance": tol,
           "cells": len(cells), "exclude_resonant": exclude_resonant, "forms": {}}
    passed = True
    for form in (1, 2):
        skip = f"resonant_{form}"
        used = [r for r in recs if not (exclude_resonant and skip in r.status)]
        nums = [getattr(r, f"mc_num_{form}") for r in used]
        # test hook: relative error at odd-n cells, which no single constant absorbs
        cfs = [(1.0 + perturb * (r.params.n % 2)) * getattr(r, f"mc_cf_{form}") for r in used]
        first = next((i for i, c in enumerate(cfs) if abs(c) > 1e-12), None)
        norm_const = nums[first] / cfs[first] if first is not None else math.nan
        devs = []
        for r, x, c in zip(used, nums, cfs):
            target = norm_const * c
            dev = abs(x - target) / abs(target) if target != 0 else abs(x)
            devs.append((dev, r.params))
        signed = [(x, c) for x, c in zip(nums, cfs) if abs(c) > 1e-12]
        agree = sum(1 for x, c in signed if (x > 0) == (c > 0))
        worst = sorted(devs, key=lambda t: -t[0])[:10]
        max_dev = max((d for d, _ in devs), default=0.0)
        ok = norm_const > 0 and max_dev <= tol and agree == len(signed)
        passed &= ok
        out["forms"][str(form)] = {
            "norm_const": norm_const,
            "cells_compared": len(used),
            "max_relative_deviation": max_dev,
            "cells_over_tolerance": sum(1 for d, _ in devs if d > tol),
            "sign_agreement": agree,
            "sign_cells": len(signed),
            "pass": ok,
            "worst": [{"alpha": p.alpha, "n": p.n, "m": p.m, "deviation": d}
                      for d, p in worst],
        }
    out["pass"] = passed
    return out


def cmd_verify(args) -> int:
    tol = _tolerance(args.tol, DEFAULT_VERIFY_TOL)
    res = verify_grid(args.alpha_list, args.nmax, args.mmax, tol,
                      exclude_resonant=args.exclude_resonant, perturb=args.perturb,
                      threads=args.threads)
    if args.format == "json":
        text = to_json(res)
    else:
        lines = [f"cells,{res['cells']}", f"tolerance,{_csv_value(tol)}"]
        for form, f in res["forms"].items():
            lines += [
                f"form_{form}_norm_const,{_csv_value(f['norm_const'])}",
                f"form_{form}_max_relative_deviation,{_csv_value(f['max_relative_deviation'])}",
                f"form_{form}_cells_over_tolerance,{f['cells_over_tolerance']}",
                f"form_{form}_sign_agreement,{f['sign_agreement']}/{f['sign_cells']}",
                f"form_{form}_pass,{_csv_value(f['pass'])}",
            ]
        lines.append(f"pass,{_csv_value(res['pass'])}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if not res["pass"]:
        for form, f in res["forms"].items():
            if not f["pass"]:
                cells = ", ".join(f"(alpha={w['alpha']:g}, n={w['n']}, m={w['m']}): "
                                  f"{w['deviation']:.3e}" for w in f["worst"][:5])
                print(f"form {form} failed; worst cells: {cells}", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_isochrone(args) -> int:
    if args.ellipse is not None:
        stream = isochrone.elliptic_vortex(*args.ellipse)
    elif args.disk is not None:
        stream = isochrone.disk_rotation(args.disk)
    else:
        stream = isochrone.power4()
    levels = isochrone.interior_levels(stream, args.levels)
    if len(levels) < 2:
        raise UsageError("--levels must be at least 2")
    rep = isochrone.isochronality_report(stream, levels, threads=args.threads)
    rows = [r.row() for r in rep.records]
    if args.format == "json":
        text = to_json({"stream": stream.name, "records": rows,
                        "max_relative_spread": rep.max_relative_spread})
    else:
        text = to_csv(rows, isochrone.PeriodResult.COLUMNS)
        text += f"# max_relative_spread={_csv_value(rep.max_relative_spread)}\n"
    _emit(text, args.out)
    bad = [r for r in rep.records if r.status != "ok"]
    return EXIT_THRESHOLD if bad else EXIT_OK


def cmd_plotgrid(args) -> int:
    if args.n is not None:
        if args.alpha_count < 2:
            raise UsageError("--alpha-count must be at least 2")
        lo, hi = args.alpha_min, args.alpha_max
        if not hi > lo:
            raise UsageError("--alpha-max must exceed --alpha-min")
        k = args.alpha_count
        alphas = [lo + (hi - lo) * i / (k - 1) for i in range(k)]
        grid = kolmogorov.plot_grid_malpha(args.n, args.mmax, alphas)
    else:
        if args.alpha is None:
            raise UsageError("plotgrid needs --alpha (or --n for the (m, alpha) grid)")
        grid = kolmogorov.plot_grid_nm(args.alpha, args.nmax, args.mmax)
    _emit(to_json(grid.to_dict()), args.out)
    return EXIT_OK


FIELD_BUILDERS = {
    "state": (kolmogorov.kolmogorov_stream, kolmogorov.kolmogorov_field),
    "test1": (kolmogorov.test_stream_1, kolmogorov.test_field_1),
    "test2": (kolmogorov.test_stream_2, kolmogorov.test_field_2),
}


def cmd_field(args) -> int:
    p = KolmogorovParams(args.n, args.m, args.alpha)
    stream_fn, field_fn = FIELD_BUILDERS[args.which]
    f = stream_fn(p) if args.kind == "streamfunction" else field_fn(p)
    _emit(fieldio.dumps(f) + "\n", args.out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conjscan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt=True):
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=_positive_int, default=1)

    p = sub.add_parser("scan", help="criterion table over (n, m) at fixed alpha")
    p.add_argument("--alpha", type=_positive_float, required=True)
    p.add_argument("--nmax", type=_positive_int, default=8)
    p.add_argument("--mmax", type=_positive_int, default=8)
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("mc", help="criterion for a steady state and test directions")
    p.add_argument("--state", required=True, help="steady-state field file")
    p.add_argument("--test", required=True, nargs="+", help="test-direction field file(s)")
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", help="numeric vs closed-form agreement grid")
    p.add_argument("--alpha-list", type=_float_list, default=[0.5, 1.0, 2.0, 3.0])
    p.add_argument("--nmax", type=_positive_int, default=6)
    p.add_argument("--mmax", type=_positive_int, default=6)
    p.add_argument("--tol", type=_positive_float, default=None)
    p.add_argument("--exclude-resonant", action="store_true",
                   help="skip cells where a closed form does not apply (|m|=1 or |n|=1)")
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("isochrone", help="streamline periods T(c)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--ellipse", type=_pair, metavar="A,B")
    g.add_argument("--disk", type=_positive_float, metavar="R")
    g.add_argument("--power4", action="store_true")
    p.add_argument("--levels", type=_positive_int, default=20)
    common(p)
    p.set_defaults(func=cmd_isochrone)

    p = sub.add_parser("plotgrid", help="closed-form contour data (positive part)")
    p.add_argument("--alpha", type=_positive_float)
    p.add_argument("--n", type=int, help="fix n and grid over (m, alpha) instead")
    p.add_argument("--nmax", type=_positive_int, default=20)
    p.add_argument("--mmax", type=_positive_int, default=20)
    p.add_argument("--alpha-min", type=_positive_float, default=0.1)
    p.add_argument("--alpha-max", type=_positive_float, default=5.0)
    p.add_argument("--alpha-count", type=int, default=50)
    common(p, fmt=False)
    p.set_defaults(func=cmd_plotgrid)

    p = sub.add_parser("field", help="write a Kolmogorov state or test field file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", type=_positive_float, required=True)
    p.add_argument("--which", choices=sorted(FIELD_BUILDERS), default="state")
    p.add_argument("--kind", choices=("vector", "streamfunction"), default="vector")
    common(p, fmt=False)
    p.set_defaults(func=cmd_field)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help (0) and on usage errors (remapped to 1)
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"conjscan {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"conjscan {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"conjscan {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
