"""Command-line front end.

Subcommands
-----------
verify   run forward, inverse and cross checks over catalog pairs
eval     evaluate a pair, an OU quantity, D_v(z) or a numerical inverse
mc       Monte Carlo check of the OU transition law
derive   re-derive catalog rows from the two base pairs

Exit status is 0 when every requested check passes, 1 when a check fails
and 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import derive, laplace, ouprocess, pairs, specfun
from .errors import DomainError, PcfLaplaceError
from .report import CSV_HEADER, SCHEMA_VERSION

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PAIR_KEYS = ("beta", "c", "x", "y")


class UsageError(Exception):
    """Configuration problem detected after parsing; maps to exit status 2."""


def _pair_id(text: str) -> str:
    if text not in pairs.pair_ids():
        raise argparse.ArgumentTypeError(f"unknown pair {text!r} (known: {', '.join(pairs.pair_ids())})")
    return text


def _target_id(text: str) -> str:
    if text not in derive.derivation_targets():
        raise argparse.ArgumentTypeError(
            f"unknown pair {text!r} for derive (known: {', '.join(derive.derivation_targets())})")
    return text


def _overrides(text: str) -> dict:
    """Parse ``key=value,key=value`` with keys among beta, c, x, y."""
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in PAIR_KEYS:
            raise argparse.ArgumentTypeError(f"bad override {item!r}; expected key=value with key in {PAIR_KEYS}")
        try:
            out[key] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"override {key} needs a number, got {value!r}") from None
    return out


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _complex_list(text: str) -> list:
    try:
        return [complex(v.replace(" ", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _grid_for(pair, overrides: dict, args) -> pairs.Grid:
    base = pairs.default_grid(pair)
    if not overrides:
        params = base.params
    else:
        betas = [overrides["beta"]] if "beta" in overrides else sorted({p.beta for p in base.params})
        cs = [overrides["c"]] if "c" in overrides else sorted({p.c for p in base.params})
        if "x" in overrides or "y" in overrides:
            xy = [(overrides.get("x", 0.0), overrides.get("y", 0.0))]
        else:
            xy = list(dict.fromkeys((p.x, p.y) for p in base.params))
        params = []
        for b, c, (x, y) in itertools.product(betas, cs, xy):
            try:
                p = pairs.PairParameters(b, c, x, y)
                pair.check(p)
            except DomainError as exc:
                raise UsageError(str(exc)) from None
            params.append(p)
        params = tuple(params)
    s_values = tuple(args.s) if args.s else base.s_values
    t_values = tuple(args.t) if args.t else base.t_values
    if any(s <= 0 for s in s_values) or any(t <= 0 for t in t_values):
        raise UsageError("s and t values must be positive")
    return pairs.Grid(params, s_values, t_values)


def _write_report(report, out_dir: Path, fmt: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"report-{report.pair_id}.{fmt}"
    if fmt == "json":
        path.write_text(report.to_json(include_timing=False) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(report.csv_rows())
        path.write_text(buf.getvalue())
    return path


def cmd_verify(args) -> int:
    ids = pairs.pair_ids() if args.all else (args.pair or [])
    if not ids:
        raise UsageError("choose pairs with --pair ID or --all")
    overrides = args.set or {}
    tol = {k: getattr(args, k) for k in ("forward_tol", "inverse_tol", "cross_tol")
           if getattr(args, k) is not None}
    failed = 0
    for pid in sorted(dict.fromkeys(ids), key=pairs.pair_ids().index):
        pair = pairs.get_pair(pid)
        grid = _grid_for(pair, overrides, args)
        report = pairs.verify_pair(pair, grid, inverse=not args.forward_only, **tol)
        path = _write_report(report, Path(args.out), args.format)
        status = "PASS" if report.passed else "FAIL"
        failed += not report.passed
        print(f"pair {pid:>3} {status}  points={len(report.points)}  "
              f"forward={report.worst('forward'):.3g}  inverse={report.worst('inverse'):.3g}  "
              f"cross={report.worst('cross'):.3g}  (ratios to tolerance)  "
              f"{report.wall_time:.1f}s  -> {path}")
        for p in report.failures()[:5]:
            print(f"    {p.kind} {p.coords} residual={p.residual!r} tol={p.tolerance:g}"
                  + (f" error={p.error}" if p.error else ""))
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _pair_params(args) -> pairs.PairParameters:
    values = {"beta": 1.0, "c": 0.0, "x": 0.3, "y": 0.4}
    values.update(args.set or {})
    return pairs.PairParameters(**values)


def _emit(columns: dict, out):
    """Print one value per line, or a CSV table when any column has several entries."""
    n = max(len(v) for v in columns.values())
    if n == 1:
        for key, vals in columns.items():
            print(f"{key} = {vals[0]!r}", file=out)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(columns))
    for i in range(n):
        writer.writerow([repr(v[i] if len(v) > 1 else v[0]) for v in columns.values()])


def _ou_params(args) -> ouprocess.OUParameters:
    return ouprocess.OUParameters(args.alpha, args.beta, args.sigma)


def cmd_eval(args) -> int:
    kind = args.kind
    out = sys.stdout
    if kind == "pcf":
        if args.v is None or args.z is None:
            raise UsageError("eval pcf needs --v and --z")
        rows = [(v, z) for v in args.v for z in args.z]
        vals = [complex(specfun.pcf_d(v, z)) for v, z in rows]
        cols = {"v": [r[0] for r in rows], "z": [r[1] for r in rows], "D": vals}
        if all(v.imag == 0 for v in cols["v"]):
            cols["v"] = [v.real for v in cols["v"]]
            cols["D"] = [d.real for d in vals]
        _emit(cols, out)
        return EXIT_OK
    if kind in ("density", "distribution"):
        if args.t is None or args.w is None:
            raise UsageError(f"eval {kind} needs --t and --w")
        p = _ou_params(args)
        rows = [(t, w) for t in args.t for w in args.w]
        fn = ouprocess.transition_density if kind == "density" else ouprocess.transition_distribution
        vals = [fn(ouprocess.StateQuery(w, args.w0, t), p) for t, w in rows]
        _emit({"t": [r[0] for r in rows], "w": [r[1] for r in rows], kind: vals}, out)
        return EXIT_OK
    if args.pair is None:
        raise UsageError(f"eval {kind} needs --pair")
    pair = pairs.get_pair(args.pair)
    params = _pair_params(args)
    pair.check(params)
    if kind == "image":
        if args.s is None:
            raise UsageError("eval image needs --s")
        vals = [pairs.eval_image(pair, s, params) for s in args.s]
        if all(s.imag == 0 for s in args.s):
            _emit({"s": [s.real for s in args.s], "image": [v.real for v in vals]}, out)
        else:
            _emit({"s": list(args.s), "image": vals}, out)
        return EXIT_OK
    if args.t is None:
        raise UsageError(f"eval {kind} needs --t")
    if kind == "original":
        vals = [float(pairs.eval_original(pair, t, params)) for t in args.t]
        _emit({"t": list(args.t), "original": vals}, out)
        return EXIT_OK
    cfg = laplace.InversionConfig(args.method, args.nodes, args.working_tol)
    shift = params.beta / 2.0 if params.c == 0 else 0.0
    image = lambda s: pairs.eval_image(pair, s, params)
    vals = [laplace.invert(image, t, cfg, shift=shift) for t in args.t]
    _emit({"t": list(args.t), "inverse": vals}, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# mc
# ---------------------------------------------------------------------------

def cmd_mc(args) -> int:
    if args.n < ouprocess.MIN_KS_SAMPLES:
        raise UsageError(f"n={args.n} is below the minimum of {ouprocess.MIN_KS_SAMPLES} samples")
    p = _ou_params(args)
    q = ouprocess.StateQuery(args.w0, args.w0, args.t)
    ks = ouprocess.empirical_cdf_check(args.n, q, p, args.seed)
    hist = ouprocess.histogram_check(args.n, q, p, args.seed, bins=args.bins, n_se=args.n_se)
    passed = ks.passed and hist.passed
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": {"n": args.n, "seed": args.seed, "alpha": p.alpha, "beta": p.beta,
                   "sigma": p.sigma, "w0": args.w0, "t": args.t, "bins": args.bins},
        "passed": passed,
        "ks": ks.to_dict(include_timing=False),
        "histogram": hist.to_dict(include_timing=False),
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    ks_point = ks.points[0]
    print(f"KS statistic {ks_point.value:.6g} vs critical {ks_point.tolerance:.6g}: "
          f"{'PASS' if ks.passed else 'FAIL'}")
    print(f"histogram worst deviation {hist.worst() * args.n_se if hist.points else 0:.3g} "
          f"standard errors over {len(hist.points)} bins: {'PASS' if hist.passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# derive
# ---------------------------------------------------------------------------

def _tampered(pair_id: str, factor: float = 1.001):
    """Base pair whose image is scaled by ``factor``; used to check failure detection."""
    pair = pairs.get_pair(pair_id)
    return replace(pair, image=lambda params: pair.image(params).scaled(factor))


def cmd_derive(args) -> int:
    override = {pid: _tampered(pid) for pid in (args.tamper_base or [])}
    targets = args.target or derive.derivation_targets()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failed = 0
    for target in targets:
        steps = derive.rederive_catalog([target], seed=args.seed, base_override=override, strict=False)
        path = out_dir / f"derive-{target}.json"
        path.write_text(derive.trace_json(steps) + "\n")
        ok = all(s.passed for s in steps)
        failed += not ok
        worst = max(s.certificate / s.tolerance for s in steps)
        print(f"pair {target:>3} {'CERTIFIED' if ok else 'FAILED'}  steps={len(steps)}  "
              f"worst certificate ratio={worst:.3g}  -> {path}")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcflaplace", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify catalog pairs in both directions")
    sel = v.add_mutually_exclusive_group()
    sel.add_argument("--all", action="store_true", help="verify all 14 pairs")
    sel.add_argument("--pair", action="append", type=_pair_id, help="pair id (repeatable)")
    v.add_argument("--set", type=_overrides, help="grid overrides, e.g. x=0.5,y=-0.5")
    v.add_argument("--s", type=_float_list, help="real s values for the forward check")
    v.add_argument("--t", type=_float_list, help="t values for the inverse check")
    v.add_argument("--forward-tol", type=float)
    v.add_argument("--inverse-tol", type=float)
    v.add_argument("--cross-tol", type=float)
    v.add_argument("--forward-only", action="store_true", help="skip the inverse and cross checks")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--out", default="reports", help="directory for report files")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate a single quantity or a plot-ready grid")
    e.add_argument("kind", choices=("image", "original", "density", "distribution", "pcf", "invert"))
    e.add_argument("--pair", type=_pair_id)
    e.add_argument("--set", type=_overrides, help="pair parameters, e.g. beta=1,c=0,x=0.3,y=0.4")
    e.add_argument("--s", type=_complex_list, help="Laplace parameter(s), comma separated")
    e.add_argument("--t", type=_float_list, help="time(s), comma separated")
    e.add_argument("--v", type=_complex_list, help="PCF order(s)")
    e.add_argument("--z", type=_float_list, help="PCF argument(s)")
    e.add_argument("--w", type=_float_list, help="terminal state(s)")
    e.add_argument("--w0", type=float, default=0.0)
    e.add_argument("--alpha", type=float, default=0.0)
    e.add_argument("--beta", type=float, default=1.0)
    e.add_argument("--sigma", type=float, default=math.sqrt(2.0))
    e.add_argument("--method", choices=("talbot", "euler"), default="talbot")
    e.add_argument("--nodes", type=int, default=24)
    e.add_argument("--working-tol", type=float, default=1e-7)
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("mc", help="Monte Carlo check of the OU transition law")
    m.add_argument("--n", type=int, default=1_000_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--alpha", type=float, default=0.0)
    m.add_argument("--beta", type=float, default=1.0)
    m.add_argument("--sigma", type=float, default=math.sqrt(2.0))
    m.add_argument("--w0", type=float, default=0.5)
    m.add_argument("--t", type=float, default=1.0)
    m.add_argument("--bins", type=int, default=60)
    m.add_argument("--n-se", type=float, default=4.0, help=argparse.SUPPRESS)
    m.add_argument("--out", help="write the JSON report here")
    m.set_defaults(func=cmd_mc)

    d = sub.add_parser("derive", help="re-derive catalog rows from rows 3 and 4")
    d.add_argument("--target", action="append", type=_target_id, help="derived row id (repeatable)")
    d.add_argument("--seed", type=int, default=0, help="seed for the probe points")
    d.add_argument("--out", default="traces", help="directory for trace files")
    d.add_argument("--tamper-base", action="append", choices=("3", "4"),
                   help="test hook: scale a base image by 1.001 so certification must fail")
    d.set_defaults(func=cmd_derive)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except (UsageError, DomainError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PcfLaplaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
