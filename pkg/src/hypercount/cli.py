"""Command line entry point: ``hypercount <subcommand> [flags]``.

Results go to stdout (JSON by default, CSV with --format csv), diagnostics
to stderr.  Exit codes: 0 ok, 1 usage, 2 domain error, 3 budget exceeded,
4 failed check.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import __version__, acceptance, analytic, configmodel, exact, switching
from .core import LogReal, make_params, multi_params, params_from_lambda
from .errors import (BudgetExceeded, CheckFailed, DomainError, HypercountError, InvalidSwitching,
                     NonIntegralResult, NumericalInstability, RetriesExhausted)
from .estimate import FORMULAS, estimate_report, log_dense_estimate, log_naive_estimate

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_BUDGET, EXIT_CHECK = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _common(p: argparse.ArgumentParser, d=True, lam=False):
    p.add_argument("--r", type=int, default=3, help="number of vertex classes (default 3)")
    p.add_argument("--m", type=int, required=True, help="vertices per class")
    if d:
        p.add_argument("--d", type=int, help="vertex degree")
    if lam or d:
        p.add_argument("--lambda", dest="lam", type=_fraction, help="density p/q, alternative to --d")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--budget", type=float, help="work budget (overrides $HYPERCOUNT_BUDGET)")
    p.add_argument("--manifest", type=Path, help="write a run manifest JSON here")


def build_parser() -> argparse.ArgumentParser:
    ap = Parser(prog="hypercount", description="Count and estimate d-regular r-partite r-uniform hypergraphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("count", help="exact H_r(d, m)")
    _common(p)
    p.add_argument("--method", choices=exact.METHODS, default="auto")

    p = sub.add_parser("estimate", help="closed-form estimates")
    _common(p)
    p.add_argument("--formula", choices=FORMULAS + ("all",), default="all")
    p.add_argument("--exact", action="store_true", help="also compute the exact count when within budget")

    p = sub.add_parser("sweep", help="estimates over a range of degrees (CSV)")
    _common(p, d=False)
    p.add_argument("--d-from", type=int, default=0)
    p.add_argument("--d-to", type=int)
    p.add_argument("--no-exact", action="store_true", help="skip exact counts")

    p = sub.add_parser("sample", help="uniform random regular graphs (JSON lines)")
    _common(p)
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--workers", type=_positive)

    p = sub.add_parser("psimple", help="probability that a configuration is simple")
    _common(p)
    p.add_argument("--samples", type=_positive, default=100_000)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--workers", type=_positive)
    p.add_argument("--method", choices=("auto", "exhaustive", "monte_carlo"), default="auto")

    p = sub.add_parser("switch-census", help="exhaustive switching census for r = 3 (CSV)")
    _common(p)
    p.add_argument("--lmax", type=int)

    p = sub.add_parser("verify", help="dense-regime identity suites")
    _common(p, d=False, lam=True)
    p.add_argument("--suite", choices=analytic.SUITES + ("all",), default="all")
    p.add_argument("--seed", type=_u64, default=0)

    p = sub.add_parser("repro", help="run an acceptance config")
    p.add_argument("config", nargs="?", type=Path, help="JSON config (default: the shipped full run)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--workers", type=_positive)
    p.add_argument("--manifest", type=Path)
    return ap


def _params(a, multi=False):
    if a.lam is not None:
        if a.d is not None:
            raise UsageError("give --d or --lambda, not both")
        return params_from_lambda(a.r, a.m, a.lam)
    if a.d is None:
        raise UsageError("--d or --lambda is required")
    return (multi_params if multi else make_params)(a.r, a.m, a.d)


def _workers(a) -> int:
    return a.workers or os.cpu_count() or 1


def _emit_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])


def _emit_json(out, obj):
    out.write(json.dumps(obj, sort_keys=True) + "\n")


def _emit(out, fmt, obj, header=None, rows=None):
    if fmt == "csv":
        if header is None:
            header, rows = list(obj), [list(obj.values())]
        _emit_csv(out, header, rows)
    else:
        _emit_json(out, obj)


def cmd_count(a, out):
    p = _params(a)
    value, method = exact.count(p, a.method, a.budget)
    obj = {"r": p.r, "m": p.m, "d": p.d, "method": method,
           "count_exact": str(value), "count_log": LogReal.from_value(value).log_abs if value else None}
    _emit(out, a.format, obj)


def cmd_estimate(a, out):
    p = _params(a)
    formulas = FORMULAS if a.formula == "all" else ("naive", a.formula)
    exact_value = method = None
    if a.exact:
        try:
            exact_value, method = exact.count(p, "auto", a.budget)
        except BudgetExceeded as e:
            print(f"exact count skipped: {e}", file=sys.stderr)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = estimate_report(p, formulas, exact_value, method)
    if a.formula not in ("all", "naive") and getattr(rep, "log_" + a.formula) is None:
        raise DomainError(f"formula {a.formula!r} does not apply at r={p.r}, m={p.m}, d={p.d}")
    obj = rep.to_dict()
    obj["method"] = "log"
    if a.format == "csv":
        flat = dict(obj["params"])
        flat.update({k: v for k, v in obj.items() if k not in ("params", "ratios")})
        flat.update(obj["ratios"])
        _emit(out, "csv", flat)
    else:
        _emit(out, "json", obj)


SWEEP_COLUMNS = ["d", "log_naive", "log_dense", "log_exact", "ratio"]


def cmd_sweep(a, out):
    cap = a.m ** (a.r - 1)
    hi = cap if a.d_to is None else a.d_to
    if not 0 <= a.d_from <= hi <= cap:
        raise DomainError(f"need 0 <= d-from <= d-to <= {cap}")
    rows = []
    for d in range(a.d_from, hi + 1):
        p = make_params(a.r, a.m, d)
        naive = log_naive_estimate(p).log_abs
        try:
            dense = log_dense_estimate(p).log_abs
        except DomainError:
            dense = None
        ex = None
        if not a.no_exact:
            try:
                ex = math.log(exact.count(p, "auto", a.budget)[0])
            except BudgetExceeded:
                pass
        ref = ex if ex is not None else dense
        ratio = None if ref is None else math.exp(ref - naive)
        rows.append([d, naive, dense, ex, ratio])
    if (a.format or "csv") == "csv":
        _emit_csv(out, SWEEP_COLUMNS, rows)
    else:
        _emit_json(out, {"r": a.r, "m": a.m, "rows": [dict(zip(SWEEP_COLUMNS, r)) for r in rows]})


def cmd_sample(a, out):
    p = _params(a)
    codes, tries = configmodel.rejection_sample_batch(p, a.count, seed=a.seed, workers=_workers(a))
    for row in codes:
        out.write(configmodel.codes_to_hypergraph(p, row).to_json() + "\n")
    print(f"{a.count} graphs from {tries} configurations", file=sys.stderr)


def cmd_psimple(a, out):
    p = _params(a, multi=True)
    est = configmodel.simplicity_probability(p, a.samples, a.seed, _workers(a), a.budget, a.method)
    obj = {"r": p.r, "m": p.m, "d": p.d, "seed": a.seed}
    obj.update(est.to_dict())
    _emit(out, a.format, obj)


CENSUS_COLUMNS = ["ell", "size", "fwd_total", "rev_total", "ratio", "predicted_ratio"]


def cmd_switch_census(a, out):
    if a.r != 3:
        raise DomainError("switchings are defined for r = 3 only")
    p = _params(a, multi=True)
    census = switching.switching_census(p, a.budget)
    rows = [list(r) for r in census.rows(p, a.lmax)]
    print(f"configurations with an edge of multiplicity >= 3: {census.heavy}", file=sys.stderr)
    if (a.format or "csv") == "csv":
        _emit_csv(out, CENSUS_COLUMNS, rows)
    else:
        _emit_json(out, {"m": p.m, "d": p.d, "sizes": list(census.sizes), "heavy": census.heavy,
                         "rows": [dict(zip(CENSUS_COLUMNS, r)) for r in rows]})


def cmd_verify(a, out):
    if a.lam is None:
        raise UsageError("--lambda is required")
    q = analytic.DenseParams(a.r, a.m, a.lam)
    suites = analytic.SUITES if a.suite == "all" else (a.suite,)
    clauses = analytic.run_suites(q, suites, seed=a.seed)
    passed = all(c.passed is not False for c in clauses)
    if a.format == "csv":
        _emit_csv(out, ["clause", "passed", "residual", "detail"],
                  [[c.clause, c.passed, c.residual, c.detail] for c in clauses])
    else:
        _emit_json(out, {"r": q.r, "m": q.m, "lambda": str(q.lam), "suites": list(suites),
                         "passed": passed, "clauses": [c.to_dict() for c in clauses]})
    if not passed:
        bad = [c.clause for c in clauses if c.passed is False]
        raise CheckFailed(", ".join(bad))


def cmd_repro(a, out):
    text = a.config.read_text() if a.config else acceptance.default_config_text()
    cfg = acceptance.load_config(text)
    if not cfg.get("criteria"):
        print("warning: config lists no criteria; nothing to do", file=sys.stderr)
        return
    if a.workers:
        for opt in cfg["criteria"].values():
            opt.setdefault("workers", a.workers)

    def progress(res):
        print(f"criterion {res.id}: {'PASS' if res.passed else 'FAIL'} ({res.seconds:.1f}s) {res.detail}",
              file=sys.stderr)

    results = acceptance.run_config(cfg, progress)
    rows = [[r.id, r.title, "pass" if r.passed else "fail", r.detail] for r in results]
    if (a.format or "csv") == "csv":
        _emit_csv(out, ["criterion", "title", "result", "detail"], rows)
    else:
        _emit_json(out, {"results": [dict(r.to_dict(), seconds=None) for r in results]})
    acceptance.raise_on_failure(results)


COMMANDS = {
    "count": cmd_count, "estimate": cmd_estimate, "sweep": cmd_sweep, "sample": cmd_sample,
    "psimple": cmd_psimple, "switch-census": cmd_switch_census, "verify": cmd_verify, "repro": cmd_repro,
}


def _exit_code(err: Exception) -> int:
    if isinstance(err, (BudgetExceeded, RetriesExhausted)):
        return EXIT_BUDGET
    if isinstance(err, (CheckFailed, NumericalInstability, NonIntegralResult)):
        return EXIT_CHECK
    return EXIT_DOMAIN


def _write_manifest(path: Path, a, argv, text: str, seconds: float, code: int):
    manifest = {
        "subcommand": a.command,
        "argv": list(argv),
        "parameters": {k: str(v) if isinstance(v, (Fraction, Path)) else v
                       for k, v in vars(a).items() if k not in ("command", "manifest")},
        "seed": getattr(a, "seed", None),
        "workers": getattr(a, "workers", None),
        "version": __version__,
        "wall_clock_seconds": round(seconds, 3),
        "exit_code": code,
        "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n")


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    try:
        a = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"hypercount: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    buf = io.StringIO()
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        COMMANDS[a.command](a, buf)
    except UsageError as e:
        print(f"hypercount: {e}", file=sys.stderr)
        code = EXIT_USAGE
    except (HypercountError, InvalidSwitching) as e:
        print(f"hypercount: {type(e).__name__}: {e}", file=sys.stderr)
        code = _exit_code(e)
    text = buf.getvalue()
    stdout.write(text)
    stdout.flush()
    if getattr(a, "manifest", None):
        _write_manifest(a.manifest, a, argv, text, time.perf_counter() - t0, code)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
