"""Acceptance criteria as runnable checks, shared by ``hypercount repro`` and the test suite.

A config is a JSON object ``{"schema": 1, "criteria": {"<id>": {options}}}``.
Only the listed criteria run; options not given fall back to ``DEFAULTS``.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional

from . import analytic, configmodel, exact, switching
from .core import make_params
from .errors import BudgetExceeded, CheckFailed, DomainError, NonIntegralResult
from .estimate import log_dense_estimate, log_naive_estimate, stirling_binomial_log

SCHEMA = 1


@dataclass
class CriterionResult:
    id: str
    title: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def _exact_agreement(opt) -> tuple:
    compared = 0
    mismatches = []
    for r in range(2, 8):
        for m in range(1, 30):
            if m ** r > opt["max_cells"]:
                break
            for d in range(0, m ** (r - 1) + 1):
                p = make_params(r, m, d)
                got = {}
                for name, fn in (("brute", exact.count_bruteforce), ("dp", exact.count_slab_dp),
                                 ("dft", exact.count_dft)):
                    if name == "dp" and r != 3:
                        continue
                    try:
                        got[name] = fn(p)
                    except BudgetExceeded:
                        pass
                if len(set(got.values())) > 1:
                    mismatches.append(f"{(r, m, d)}: {got}")
                compared += len(got) > 1
    for (r, m, d), want in opt["known"].items():
        have = exact.count_bruteforce(make_params(r, m, d))
        if have != want:
            mismatches.append(f"H_{r}(d={d}, m={m}) = {have}, expected {want}")
    return not mismatches, f"{compared} instances cross-checked; " + ("; ".join(mismatches) or "no mismatches")


def _integral(opt):
    worst = 0.0
    for r, m, d in opt["cases"]:
        p = make_params(r, m, d)
        want = exact.count_bruteforce(p)
        got = float(exact.count_reduced_integral(p))
        worst = max(worst, abs(got - want) / want)
    return worst <= opt["rel_tol"], f"max relative error {worst:.3g}"


def _identity(opt):
    parts = []
    ok = True
    for r, m, d in opt["cases"]:
        p = make_params(r, m, d)
        est = configmodel.simplicity_probability(p, method="exhaustive")
        try:
            h = configmodel.h_from_configuration_identity(p, est.exact)
        except NonIntegralResult as e:
            ok = False
            parts.append(f"{(r, m, d)}: {e}")
            continue
        want = exact.count_bruteforce(p)
        ok &= h == want
        parts.append(f"{(r, m, d)}: P={est.exact} -> {h} (exact {want})")
    return ok, "; ".join(parts)


def _double_counting(opt):
    parts = []
    ok = True
    for m, d, ell in opt["cases"]:
        fwd, rev = switching.double_counting_check(make_params(3, m, d), ell)
        ok &= fwd == rev
        parts.append(f"(m={m},d={d},l={ell}): {fwd} = {rev}" if fwd == rev else f"(m={m},d={d},l={ell}): {fwd} != {rev}")
    return ok, "; ".join(parts)


def _sparse_probability(opt):
    p = make_params(opt["r"], opt["m"], opt["d"])
    est = configmodel.simplicity_probability(p, samples=opt["samples"], seed=opt["seed"],
                                             workers=opt.get("workers", 1), method="monte_carlo")
    target = math.exp(-p.d ** 2 / (2 * p.m))
    band = opt["tolerance"] if "tolerance" in opt else max(opt["sigmas"] * est.std_err, opt["floor"])
    gap = abs(est.p_hat - target)
    return gap <= band, f"P_hat={est.p_hat:.5f} +- {est.std_err:.5f}, target {target:.4f}, |gap|={gap:.4f}, band {band:.4f}"


def _random_sum_input(rnd: random.Random) -> switching.SumLemmaInput:
    M = rnd.randint(2, 40)
    c_hat = rnd.uniform(0.01, 1 / 3 - 1e-9)
    A = [rnd.uniform(0, c_hat * M) for _ in range(M)]
    B = []
    for i, a in enumerate(A):
        hi = 1 / i if i else 1.0
        if a > 0:
            hi = min(hi, c_hat / a)
        B.append(rnd.uniform(-c_hat / a if a > 0 else -1.0, hi))
    return switching.SumLemmaInput(M, tuple(A), tuple(B), c_hat)


def _sum_lemma(opt):
    rnd = random.Random(opt["seed"])
    cases = [_random_sum_input(rnd) for _ in range(opt["trials"])]
    M = opt["series_M"]
    cases.append(switching.SumLemmaInput(M, (1.0,) * M, (0.0,) * M, opt["series_c_hat"]))
    bad = 0
    for inp in cases:
        try:
            switching.sum_lemma_bounds(inp)
        except CheckFailed:
            bad += 1
    return bad == 0, f"{len(cases)} inputs, {bad} outside the bracket"


def _dense_identities(opt):
    failures = []
    runs = 0
    for r in opt["r"]:
        for m in opt["m"]:
            for lam in opt["lambda"]:
                q = analytic.DenseParams(r, m, Fraction(lam))
                for c in analytic.run_suites(q, seed=opt["seed"]):
                    runs += 1
                    if c.passed is False:
                        failures.append(f"{(r, m, lam)} {c.clause}")
    r, m, lam = opt["pseudo"]
    pc = analytic.check_moments((r, m, Fraction(lam)), pseudo_C=opt["pseudo_C"])[-1]
    runs += 1
    if not pc.passed:
        failures.append(f"{(r, m, lam)} {pc.clause} offset {pc.residual:.3g}")
    return not failures, f"{runs} clauses; " + ("; ".join(failures[:10]) or "all pass")


def _trend(opt):
    r, d = opt["r"], opt["d"]
    gaps = []
    for m in opt["m"]:
        p = make_params(r, m, d)
        h = exact.count_slab_dp(p)
        gaps.append(abs(math.log(h) - log_naive_estimate(p).log_abs))
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    ok = decreasing and gaps[-1] < opt["final_tol"]
    return ok, "gaps " + ", ".join(f"{g:.4f}" for g in gaps) + f"; decreasing={decreasing}"


def _stirling_dense(opt):
    parts = []
    ok = True
    for r, m, lam in opt["cases"]:
        p = make_params(r, m, Fraction(lam) * m ** (r - 1))
        diff = log_dense_estimate(p).log_abs - log_naive_estimate(p).log_abs
        ok &= abs(diff) < opt["tol"]
        parts.append(f"{(r, m, lam)}: {diff:+.5f}")
    N, lam = opt["stirling"]
    err = abs(stirling_binomial_log(N, Fraction(lam)).log_abs - math.log(math.comb(N, int(Fraction(lam) * N))))
    ok &= err <= opt["stirling_tol"]
    parts.append(f"Stirling C({N}, {lam}N) error {err:.2g}")
    return ok, "; ".join(parts)


def _uniformity(opt):
    from scipy.stats import chisquare

    p = make_params(opt["r"], opt["m"], opt["d"])
    graphs = [g.edges for g in exact.iter_regular_graphs(p)]
    index = {e: i for i, e in enumerate(graphs)}
    codes, _ = configmodel.rejection_sample_batch(p, opt["samples"], seed=opt["seed"], workers=opt.get("workers", 1))
    counts = [0] * len(graphs)
    for row in codes:
        counts[index[configmodel.codes_to_hypergraph(p, row).edges]] += 1
    stat, pval = chisquare(counts)
    return pval >= opt["alpha"], f"{len(graphs)} graphs, chi2={stat:.2f}, p={pval:.4f}"


CRITERIA: Dict[str, tuple] = {
    "1": ("exact counters agree", _exact_agreement),
    "2": ("Cauchy integral is exact", _integral),
    "3": ("configuration identity", _identity),
    "4": ("switching double counting", _double_counting),
    "5": ("sparse simplicity probability", _sparse_probability),
    "6": ("summation bracket", _sum_lemma),
    "7": ("dense machinery identities", _dense_identities),
    "8": ("convergence trend r=3 d=2", _trend),
    "9": ("Stirling and dense consistency", _stirling_dense),
    "10": ("sampler uniformity", _uniformity),
}

DEFAULTS: Dict[str, dict] = {
    "1": {"max_cells": 27, "known": {(3, 2, 1): 4, (3, 2, 2): 8, (3, 3, 1): 36, (2, 3, 2): 6}},
    "2": {"cases": [[2, 2, 1], [3, 2, 1], [3, 2, 2], [3, 2, 3]], "rel_tol": 1e-6},
    "3": {"cases": [[3, 2, 1], [3, 2, 2]]},
    "4": {"cases": [[2, 2, 1], [3, 2, 1], [3, 2, 2]]},
    "5": {"r": 3, "m": 50, "d": 5, "samples": 100_000, "seed": 1, "sigmas": 3, "floor": 0.02},
    "6": {"trials": 1000, "seed": 0, "series_M": 20, "series_c_hat": 0.05},
    "7": {"r": [3, 4, 5], "m": [2, 3, 5], "lambda": ["1/10", "1/2", "9/10"], "seed": 0,
          "pseudo": [3, 200, "1/2"], "pseudo_C": 10},
    "8": {"r": 3, "d": 2, "m": [2, 3, 4, 5, 6], "final_tol": 0.05},
    "9": {"cases": [[3, 40, "1/2"], [4, 10, "1/2"]], "tol": 0.01, "stirling": [100, "1/2"], "stirling_tol": 1e-6},
    "10": {"r": 3, "m": 2, "d": 2, "samples": 100_000, "seed": 0, "alpha": 0.001},
}


def _fix_known(opt: dict) -> dict:
    known = opt.get("known")
    if isinstance(known, list):
        opt = dict(opt, known={tuple(k[:3]): k[3] for k in known})
    return opt


def run_criterion(cid: str, options: Optional[dict] = None) -> CriterionResult:
    cid = str(cid)
    if cid not in CRITERIA:
        raise DomainError(f"unknown criterion {cid!r}")
    title, fn = CRITERIA[cid]
    opt = _fix_known(dict(DEFAULTS[cid], **(options or {})))
    t0 = time.perf_counter()
    passed, detail = fn(opt)
    return CriterionResult(cid, title, bool(passed), detail, time.perf_counter() - t0)


def default_config_text() -> str:
    return resources.files("hypercount").joinpath("data/default_repro.json").read_text()


def load_config(text: str) -> dict:
    text = text.strip()
    if not text:
        return {}
    cfg = json.loads(text)
    if not isinstance(cfg, dict):
        raise DomainError("config must be a JSON object")
    if cfg and cfg.get("schema", SCHEMA) != SCHEMA:
        raise DomainError(f"unsupported config schema {cfg.get('schema')!r}")
    crit = cfg.get("criteria", {})
    if not isinstance(crit, dict):
        raise DomainError("'criteria' must map criterion ids to option objects")
    for k in crit:
        if str(k) not in CRITERIA:
            raise DomainError(f"unknown criterion {k!r}")
    return cfg


def run_config(cfg: dict, progress: Optional[Callable[[CriterionResult], None]] = None) -> List[CriterionResult]:
    out = []
    for cid, options in cfg.get("criteria", {}).items():
        res = run_criterion(cid, options or {})
        if progress:
            progress(res)
        out.append(res)
    return out


def raise_on_failure(results: List[CriterionResult]):
    failed = [r for r in results if not r.passed]
    if failed:
        names = ", ".join(f"criterion {r.id} ({r.title})" for r in failed)
        raise CheckFailed(names, "; ".join(r.detail for r in failed))
