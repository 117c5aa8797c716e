"""Closed-form estimates of H_r(d, m), all in log space.

Factorials and binomials with arguments up to ``EXACT_LIMIT`` are evaluated
from exact integers; larger ones go through lgamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from .core import LogReal, Params
from .errors import DomainError

EXACT_LIMIT = 10_000
FORMULAS = ("naive", "dense", "sparse3", "bipartite")


def log_factorial(k: int) -> float:
    if k <= EXACT_LIMIT:
        return math.log(math.factorial(k))
    return math.lgamma(k + 1)


def log_binom(N: int, k: int) -> float:
    if k < 0 or k > N:
        raise DomainError(f"C({N},{k}) is zero")
    if N <= EXACT_LIMIT:
        return math.log(math.comb(N, k))
    return math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1)


def naive_estimate_exact(p: Params) -> Fraction:
    """C(m^(r-1), d)^(rm) / C(m^r, md)^(r-1) as an exact rational (m^r <= 64)."""
    if p.cells > 64:
        raise DomainError("exact rational form is limited to m^r <= 64")
    return Fraction(math.comb(p.degree_cap, p.d) ** (p.r * p.m), math.comb(p.cells, p.edges) ** (p.r - 1))


def log_naive_estimate(p: Params) -> LogReal:
    """log of the independence estimate C(m^(r-1), d)^(rm) / C(m^r, md)^(r-1)."""
    val = p.r * p.m * log_binom(p.degree_cap, p.d) - (p.r - 1) * log_binom(p.cells, p.edges)
    return LogReal.from_log(val)


def log_bipartite_estimate(p: Params) -> LogReal:
    """log H_2(d, m) ~ log(naive) - 1 for 0 < d < m."""
    if p.r != 2:
        raise DomainError(f"bipartite estimate needs r = 2, got r = {p.r}")
    if p.d in (0, p.m):
        raise DomainError("bipartite estimate excludes d = 0 and d = m")
    return LogReal.from_log(log_naive_estimate(p).log_abs - 1.0)


def log_sparse3_estimate(p: Params) -> LogReal:
    """log of ((md)!)^2 / (d!)^(3m) * exp(-d^2 / 2m), the sparse r = 3 formula."""
    if p.r != 3:
        raise DomainError(f"sparse formula needs r = 3, got r = {p.r}")
    val = 2 * log_factorial(p.edges) - 3 * p.m * log_factorial(p.d) - p.d ** 2 / (2 * p.m)
    return LogReal.from_log(val)


def _entropy(lam: float) -> float:
    return -(lam * math.log(lam) + (1 - lam) * math.log(1 - lam))


def log_dense_estimate(p: Params) -> LogReal:
    """Dense-regime closed form for log H_r(d, m)."""
    if p.d in (0, p.degree_cap):
        raise DomainError("dense formula needs 0 < d < m^(r-1)")
    r, m, n = p.r, p.m, p.n
    lam, Lam = p.lam, p.Lambda
    val = (p.cells * _entropy(lam)
           + (r - n - 1) / 2 * math.log(2 * math.pi * Lam)
           - r * (r - 1) * (m - 1) / 2 * math.log(m)
           - r / (12 * Lam * m ** (r - 2)))
    return LogReal.from_log(val)


def stirling_binomial_log(N: int, lam) -> LogReal:
    """Stirling expansion of log C(N, lam N); error O(Lambda^-3 N^-3)."""
    lam_q = Fraction(lam).limit_denominator(10 ** 12) if isinstance(lam, float) else Fraction(lam)
    if not 0 < lam_q < 1:
        raise DomainError("Stirling expansion needs 0 < lambda < 1")
    if (lam_q * N).denominator != 1:
        raise DomainError(f"lambda * N = {lam_q * N} is not an integer")
    lam = float(lam_q)
    Lam = lam * (1 - lam)
    val = N * _entropy(lam) - 0.5 * math.log(2 * math.pi * N * Lam) - (1 - Lam) / (12 * Lam * N)
    return LogReal.from_log(val)


@dataclass
class EstimateReport:
    params: Params
    log_naive: LogReal
    log_dense: Optional[LogReal] = None
    log_sparse3: Optional[LogReal] = None
    log_bipartite: Optional[LogReal] = None
    log_exact: Optional[LogReal] = None
    exact_method: Optional[str] = None
    ratios: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        base = {"dense": self.log_dense, "sparse3": self.log_sparse3, "bipartite": self.log_bipartite}
        for name, v in base.items():
            if v is not None:
                self.ratios[f"{name}_minus_naive"] = v.log_abs - self.log_naive.log_abs
        if self.log_exact is not None:
            for name, v in dict(base, naive=self.log_naive).items():
                if v is not None:
                    self.ratios[f"exact_minus_{name}"] = self.log_exact.log_abs - v.log_abs

    def to_dict(self) -> dict:
        out = {"params": self.params.as_dict()}
        for key in ("log_naive", "log_dense", "log_sparse3", "log_bipartite", "log_exact"):
            v = getattr(self, key)
            out[key] = None if v is None else v.log_abs
        out["exact_method"] = self.exact_method
        out["ratios"] = dict(self.ratios)
        return out


def estimate_report(p: Params, formulas=FORMULAS, exact_count: Optional[int] = None,
                    exact_method: Optional[str] = None) -> EstimateReport:
    """Evaluate the requested formulas; those outside their domain are left empty."""
    fns = {"dense": log_dense_estimate, "sparse3": log_sparse3_estimate, "bipartite": log_bipartite_estimate}
    got = {}
    for name in formulas:
        if name == "naive" or name not in fns:
            continue
        try:
            got["log_" + name] = fns[name](p)
        except DomainError:
            pass
    log_exact = LogReal.from_value(exact_count) if exact_count else None
    return EstimateReport(p, log_naive_estimate(p), log_exact=log_exact, exact_method=exact_method, **got)
