"""Switchings on r = 3 configurations.

A switching touches 21 spines: a, b, c and a_j, b_j, c_j for j = 1..6
(letters name the class).  The forward direction replaces the spine sets

    F1 = {a,b,c} {a1,b5,c3} {a2,b4,c6} {a3,b1,c5} {a4,b6,c2} {a5,b3,c1} {a6,b2,c4}

by

    F2 = {a,b2,c1} {a1,b,c2} {a2,b1,c} {a3,b3,c3} {a4,b4,c4} {a5,b5,c5} {a6,b6,c6}

and removes one double edge; the reverse direction undoes it.

Only the vertices of {a, a1, a2}, of {b, b1, b2} and of {c, c1, c2} may
coincide; every other spine sits on a vertex of its own.
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Tuple

import mpmath
import numpy as np

from ._kernels import BACKEND, python_backend
from .core import Configuration, Params, RngStream, resolve_budget
from .configmodel import sample_configuration
from .errors import (BudgetExceeded, CheckFailed, DomainError, HypothesisViolated, InvalidSwitching,
                     RegimeWarning, RetriesExhausted, UnsupportedArity)

CENSUS_LIMIT = 1e7

SITE_NAMES = ("a", "b", "c") + tuple(f"{x}{j}" for j in range(1, 7) for x in "abc")
_CLASS = {name: "abc".index(name[0]) for name in SITE_NAMES}
FREE = {"a", "a1", "a2", "b", "b1", "b2", "c", "c1", "c2"}

F1 = (("a", "b", "c"), ("a1", "b5", "c3"), ("a2", "b4", "c6"), ("a3", "b1", "c5"),
      ("a4", "b6", "c2"), ("a5", "b3", "c1"), ("a6", "b2", "c4"))
F2 = (("a", "b2", "c1"), ("a1", "b", "c2"), ("a2", "b1", "c")) + tuple(
    (f"a{j}", f"b{j}", f"c{j}") for j in range(3, 7))


@dataclass(frozen=True)
class MultiplicityProfile:
    simple: int
    double: int
    triple_or_more: int

    @property
    def ell(self) -> int:
        return self.double

    def in_class(self, ell: int) -> bool:
        return self.triple_or_more == 0 and self.double == ell


@dataclass(frozen=True)
class SwitchingSites:
    """Spine index of each of the 21 named spines, plus the direction."""

    spines: Tuple[int, ...]
    direction: str

    def __post_init__(self):
        if self.direction not in ("forward", "reverse"):
            raise DomainError(f"direction must be forward or reverse, got {self.direction!r}")
        if len(self.spines) != len(SITE_NAMES):
            raise DomainError("a switching names exactly 21 spines")

    def spine(self, name: str) -> int:
        return self.spines[SITE_NAMES.index(name)]

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(SITE_NAMES, self.spines))

    def inverse(self) -> "SwitchingSites":
        """Same spines, opposite direction."""
        return SwitchingSites(self.spines, "reverse" if self.direction == "forward" else "forward")

    @classmethod
    def from_dict(cls, spines: Dict[str, int], direction: str) -> "SwitchingSites":
        return cls(tuple(int(spines[k]) for k in SITE_NAMES), direction)


def _require_r3(c: Configuration):
    if c.params.r != 3:
        raise UnsupportedArity(f"switchings are defined for r = 3, got r = {c.params.r}")


def multiplicity_profile(c: Configuration) -> MultiplicityProfile:
    counts = Counter(Counter(c.vertex_triples()).values())
    heavy = sum(v for k, v in counts.items() if k >= 3)
    return MultiplicityProfile(counts.get(1, 0), counts.get(2, 0), heavy)


def m_cap(p: Params) -> int:
    """floor(8 d^2 / m + ln m), the cap on the number of double edges."""
    with mpmath.workdps(50):
        return int(mpmath.floor(mpmath.mpf(8 * p.d ** 2) / p.m + mpmath.log(p.m)))


def eps_ell(p: Params, ell: int) -> float:
    """Relative error scale (ell + d) / (md) of the switching counts."""
    return (ell + p.d) / p.edges


# -- enumeration ---------------------------------------------------------------

def _rows(c: Configuration):
    s2, s3 = c.perms
    return list(s2), list(s3)


def _forward_site(s2, s3, t) -> SwitchingSites:
    h, e1, e2, e3, e4, e5, e6 = t
    sp = {"a": h, "b": s2[h], "c": s3[h],
          "a1": e1, "b5": s2[e1], "c3": s3[e1],
          "a2": e2, "b4": s2[e2], "c6": s3[e2],
          "a3": e3, "b1": s2[e3], "c5": s3[e3],
          "a4": e4, "b6": s2[e4], "c2": s3[e4],
          "a5": e5, "b3": s2[e5], "c1": s3[e5],
          "a6": e6, "b2": s2[e6], "c4": s3[e6]}
    return SwitchingSites.from_dict(sp, "forward")


def _reverse_site(s2, s3, t) -> SwitchingSites:
    _, ea, eb, ec, *rest = t
    sp = {"a": ea, "b2": s2[ea], "c1": s3[ea],
          "a1": eb, "b": s2[eb], "c2": s3[eb],
          "a2": ec, "b1": s2[ec], "c": s3[ec]}
    for j, e in zip(range(3, 7), rest):
        sp[f"a{j}"], sp[f"b{j}"], sp[f"c{j}"] = e, s2[e], s3[e]
    return SwitchingSites.from_dict(sp, "reverse")


def _check_no_triple(c: Configuration):
    if multiplicity_profile(c).triple_or_more:
        raise DomainError("configuration has an edge of multiplicity >= 3")


def enumerate_forward_switchings(c: Configuration) -> List[SwitchingSites]:
    _require_r3(c)
    _check_no_triple(c)
    s2, s3 = _rows(c)
    p = c.params
    return [_forward_site(s2, s3, t) for t in python_backend.iter_forward(p.m, p.d, s2, s3)]


def enumerate_reverse_switchings(c: Configuration) -> List[SwitchingSites]:
    _require_r3(c)
    _check_no_triple(c)
    s2, s3 = _rows(c)
    p = c.params
    return [_reverse_site(s2, s3, t) for t in python_backend.iter_reverse(p.m, p.d, s2, s3)]


def count_forward_switchings(c: Configuration) -> int:
    _require_r3(c)
    _check_no_triple(c)
    s2, s3 = c.arrays()
    return int(BACKEND.count_forward(c.params.m, c.params.d, s2, s3))


def count_reverse_switchings(c: Configuration) -> int:
    _require_r3(c)
    _check_no_triple(c)
    s2, s3 = c.arrays()
    return int(BACKEND.count_reverse(c.params.m, c.params.d, s2, s3))


def predicted_forward(p: Params, ell: int) -> int:
    return 2 * ell * p.m ** 6 * p.d ** 6


def predicted_reverse(p: Params) -> int:
    return p.m ** 5 * p.d ** 5 * (p.d - 1) ** 3


# -- independent condition checker ---------------------------------------------

def check_switching(c: Configuration, s: SwitchingSites) -> List[str]:
    """Names of the conditions that ``s`` violates on ``c`` (empty when valid).

    Works from the spines alone: the spine sets of ``c`` are rebuilt from
    the permutations and every condition is tested literally.
    """
    _require_r3(c)
    d = c.params.d
    size = c.params.edges
    sp = s.as_dict()
    bad = []
    if any(not 0 <= v < size for v in sp.values()):
        return ["spine-range"]
    for cls in range(3):
        names = [k for k in SITE_NAMES if _CLASS[k] == cls]
        if len({sp[k] for k in names}) != len(names):
            bad.append("distinct-spines")
        verts = {k: sp[k] // d for k in names}
        fixed = [verts[k] for k in names if k not in FREE]
        loose = {verts[k] for k in names if k in FREE}
        if len(set(fixed)) != len(fixed) or loose & set(fixed):
            bad.append("distinct-vertices")
    # spine sets of c, keyed by their class-1 spine
    s2, s3 = c.perms
    sets = {(i, s2[i], s3[i]) for i in range(size)}
    mult = Counter((i // d, s2[i] // d, s3[i] // d) for i in range(size))

    def spine_set(names):
        return tuple(sp[k] for k in names)

    def vert(names):
        return tuple(sp[k] // d for k in names)

    if s.direction == "forward":
        if any(spine_set(t) not in sets for t in F1):
            bad.append("F1-present")
        elif mult[vert(F1[0])] != 2 or any(mult[vert(t)] != 1 for t in F1[1:]):
            bad.append("F1")
        if any(mult[vert(t)] for t in F2):
            bad.append("F2")
        if len({vert(t) for t in F2[:3]}) != 3:
            bad.append("F3")
    else:
        if any(spine_set(t) not in sets for t in F2):
            bad.append("F2-present")
        elif mult[vert(F1[0])] != 1 or any(mult[vert(t)] != 1 for t in F2):
            bad.append("R1")
        if any(mult[vert(t)] for t in F1[1:]):
            bad.append("R2")
    return bad


def apply_switching(c: Configuration, s: SwitchingSites) -> Configuration:
    """Rewire the spine sets named by ``s``; raises InvalidSwitching if ``s`` is not valid for ``c``."""
    bad = check_switching(c, s)
    if bad:
        raise InvalidSwitching(f"{s.direction} switching violates {', '.join(bad)}")
    sp = s.as_dict()
    new_sets = F2 if s.direction == "forward" else F1
    s2, s3 = (list(x) for x in c.perms)
    for a, b, cc in new_sets:
        s2[sp[a]] = sp[b]
        s3[sp[a]] = sp[cc]
    return Configuration(c.params, (tuple(s2), tuple(s3)))


# -- exhaustive censuses -----------------------------------------------------

def _all_perms(p: Params, budget):
    limit = resolve_budget(CENSUS_LIMIT, budget)
    total = math.factorial(p.edges) ** 2
    if total > limit:
        raise BudgetExceeded(f"{total} configurations exceed the census budget {limit:g}")
    return np.array(list(itertools.permutations(range(p.edges))), dtype=np.int64).reshape(-1, p.edges)


@dataclass(frozen=True)
class TClassCensus:
    sizes: Tuple[int, ...]
    heavy: int

    @property
    def total(self) -> int:
        return sum(self.sizes) + self.heavy


def t_class_census(p: Params, budget: float | None = None) -> TClassCensus:
    """|T(ell)| for every ell, plus the number of configurations with a heavier edge."""
    if p.r != 3:
        raise UnsupportedArity("the census is defined for r = 3")
    perms = _all_perms(p, budget)
    hist = BACKEND.profile_histogram(3, p.m, p.d, perms)
    sizes = [int(x) for x in hist[:, :, 0].sum(axis=0)]
    while len(sizes) > 1 and sizes[-1] == 0:
        sizes.pop()
    return TClassCensus(tuple(sizes), int(hist[:, :, 1:].sum()))


@dataclass(frozen=True)
class SwitchingCensus:
    sizes: Tuple[int, ...]
    forward: Tuple[int, ...]
    reverse: Tuple[int, ...]
    heavy: int

    def rows(self, p: Params, lmax: int | None = None):
        """(ell, |T(ell)|, fwd_total, rev_total, ratio, predicted_ratio) for ell >= 1.

        ``rev_total`` sums reverse switchings over T(ell-1); ``ratio`` is
        |T(ell)| / |T(ell-1)|.
        """
        top = len(self.sizes) - 1 if lmax is None else min(lmax, len(self.sizes) - 1)
        out = []
        for ell in range(1, top + 1):
            prev = self.sizes[ell - 1]
            ratio = self.sizes[ell] / prev if prev else float("nan")
            pred = (p.d - 1) ** 3 / (2 * ell * p.d * p.m)
            out.append((ell, self.sizes[ell], self.forward[ell], self.reverse[ell - 1], ratio, pred))
        return out


def switching_census(p: Params, budget: float | None = None) -> SwitchingCensus:
    if p.r != 3:
        raise UnsupportedArity("the census is defined for r = 3")
    perms = _all_perms(p, budget)
    T, fwd, rev, heavy = BACKEND.switching_census(p.m, p.d, perms)
    return SwitchingCensus(tuple(int(x) for x in T), tuple(int(x) for x in fwd),
                           tuple(int(x) for x in rev), int(heavy))


def double_counting_check(p: Params, ell: int, budget: float | None = None) -> Tuple[int, int]:
    """(total forward switchings over T(ell), total reverse switchings over T(ell-1))."""
    if ell < 1:
        return 0, 0
    census = switching_census(p, budget)
    fwd = census.forward[ell] if ell < len(census.forward) else 0
    rev = census.reverse[ell - 1] if ell - 1 < len(census.reverse) else 0
    return fwd, rev


def sample_t_class(p: Params, ell: int, rng: RngStream, max_tries: int = 100_000) -> Configuration:
    """A uniform random member of T(ell), by rejection."""
    for attempt in range(max_tries):
        c = sample_configuration(p, rng.child(attempt))
        if multiplicity_profile(c).in_class(ell):
            return c
    raise RetriesExhausted(f"no configuration in T({ell}) after {max_tries} tries")


# -- summation bounds ----------------------------------------------------------

@dataclass(frozen=True)
class SumLemmaInput:
    M: int
    A: Tuple[float, ...]
    B: Tuple[float, ...]
    c_hat: float


def check_sum_lemma_hypotheses(inp: SumLemmaInput) -> None:
    if inp.M < 2:
        raise HypothesisViolated("M >= 2")
    if len(inp.A) != inp.M or len(inp.B) != inp.M:
        raise HypothesisViolated("A and B have length M")
    if any(a < 0 for a in inp.A):
        raise HypothesisViolated("A(i) >= 0")
    if any(1 - i * b < 0 for i, b in enumerate(inp.B)):
        raise HypothesisViolated("1 - (i-1) B(i) >= 0")
    if not 0 < inp.c_hat < 1 / 3:
        raise HypothesisViolated("0 < c_hat < 1/3")
    C = [a * b for a, b in zip(inp.A, inp.B)]
    if max(inp.A) / inp.M > inp.c_hat or max(abs(min(C)), abs(max(C))) > inp.c_hat:
        raise HypothesisViolated("max{A/M, |C|} <= c_hat")


def sum_lemma_bounds(inp: SumLemmaInput) -> Tuple[float, float, float]:
    """(lower, upper, sum_{i=0}^M n_i) with n_0 = 1, n_i = n_{i-1} A(i) (1 - (i-1) B(i)) / i."""
    check_sum_lemma_hypotheses(inp)
    A1, A2 = min(inp.A), max(inp.A)
    C = [a * b for a, b in zip(inp.A, inp.B)]
    C1, C2 = min(C), max(C)
    n_i, total = 1.0, 1.0
    for i in range(1, inp.M + 1):
        n_i = n_i * inp.A[i - 1] * (1 - (i - 1) * inp.B[i - 1]) / i
        total += n_i
    tail = (2 * math.e * inp.c_hat) ** inp.M
    lower = math.exp(A1 - 0.5 * A1 * C2) - tail
    upper = math.exp(A2 - 0.5 * A2 * C1 + 0.5 * A2 * C1 ** 2) + tail
    if not lower <= total <= upper:
        raise CheckFailed("sum-lemma bracket", f"{lower} <= {total} <= {upper} fails")
    return lower, upper, total


def switching_sum_input(p: Params, c_hat: float = 0.125) -> SumLemmaInput:
    """Inputs for the ratio |T(i)|/|T(0)|: A = (d-1)^3 / (2dm), B = 1/(md), M = m_cap."""
    M = m_cap(p)
    a = (p.d - 1) ** 3 / (2 * p.d * p.m)
    b = 1 / p.edges
    return SumLemmaInput(M, (a,) * M, (b,) * M, c_hat)


def p3_sparse_formula(p: Params) -> float:
    """exp(-d^2 / 2m), the limiting probability that an r = 3 configuration is simple."""
    if p.d < 2 or p.d ** 2 > p.m:
        warnings.warn(f"d = {p.d}, m = {p.m} is outside 2 <= d, d^2 <= m", RegimeWarning, stacklevel=2)
    return math.exp(-p.d ** 2 / (2 * p.m))


def p3_switching_formula(p: Params) -> float:
    """exp(-(d-1)^3 / (2dm)), the value the switching ratios sum to before d ~ d-1 is applied."""
    return math.exp(-(p.d - 1) ** 3 / (2 * p.d * p.m))


def mc_forward_mean(p: Params, ell: int, samples: int, seed: int = 0) -> Tuple[float, float]:
    """Mean and standard error of the forward count over random members of T(ell)."""
    vals = [count_forward_switchings(sample_t_class(p, ell, RngStream(seed, k))) for k in range(samples)]
    arr = np.asarray(vals, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0

