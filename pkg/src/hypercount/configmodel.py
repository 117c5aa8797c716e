"""Configuration model: sampling, the simplicity probability and the identity

    H_r(d, m) = ((md)!)^(r-1) / (d!)^(mr) * P_r(d, m).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from ._kernels import BACKEND
from .core import (BigCount, Configuration, Hypergraph, Params, RngStream, degrees, provides,
                   resolve_budget)
from .errors import DomainError, NonIntegralResult, RetriesExhausted

EXHAUSTIVE_LIMIT = 1e7
# exhaustive mode stores every permutation of range(md) as a row
MAX_PERM_ROWS = 1_000_000
CHUNK = 10_000

__all__ = [
    "SimplicityEstimate", "sample_configuration", "provides", "count_providing_configurations",
    "configurations_providing", "simplicity_probability", "h_from_configuration_identity",
    "sparse_collision_bound", "pair_collision_bound", "rejection_sample_regular",
    "rejection_sample_batch", "codes_to_hypergraph",
]


@dataclass(frozen=True)
class SimplicityEstimate:
    p_hat: float
    samples: int
    std_err: float
    method: str
    exact: Optional[Fraction] = None

    def to_dict(self) -> dict:
        return {
            "p_hat": self.p_hat, "samples": self.samples, "std_err": self.std_err,
            "method": self.method, "exact": None if self.exact is None else str(self.exact),
        }


def sample_configuration(p: Params, rng: RngStream) -> Configuration:
    """Uniform configuration: r-1 independent uniform permutations of range(md)."""
    gen = rng.generator()
    perms = tuple(tuple(int(x) for x in gen.permutation(p.edges)) for _ in range(p.r - 1))
    return Configuration(p, perms)


def count_providing_configurations(g: Hypergraph) -> BigCount:
    """Configurations providing a simple d-regular graph: one per spine labelling, (d!)^(mr)."""
    if not g.is_regular():
        raise DomainError("graph is not d-regular")
    p = g.params
    return math.factorial(p.d) ** (p.m * p.r)


def configurations_providing(g: Hypergraph) -> int:
    """Count, by enumerating every configuration, those that provide ``g`` (tiny cases only)."""
    p = g.params
    if math.factorial(p.edges) ** (p.r - 1) > EXHAUSTIVE_LIMIT:
        raise DomainError("too many configurations to enumerate")
    target = dict.fromkeys(g.edges, 1)
    rows = list(itertools.permutations(range(p.edges)))
    hits = 0
    for perms in itertools.product(rows, repeat=p.r - 1):
        if provides(Configuration(p, perms)).edge_mult == target:
            hits += 1
    return hits


def _simple_count_exhaustive(p: Params) -> Tuple[int, int]:
    md = p.edges
    total = math.factorial(md) ** (p.r - 1)
    if md == 0:
        return 1, 1
    perms = np.array(list(itertools.permutations(range(md))), dtype=np.int64)
    hist = BACKEND.profile_histogram(p.r, p.m, p.d, perms)
    return int(hist[md, 0, 0]), total


def _edge_codes(p: Params, gen: np.random.Generator, batch: int) -> np.ndarray:
    """Sorted vertex-tuple codes of ``batch`` random configurations, one row each."""
    md, d, m = p.edges, p.d, p.m
    base = np.tile(np.arange(md, dtype=np.int64), (batch, 1))
    codes = np.broadcast_to(np.arange(md, dtype=np.int64) // d, (batch, md)).copy()
    for _ in range(p.r - 1):
        codes = codes * m + gen.permuted(base, axis=1) // d
    codes.sort(axis=1)
    return codes


def _is_simple_rows(codes: np.ndarray) -> np.ndarray:
    if codes.shape[1] < 2:
        return np.ones(codes.shape[0], dtype=bool)
    return ~np.any(codes[:, 1:] == codes[:, :-1], axis=1)


def _mc_chunk(args) -> int:
    p, seed, index, size = args
    gen = RngStream(seed).child(index).generator()
    return int(_is_simple_rows(_edge_codes(p, gen, size)).sum())


def _map_chunks(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def simplicity_probability(p: Params, samples: int = 100_000, seed: int = 0, workers: int = 1,
                           budget: float | None = None, method: str = "auto") -> SimplicityEstimate:
    """P_r(d, m), exactly when the configuration space is small, else by Monte Carlo.

    Monte Carlo draws are split into fixed chunks, each with its own stream,
    so the estimate depends on (seed, samples) but not on ``workers``.
    """
    limit = resolve_budget(EXHAUSTIVE_LIMIT, budget)
    small = (math.factorial(p.edges) ** (p.r - 1) <= limit
             and math.factorial(p.edges) <= MAX_PERM_ROWS)
    if method == "exhaustive" or (method == "auto" and small):
        simple, total = _simple_count_exhaustive(p)
        frac = Fraction(simple, total)
        return SimplicityEstimate(float(frac), total, 0.0, "exhaustive", frac)
    if method not in ("auto", "monte_carlo"):
        raise DomainError(f"unknown method {method!r}")
    if samples < 1:
        raise DomainError("samples must be positive")
    jobs = [(p, seed, i, min(CHUNK, samples - start)) for i, start in enumerate(range(0, samples, CHUNK))]
    hits = sum(_map_chunks(_mc_chunk, jobs, workers))
    ph = hits / samples
    return SimplicityEstimate(ph, samples, math.sqrt(ph * (1 - ph) / samples), "monte_carlo")


def h_from_configuration_identity(p: Params, P: Fraction) -> BigCount:
    value = Fraction(math.factorial(p.edges) ** (p.r - 1), math.factorial(p.d) ** (p.m * p.r)) * Fraction(P)
    if value.denominator != 1:
        raise NonIntegralResult(f"((md)!)^(r-1)/(d!)^(mr) * P = {value} is not an integer")
    return value.numerator


def sparse_collision_bound(p: Params) -> float:
    """Union bound m * C(d,2) * m^(1-r) on the probability of a non-simple configuration."""
    return p.m * math.comb(p.d, 2) * float(p.m) ** (1 - p.r)


def pair_collision_bound(p: Params) -> float:
    """Probability that two given spines of one vertex land in a common edge: ((d-1)/(md-1))^(r-1)."""
    if p.edges <= 1:
        return 0.0
    return ((p.d - 1) / (p.edges - 1)) ** (p.r - 1)


def rejection_sample_regular(p: Params, max_tries: int, rng: RngStream) -> Hypergraph:
    """Uniform d-regular graph: draw configurations until one is simple."""
    for attempt in range(max_tries):
        g = provides(sample_configuration(p, rng.child(attempt)))
        if g.is_simple():
            return g.to_hypergraph()
    raise RetriesExhausted(f"no simple configuration in {max_tries} tries")


def _rejection_chunk(args):
    p, seed, index, size = args
    gen = RngStream(seed).child(index).generator()
    codes = _edge_codes(p, gen, size)
    keep = _is_simple_rows(codes)
    return codes[keep], np.flatnonzero(keep)


def rejection_sample_batch(p: Params, count: int, seed: int = 0, workers: int = 1,
                           max_tries: int | None = None) -> Tuple[np.ndarray, int]:
    """``count`` independent uniform graphs as rows of sorted edge codes.

    Returns (codes, tries) where ``tries`` is the number of configurations
    drawn up to and including the last accepted one.  An edge
    (x_1, .., x_r) is coded as the base-m number with digits x_t - 1.
    """
    max_tries = max_tries if max_tries is not None else 1000 * max(count, 1)
    kept: List[np.ndarray] = []
    have = 0
    index = 0
    while True:
        if index * CHUNK >= max_tries:
            raise RetriesExhausted(f"only {have} of {count} samples after {index * CHUNK} tries")
        jobs = [(p, seed, index + k, CHUNK) for k in range(max(1, workers))]
        for k, (rows, pos) in enumerate(_map_chunks(_rejection_chunk, jobs, workers)):
            need = count - have
            if len(rows) >= need:
                kept.append(rows[:need])
                tries = (index + k) * CHUNK + (int(pos[need - 1]) + 1 if need else 0)
                return np.concatenate(kept) if kept else rows[:0], tries
            kept.append(rows)
            have += len(rows)
        index += len(jobs)


def codes_to_hypergraph(p: Params, row) -> Hypergraph:
    edges = []
    for c in row:
        c = int(c)
        digits = []
        for _ in range(p.r):
            digits.append(c % p.m + 1)
            c //= p.m
        edges.append(tuple(reversed(digits)))
    return Hypergraph(p, tuple(edges))


def check_regular(g) -> bool:
    return bool(np.all(degrees(g) == g.params.d))
