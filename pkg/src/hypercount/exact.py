"""Exact counters for H_r(d, m).

Four independent routes to the same integer:

* ``count_bruteforce``: search over md-subsets of the m^r cells.
* ``count_slab_dp``: dynamic program over the m slabs of class 1 (r = 3).
* ``count_dft``: coefficient extraction on a root-of-unity grid.
* ``count_reduced_integral``: periodic trapezoid rule on the reduced torus.

Plus ``regular_census_bitmask``, a plain loop over every subset of cells for
the smallest instances.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Dict, Iterator, List, Tuple

import numpy as np

from ._kernels import BACKEND
from .core import BigCount, Hypergraph, LogReal, Params, all_cells, resolve_budget
from .errors import BudgetExceeded, DomainError, NonIntegralResult, NumericalInstability, UnsupportedArity

BRUTE_BUDGET = 1e8
DP_BUDGET = 1e10
DFT_BUDGET = 2e9
INTEGRAL_BUDGET = 2e8
ROUND_TOL = 1e-6

METHODS = ("brute", "dp", "dft", "integral", "auto")


def _trivial(p: Params):
    if p.d == 0 or p.d == p.degree_cap:
        return 1
    return None


def count_bruteforce(p: Params, budget: float | None = None) -> BigCount:
    """Exact count by exhaustive search over md-subsets of the cells."""
    limit = resolve_budget(BRUTE_BUDGET, budget)
    work = math.comb(p.cells, p.edges)
    if work > limit:
        raise BudgetExceeded(f"C({p.cells},{p.edges}) = {work} subsets exceeds budget {limit:g}")
    return int(BACKEND.count_regular_subsets(p.r, p.m, p.d))


def iter_regular_graphs(p: Params, budget: float | None = None) -> Iterator[Hypergraph]:
    """Every d-regular (r,r)-graph, in lexicographic order of edge lists."""
    limit = resolve_budget(BRUTE_BUDGET, budget)
    if math.comb(p.cells, p.edges) > limit:
        raise BudgetExceeded("graph enumeration exceeds budget")
    cells = list(all_cells(p.r, p.m))
    for subset in itertools.combinations(cells, p.edges):
        deg = Counter()
        for e in subset:
            for t, x in enumerate(e):
                deg[t, x] += 1
        if all(deg[t, x] == p.d for t in range(p.r) for x in range(1, p.m + 1)):
            yield Hypergraph(p, subset)


def regular_census_bitmask(r: int, m: int, max_cells: int = 24) -> Tuple[List[int], Dict[int, int]]:
    """Walk all 2^(m^r) subsets of cells.

    Returns (size_hist, regular) where size_hist[k] is the number of subsets
    with k edges and regular[d] the number that are d-regular.
    """
    ncells = m ** r
    if ncells > max_cells:
        raise BudgetExceeded(f"2^{ncells} subsets exceeds the bitmask limit 2^{max_cells}")
    cells = list(itertools.product(range(m), repeat=r))
    vmasks = []
    for t in range(r):
        for x in range(m):
            vmasks.append(sum(1 << i for i, c in enumerate(cells) if c[t] == x))
    size_hist = np.zeros(ncells + 1, dtype=np.int64)
    regular: Dict[int, int] = {}
    chunk = 1 << min(ncells, 20)
    for start in range(0, 1 << ncells, chunk):
        masks = np.arange(start, start + chunk, dtype=np.uint64)
        size_hist += np.bincount(_popcount(masks), minlength=ncells + 1)
        degs = np.stack([_popcount(masks & np.uint64(v)) for v in vmasks])
        same = np.all(degs == degs[0], axis=0)
        for d, k in zip(*np.unique(degs[0][same], return_counts=True)):
            regular[int(d)] = regular.get(int(d), 0) + int(k)
    return [int(x) for x in size_hist], regular


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    out = np.zeros(a.shape, dtype=np.int64)
    while a.any():
        out += (a & np.uint64(1)).astype(np.int64)
        a >>= np.uint64(1)
    return out


# -- slab dynamic program ----------------------------------------------------

def slab_margins(m: int, d: int) -> Counter:
    """Multiset of (row sums, column sums) over m x m 0/1 matrices with d ones."""
    out = Counter()
    for ones in itertools.combinations(range(m * m), d):
        rows = [0] * m
        cols = [0] * m
        for c in ones:
            rows[c // m] += 1
            cols[c % m] += 1
        out[tuple(rows), tuple(cols)] += 1
    return out


def count_slab_dp(p: Params, budget: float | None = None) -> BigCount:
    """Exact H_3(d, m) by a DP over the slabs of class 1.

    Slab x is the m x m matrix of edges (x, y, z).  The state is the pair of
    residual degree vectors of classes 2 and 3.  Both vectors are kept sorted:
    the slab table is invariant under row and column permutations, so all
    states in one orbit have the same set of continuations.
    """
    if p.r != 3:
        raise UnsupportedArity(f"slab DP needs r = 3, got r = {p.r}")
    limit = resolve_budget(DP_BUDGET, budget)
    m, d = p.m, p.d
    work = (d + 1) ** (2 * m) * math.comb(m * m, d)
    if work > limit:
        raise BudgetExceeded(f"slab DP work estimate {work} exceeds budget {limit:g}")
    trivial = _trivial(p)
    if trivial is not None:
        return trivial
    moves = list(slab_margins(m, d).items())
    start = (tuple([d] * m), tuple([d] * m))
    states: Dict[tuple, int] = {start: 1}
    for _ in range(m):
        nxt: Dict[tuple, int] = {}
        for (rows, cols), ways in states.items():
            for (a, b), mult in moves:
                if any(x > y for x, y in zip(a, rows)) or any(x > y for x, y in zip(b, cols)):
                    continue
                key = (tuple(sorted(x - y for x, y in zip(rows, a))),
                       tuple(sorted(x - y for x, y in zip(cols, b))))
                nxt[key] = nxt.get(key, 0) + ways * mult
        states = nxt
    return states.get((tuple([0] * m), tuple([0] * m)), 0)


# -- root-of-unity coefficient extraction -------------------------------------

def _round_checked(value: complex, what: str) -> int:
    k = round(value.real)
    scale = max(1.0, abs(value))
    if abs(value.real - k) > ROUND_TOL * scale or abs(value.imag) > ROUND_TOL * scale:
        raise NumericalInstability(f"{what}: {value} is not within {ROUND_TOL:g} of an integer")
    if abs(value) > 2.0 ** 50:
        raise NumericalInstability(f"{what}: {abs(value):.3g} is beyond exact double precision")
    return int(k)


def count_dft(p: Params, budget: float | None = None, batch: int = 4096) -> BigCount:
    """Exact count as the coefficient of prod_v x_v^d in prod_e (1 + prod_{v in e} x_v).

    Each variable has degree m^(r-1), so N = m^(r-1) + 1 grid points per
    variable recover the coefficient exactly.  Class-1 variables appear in
    disjoint sets of factors and are averaged out in closed form; one
    variable per further class is pinned to 0 by the torus symmetry.
    """
    r, m, d = p.r, p.m, p.d
    cap = p.degree_cap
    N = cap + 1
    free = (r - 1) * (m - 1)
    limit = resolve_budget(DFT_BUDGET, budget)
    work = N ** free * N * cap
    if work > limit:
        raise BudgetExceeded(f"DFT grid work {work} exceeds budget {limit:g}")
    omega = np.exp(2j * np.pi * np.arange(N) / N)
    one_plus = 1.0 + omega
    conj_d = omega[(-d * np.arange(N)) % N]
    # cell c = (y_2, .., y_r) picks grid variable (t, y_t) for t >= 2
    rest = np.array(list(itertools.product(range(m), repeat=r - 1)), dtype=np.int64).reshape(cap, r - 1)
    total = 0j
    npts = N ** free
    for start in range(0, npts, batch):
        idx = np.arange(start, min(start + batch, npts), dtype=np.int64)
        k = np.zeros((len(idx), r - 1, m), dtype=np.int64)
        rem = idx.copy()
        for t in range(r - 1):
            for y in range(m - 1):
                k[:, t, y] = rem % N
                rem //= N
        s = np.zeros((len(idx), cap), dtype=np.int64)
        for t in range(r - 1):
            s += k[:, t, rest[:, t]]
        g = np.zeros(len(idx), dtype=complex)
        for k1 in range(N):
            g += conj_d[k1] * np.prod(one_plus[(k1 + s) % N], axis=1)
        g /= N
        phase = np.prod(conj_d[k.reshape(len(idx), -1)], axis=1)
        total += np.sum(g ** m * phase)
    return _round_checked(total / npts, "DFT coefficient")


# -- reduced Cauchy integral ---------------------------------------------------

def count_reduced_integral(p: Params, budget: float | None = None, batch: int = 8192) -> LogReal:
    """log H via the periodic trapezoid rule on the slice theta_{tm} = 0 (t >= 2).

    The integrand is a trigonometric polynomial of degree at most
    m^(r-1) + d in each free variable, so 2(m^(r-1) + d) + 1 points per
    dimension integrate it exactly.
    """
    r, m, d = p.r, p.m, p.d
    if d == 0 or d == p.degree_cap:
        raise DomainError("the integral representation needs 0 < d < m^(r-1)")
    lam = p.lam
    N = 2 * (p.degree_cap + d) + 1
    free = p.n - r + 1
    limit = resolve_budget(INTEGRAL_BUDGET, budget)
    work = N ** free * p.cells
    if work > limit:
        raise BudgetExceeded(f"quadrature work {work} exceeds budget {limit:g}")
    # free coordinates: all of class 1, then the first m-1 of each later class
    free_ids = list(range(m)) + [t * m + y for t in range(1, r) for y in range(m - 1)]
    cell_vs = np.array([[t * m + c[t] for t in range(r)] for c in itertools.product(range(m), repeat=r)])
    nodes = -np.pi + 2 * np.pi * (np.arange(N) + 0.5) / N
    total = 0j
    npts = N ** free
    for start in range(0, npts, batch):
        idx = np.arange(start, min(start + batch, npts), dtype=np.int64)
        theta = np.zeros((len(idx), p.n))
        rem = idx.copy()
        for j in free_ids:
            theta[:, j] = nodes[rem % N]
            rem //= N
        phi = theta[:, cell_vs].sum(axis=2)
        vals = np.prod(1.0 + lam * (np.exp(1j * phi) - 1.0), axis=1)
        vals *= np.exp(-1j * d * theta.sum(axis=1))
        total += vals.sum()
    mean = total / npts
    if mean.real <= 0 or abs(mean.imag) > 1e-8 * abs(mean):
        raise NumericalInstability(f"quadrature mean {mean} is not a positive real")
    ent = lam * math.log(lam) + (1 - lam) * math.log(1 - lam)
    return LogReal.from_log(math.log(mean.real) - p.cells * ent)


def integral_to_int(value: LogReal) -> BigCount:
    x = float(value)
    k = round(x)
    if abs(x - k) > ROUND_TOL * max(1.0, abs(k)):
        raise NonIntegralResult(f"integral value {x} is not within {ROUND_TOL:g} of an integer")
    return int(k)


def count(p: Params, method: str = "auto", budget: float | None = None) -> Tuple[BigCount, str]:
    """Exact H_r(d, m) and the name of the method that produced it."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "brute":
        return count_bruteforce(p, budget), method
    if method == "dp":
        return count_slab_dp(p, budget), method
    if method == "dft":
        return count_dft(p, budget), method
    if method == "integral":
        return integral_to_int(count_reduced_integral(p, budget)), method
    trivial = _trivial(p)
    if trivial is not None:
        return trivial, "trivial"
    # smaller of d and its complement keeps every route cheaper
    q = p if p.d <= p.degree_cap - p.d else p.complement()
    tries = [("dp", count_slab_dp)] if p.r == 3 else []
    tries += [("brute", count_bruteforce), ("dft", count_dft)]
    for name, fn in tries:
        try:
            return fn(q, budget), name
        except BudgetExceeded:
            continue
    raise BudgetExceeded(f"no exact method fits the budget for r={p.r}, m={p.m}, d={p.d}")
