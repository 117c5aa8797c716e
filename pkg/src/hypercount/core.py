"""Problem parameters, hypergraph containers and scalar helpers.

Vertices are numbered class by class: class ``t`` (1-based) owns the vertex
ids ``(t-1)*m + 1 .. t*m``.  Edges are stored as tuples of ``r`` 1-based
coordinates, one per class.  Configurations use 0-based spine indices; spine
``j`` of any class is attached to vertex ``j // d`` of that class.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .errors import DomainError

BigCount = int
Edge = Tuple[int, ...]


@dataclass(frozen=True)
class Params:
    r: int
    m: int
    d: int
    # multi=True lifts d <= m^(r-1): configurations still make sense there,
    # they just never provide a simple graph
    multi: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 2:
            raise DomainError(f"r must be an integer >= 2, got {self.r!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise DomainError(f"m must be an integer >= 1, got {self.m!r}")
        if not isinstance(self.d, int) or self.d < 0 or (not self.multi and self.d > self.m ** (self.r - 1)):
            raise DomainError(
                f"d must satisfy 0 <= d <= m^(r-1) = {self.m ** (self.r - 1)}, got {self.d!r}"
            )

    @property
    def n(self) -> int:
        return self.r * self.m

    @property
    def cells(self) -> int:
        return self.m ** self.r

    @property
    def edges(self) -> int:
        return self.m * self.d

    @property
    def degree_cap(self) -> int:
        """Largest possible degree, m^(r-1)."""
        return self.m ** (self.r - 1)

    @property
    def lam_exact(self) -> Fraction:
        return Fraction(self.d, self.degree_cap)

    @property
    def Lambda_exact(self) -> Fraction:
        lam = self.lam_exact
        return lam * (1 - lam)

    @property
    def lam(self) -> float:
        return self.d / self.degree_cap

    @property
    def Lambda(self) -> float:
        return float(self.Lambda_exact)

    def complement(self) -> "Params":
        return Params(self.r, self.m, self.degree_cap - self.d)

    def as_dict(self) -> dict:
        return {
            "r": self.r, "m": self.m, "d": self.d, "n": self.n,
            "lambda": self.lam, "Lambda": self.Lambda,
        }


def make_params(r: int, m: int, d: int) -> Params:
    return Params(int(r), int(m), int(d))


def multi_params(r: int, m: int, d: int) -> Params:
    """Params for the configuration model only; any d >= 0 is accepted."""
    return Params(int(r), int(m), int(d), multi=True)


def params_from_lambda(r: int, m: int, lam) -> Params:
    """Params with d = lam * m^(r-1); ``lam`` may be a Fraction or a "p/q" string."""
    lam = Fraction(lam)
    d = lam * m ** (r - 1)
    if d.denominator != 1:
        raise DomainError(f"lambda={lam} does not give an integral degree for m={m}, r={r}")
    return make_params(r, m, int(d))


def all_cells(r: int, m: int) -> Iterable[Edge]:
    """All m^r possible edges in lexicographic order, 1-based coordinates."""
    return itertools.product(range(1, m + 1), repeat=r)


def _check_edge(e: Sequence[int], p: Params) -> Edge:
    e = tuple(int(x) for x in e)
    if len(e) != p.r or any(not 1 <= x <= p.m for x in e):
        raise DomainError(f"edge {e} is not a valid edge for r={p.r}, m={p.m}")
    return e


@dataclass(frozen=True)
class Hypergraph:
    params: Params
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        edges = tuple(sorted(_check_edge(e, self.params) for e in self.edges))
        if len(set(edges)) != len(edges):
            raise DomainError("hypergraph has repeated edges")
        object.__setattr__(self, "edges", edges)

    def is_regular(self, d: int | None = None) -> bool:
        d = self.params.d if d is None else d
        return all(x == d for x in degrees(self))

    def to_json(self) -> str:
        return json.dumps({
            "r": self.params.r, "m": self.params.m, "d": self.params.d,
            "edges": [list(e) for e in self.edges],
        }, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Hypergraph":
        obj = json.loads(text)
        return cls(make_params(obj["r"], obj["m"], obj["d"]), tuple(tuple(e) for e in obj["edges"]))


@dataclass(frozen=True)
class MultiHypergraph:
    params: Params
    edge_mult: Dict[Edge, int] = field(hash=False)

    def __post_init__(self):
        cleaned = {}
        for e, k in self.edge_mult.items():
            if k < 1:
                raise DomainError("multiplicities must be >= 1")
            cleaned[_check_edge(e, self.params)] = int(k)
        object.__setattr__(self, "edge_mult", dict(sorted(cleaned.items())))

    @property
    def total(self) -> int:
        return sum(self.edge_mult.values())

    def is_simple(self) -> bool:
        return all(k == 1 for k in self.edge_mult.values())

    def to_hypergraph(self) -> Hypergraph:
        if not self.is_simple():
            raise DomainError("multi-hypergraph has repeated edges")
        return Hypergraph(self.params, tuple(self.edge_mult))


def degrees(g) -> np.ndarray:
    """Degree of every vertex, indexed by 0-based global vertex id."""
    p = g.params
    deg = np.zeros(p.n, dtype=np.int64)
    if isinstance(g, MultiHypergraph):
        items = g.edge_mult.items()
    else:
        items = ((e, 1) for e in g.edges)
    for e, k in items:
        for t, x in enumerate(e):
            deg[t * p.m + x - 1] += k
    return deg


def complement(g: Hypergraph) -> Hypergraph:
    p = g.params
    present = set(g.edges)
    edges = tuple(e for e in all_cells(p.r, p.m) if e not in present)
    # the complement of a d-regular graph is (m^(r-1) - d)-regular
    d = p.degree_cap - p.d if g.is_regular() else p.d
    return Hypergraph(Params(p.r, p.m, d), edges)


@dataclass(frozen=True)
class Configuration:
    """A perfect matching of spines, given by r-1 permutations of range(m*d).

    Class-1 spine ``i`` is matched with spine ``perms[t-2][i]`` of class ``t``.
    """

    params: Params
    perms: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        p = self.params
        perms = tuple(tuple(int(x) for x in s) for s in self.perms)
        if len(perms) != p.r - 1:
            raise DomainError(f"expected {p.r - 1} permutations, got {len(perms)}")
        size = p.m * p.d
        for s in perms:
            if sorted(s) != list(range(size)):
                raise DomainError("configuration permutations must be bijections on range(m*d)")
        object.__setattr__(self, "perms", perms)

    @classmethod
    def identity(cls, p: Params) -> "Configuration":
        ident = tuple(range(p.m * p.d))
        return cls(p, (ident,) * (p.r - 1))

    def vertex_triples(self) -> list:
        """0-based vertex tuple (one per class) of the spine set at each class-1 spine."""
        d = self.params.d
        return [
            (i // d,) + tuple(s[i] // d for s in self.perms)
            for i in range(self.params.m * d)
        ]

    def arrays(self) -> np.ndarray:
        return np.asarray(self.perms, dtype=np.int64).reshape(self.params.r - 1, self.params.m * self.params.d)


def provides(c: Configuration) -> MultiHypergraph:
    counts = Counter(tuple(x + 1 for x in t) for t in c.vertex_triples())
    return MultiHypergraph(c.params, dict(counts))


@dataclass(frozen=True)
class LogReal:
    """A signed real number stored as (sign, log|x|)."""

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or 1")
        if self.sign == 0:
            object.__setattr__(self, "log_abs", -math.inf)

    @classmethod
    def from_value(cls, x) -> "LogReal":
        """Exact for ints and Fractions of any size; floats go through math.log."""
        if x == 0:
            return cls(0, -math.inf)
        sign = 1 if x > 0 else -1
        x = abs(x)
        if isinstance(x, Fraction):
            return cls(sign, math.log(x.numerator) - math.log(x.denominator))
        return cls(sign, math.log(x))

    @classmethod
    def from_log(cls, log_abs: float, sign: int = 1) -> "LogReal":
        return cls(sign, float(log_abs))

    def __mul__(self, other: "LogReal") -> "LogReal":
        return LogReal(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        if other.sign == 0:
            raise ZeroDivisionError("division by LogReal zero")
        return LogReal(self.sign * other.sign, self.log_abs - other.log_abs)

    def __pow__(self, k: int) -> "LogReal":
        if self.sign == 0:
            return self
        return LogReal(self.sign ** k, self.log_abs * k)

    def __neg__(self) -> "LogReal":
        return LogReal(-self.sign, self.log_abs)

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log_abs >= other.log_abs else (other, self)
        ratio = math.exp(lo.log_abs - hi.log_abs)
        if hi.sign == lo.sign:
            return LogReal(hi.sign, hi.log_abs + math.log1p(ratio))
        if ratio == 1.0:
            return LogReal(0, -math.inf)
        return LogReal(hi.sign, hi.log_abs + math.log1p(-ratio))

    def __sub__(self, other: "LogReal") -> "LogReal":
        return self + (-other)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def isclose(self, other, rel_tol: float = 1e-9) -> bool:
        """Compare in log space: |log x - log y| <= rel_tol * max(1, |log x|)."""
        if not isinstance(other, LogReal):
            other = LogReal.from_value(other)
        if self.sign != other.sign:
            return False
        if self.sign == 0:
            return True
        return abs(self.log_abs - other.log_abs) <= rel_tol * max(1.0, abs(self.log_abs))


@dataclass(frozen=True)
class RngStream:
    """Deterministic, splittable random stream.

    PCG64 seeded through SeedSequence with ``stream_id`` as spawn key; the
    sequence depends only on (seed, stream_id), not on the platform.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed & (2 ** 64 - 1), spawn_key=(self.stream_id & (2 ** 64 - 1),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, (self.stream_id * 1_000_003 + index + 1) & (2 ** 64 - 1))


def resolve_budget(default: float, explicit: float | None = None) -> float:
    """Work budget: an explicit value wins, then $HYPERCOUNT_BUDGET, then ``default``."""
    if explicit is not None:
        return float(explicit)
    env = os.environ.get("HYPERCOUNT_BUDGET")
    if env:
        try:
            return float(env)
        except ValueError:
            raise DomainError(f"HYPERCOUNT_BUDGET must be a number, got {env!r}") from None
    return float(default)
