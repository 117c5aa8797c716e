"""Dense-regime analysis: the integrand F, its structured matrices and the
Gaussian moments that produce the correction term -r / (12 Lambda m^(r-2)).

Everything here is parametrised by (r, m, lambda) with lambda rational;
d = lambda m^(r-1) need not be an integer.  Vertices are 0-based: class t
(0-based) owns indices t*m .. t*m + m - 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import LogReal, Params
from .errors import CheckFailed, DomainError

Number = Union[int, float, Fraction]

ALGEBRA_TOL = 1e-12
DET_TOL = 1e-9
SYMMETRY_TOL = 1e-10
DENSE_LIMIT = 200
SUITES = ("linear", "det", "moments", "taylor", "symmetry")


@dataclass(frozen=True)
class DenseParams:
    r: int
    m: int
    lam: Fraction

    def __post_init__(self):
        lam = Fraction(self.lam)
        object.__setattr__(self, "lam", lam)
        if self.r < 2 or self.m < 1:
            raise DomainError("need r >= 2 and m >= 1")
        if not 0 <= lam <= 1:
            raise DomainError(f"lambda must lie in [0, 1], got {lam}")

    @classmethod
    def of(cls, p) -> "DenseParams":
        if isinstance(p, DenseParams):
            return p
        if isinstance(p, Params):
            return cls(p.r, p.m, p.lam_exact)
        r, m, lam = p
        return cls(int(r), int(m), Fraction(lam))

    @property
    def n(self) -> int:
        return self.r * self.m

    @property
    def cells(self) -> int:
        return self.m ** self.r

    @property
    def d(self) -> Fraction:
        return self.lam * self.m ** (self.r - 1)

    @property
    def Lambda_exact(self) -> Fraction:
        return self.lam * (1 - self.lam)

    @property
    def Lambda(self) -> float:
        return float(self.Lambda_exact)

    def require_interior(self):
        if self.lam in (0, 1):
            raise DomainError("lambda must lie strictly between 0 and 1")


@dataclass
class Clause:
    clause: str
    passed: Optional[bool]
    residual: float = 0.0
    detail: str = ""

    def __post_init__(self):
        if self.passed is not None:
            self.passed = bool(self.passed)
        self.residual = float(self.residual)

    def to_dict(self) -> dict:
        return {"clause": self.clause, "passed": self.passed, "residual": self.residual, "detail": self.detail}


def _raise_first(report: List[Clause]):
    for c in report:
        if c.passed is False:
            raise CheckFailed(c.clause, c.detail or f"residual {c.residual:.3g}")


def _close(clause: str, got, want, tol: float, relative: bool = True) -> Clause:
    got = np.asarray(got, dtype=complex)
    want = np.asarray(want, dtype=complex)
    err = float(np.max(np.abs(got - want))) if got.size else 0.0
    if relative:
        err /= max(1.0, float(np.max(np.abs(want))) if want.size else 1.0)
    return Clause(clause, bool(err <= tol), err)


# -- the integrand ---------------------------------------------------------------

@lru_cache(maxsize=32)
def edge_vertices(r: int, m: int) -> np.ndarray:
    """(m^r, r) array: the 0-based global vertex ids of every edge."""
    cells = np.array(list(itertools.product(range(m), repeat=r)), dtype=np.int64).reshape(-1, r)
    return cells + np.arange(r) * m


def eval_F(theta, p) -> complex:
    """prod_e (1 + lambda (exp(i sum_{j in e} theta_j) - 1)) * exp(-i d sum_j theta_j).

    ``theta`` may carry leading batch dimensions.
    """
    q = DenseParams.of(p)
    q.require_interior()
    theta = np.asarray(theta, dtype=float)
    lam = float(q.lam)
    phi = theta[..., edge_vertices(q.r, q.m)].sum(axis=-1)
    out = np.prod(1.0 + lam * (np.exp(1j * phi) - 1.0), axis=-1)
    out = out * np.exp(-1j * float(q.d) * theta.sum(axis=-1))
    return out if out.ndim else complex(out)


def log_F(theta, p) -> complex:
    """Sum of principal logs of the factors of F; valid where no factor winds."""
    q = DenseParams.of(p)
    q.require_interior()
    theta = np.asarray(theta, dtype=float)
    lam = float(q.lam)
    phi = theta[..., edge_vertices(q.r, q.m)].sum(axis=-1)
    out = np.sum(np.log(1.0 + lam * (np.exp(1j * phi) - 1.0)), axis=-1)
    return out - 1j * float(q.d) * theta.sum(axis=-1)


def wrap(x):
    """Representative of x modulo 2 pi in (-pi, pi]."""
    y = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)
    return y if np.ndim(y) else float(y)


def circular_norm(x: float) -> float:
    """|x|_{2 pi}: distance from x to the nearest multiple of 2 pi."""
    return abs(math.remainder(float(x), 2 * math.pi))


def apply_phi(theta, c: Sequence[float], p, wrap_result: bool = True):
    """Add c_t to every coordinate of class t; requires sum c = 0 (mod 2 pi)."""
    q = DenseParams.of(p)
    c = np.asarray(c, dtype=float)
    if c.shape != (q.r,):
        raise DomainError(f"shift needs {q.r} components")
    if circular_norm(c.sum()) > 1e-9:
        raise DomainError("shift components must sum to 0 modulo 2 pi")
    out = np.asarray(theta, dtype=float) + np.repeat(c, q.m)
    return wrap(out) if wrap_result else out


def factor_bound_check(x: float, lam: float, strict: bool = True) -> Tuple[float, float]:
    """(sqrt(1 - 2 Lambda (1 - cos x)), exp(-(Lambda/2)(1 - |x|^2/12)|x|^2)) with |x| = |x|_{2 pi}."""
    if not 0 <= lam <= 1:
        raise DomainError("lambda must lie in [0, 1]")
    Lam = lam * (1 - lam)
    lhs = math.sqrt(max(0.0, 1 - 2 * Lam * (1 - math.cos(x))))
    y2 = circular_norm(x) ** 2
    rhs = math.exp(-(Lam / 2) * (1 - y2 / 12) * y2)
    if strict and lhs > rhs * (1 + 1e-13):
        raise CheckFailed("factor bound", f"x={x}, lambda={lam}: {lhs} > {rhs}")
    return lhs, rhs


# -- structured matrices -------------------------------------------------------

@dataclass(frozen=True)
class StructuredMatrix:
    """alpha I + beta B + gamma J for n = r m, B = r diagonal all-ones m x m blocks."""

    alpha: Number
    beta: Number
    gamma: Number
    r: int
    m: int

    @property
    def n(self) -> int:
        return self.r * self.m

    def _same(self, other: "StructuredMatrix"):
        if (self.r, self.m) != (other.r, other.m):
            raise DomainError("structured matrices of different shapes")

    def __add__(self, other):
        self._same(other)
        return StructuredMatrix(self.alpha + other.alpha, self.beta + other.beta,
                                self.gamma + other.gamma, self.r, self.m)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, k):
        return StructuredMatrix(self.alpha * k, self.beta * k, self.gamma * k, self.r, self.m)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, StructuredMatrix):
            return self.dense() @ other
        self._same(other)
        a1, b1, g1 = self.alpha, self.beta, self.gamma
        a2, b2, g2 = other.alpha, other.beta, other.gamma
        m, n = self.m, self.n
        # B^2 = m B, BJ = JB = m J, J^2 = n J
        return StructuredMatrix(
            a1 * a2,
            a1 * b2 + b1 * a2 + m * b1 * b2,
            a1 * g2 + g1 * a2 + m * (b1 * g2 + g1 * b2) + n * g1 * g2,
            self.r, self.m)

    @property
    def T(self) -> "StructuredMatrix":
        return self

    def dense(self) -> np.ndarray:
        return (float(self.alpha) * np.eye(self.n) + float(self.beta) * block_ones(self.r, self.m)
                + float(self.gamma) * np.ones((self.n, self.n)))

    def eigenvalues(self) -> Dict[str, Tuple[Number, int]]:
        """Eigenvalues by eigenspace: class-constant vectors orthogonal to j, j itself, class-balanced vectors."""
        a, b, g = self.alpha, self.beta, self.gamma
        return {"all_ones": (a + self.m * b + self.n * g, 1),
                "class_constant": (a + self.m * b, self.r - 1),
                "class_balanced": (a, self.n - self.r)}


def block_ones(r: int, m: int) -> np.ndarray:
    return np.kron(np.eye(r), np.ones((m, m)))


def identity(r, m) -> StructuredMatrix:
    return StructuredMatrix(1, 0, 0, r, m)


def kernel_vectors(q: DenseParams) -> np.ndarray:
    """Columns v_j = (indicator of class j) - (indicator of class 1), j = 2..r."""
    r, m = q.r, q.m
    V = np.zeros((q.n, r - 1))
    for j in range(1, r):
        V[j * m:(j + 1) * m, j - 1] = 1.0
        V[0:m, j - 1] = -1.0
    return V


def q_matrix(q: DenseParams) -> np.ndarray:
    """Q = I - sum_j v_j e_{jm}^t: projection onto the slice x_{jm} = 0 (j >= 2, 1-based)."""
    V = kernel_vectors(q)
    Q = np.eye(q.n)
    for j in range(1, q.r):
        Q[:, (j + 1) * q.m - 1] -= V[:, j - 1]
    return Q


@dataclass(frozen=True)
class Matrices:
    A: StructuredMatrix
    W: StructuredMatrix
    T: StructuredMatrix
    Q: np.ndarray
    P: StructuredMatrix
    R: StructuredMatrix


def build_matrices(p) -> Matrices:
    q = DenseParams.of(p)
    q.require_interior()
    r, m = q.r, q.m
    Lam = q.Lambda
    s = Lam * m ** (r - 1)
    A = StructuredMatrix(0.5 * s, -0.5 * s / m, 0.5 * s / m, r, m)
    w = math.sqrt(Lam * m ** (r - 3) / (2 * r))
    W = StructuredMatrix(0.0, w * r, -w, r, m)
    t = math.sqrt(2 / s)
    T = StructuredMatrix(t, -t * (math.sqrt(r) - 1) / (math.sqrt(r) * m), 0.0, r, m)
    k = math.sqrt(2 * r / s) / r
    P = identity(r, m) - W * k
    R = StructuredMatrix(k, 0.0, 0.0, r, m)
    return Matrices(A, W, T, q_matrix(q), P, R)


def _dense_budget(q: DenseParams):
    if q.n > DENSE_LIMIT:
        raise DomainError(f"dense checks are limited to n <= {DENSE_LIMIT}, got n = {q.n}")


def verify_linear_lemma(p, strict: bool = True) -> List[Clause]:
    """Clauses (a)-(f) on A + W^t W, T and T^-1, each against a dense computation."""
    q = DenseParams.of(p)
    _dense_budget(q)
    mats = build_matrices(q)
    r, m, n, Lam = q.r, q.m, q.n, q.Lambda
    s = Lam * m ** (r - 1)
    M = mats.A + mats.W.T @ mats.W
    Md = mats.A.dense() + mats.W.dense().T @ mats.W.dense()
    out = []
    ev = np.sort(np.linalg.eigvalsh(Md))
    want = np.sort(np.array([0.5 * s] * (n - r) + [0.5 * s * r] * r))
    out.append(_close("linear (a) spectrum", ev, want, DET_TOL))
    sign, logdet = np.linalg.slogdet(Md)
    want_log = n * math.log(s / 2) + r * math.log(r)
    out.append(Clause("linear (b) determinant", bool(sign > 0 and abs(logdet - want_log) <= DET_TOL * max(1, abs(want_log))),
                      abs(logdet - want_log)))
    Td = mats.T.dense()
    out.append(_close("linear (c) whitening", Td.T @ Md @ Td, np.eye(n), 1e-10))
    inv = (2 / s) * (np.eye(n) - (r - 1) / n * block_ones(r, m))
    out.append(_close("linear (d) inverse", np.linalg.inv(Md), inv, 1e-10))
    n1 = np.abs(Td).sum(axis=0).max()
    ninf = np.abs(Td).sum(axis=1).max()
    bound = 3 / math.sqrt(s)
    out.append(Clause("linear (e) norm of T", bool(abs(n1 - ninf) <= 1e-12 * ninf and ninf <= bound),
                      ninf - bound, f"|T|_1={n1:.6g} |T|_inf={ninf:.6g} bound={bound:.6g}"))
    tinv = np.abs(np.linalg.inv(Td)).sum(axis=1).max()
    want_f = math.sqrt(Lam * r * m ** (r - 1) / 2)
    out.append(Clause("linear (f) norm of T^-1", bool(abs(tinv - want_f) <= 1e-10 * want_f), abs(tinv - want_f)))
    # symbolic A + W^t W against the dense product, and its closed form
    sym = (s / 2) * (identity(r, m) + StructuredMatrix(0, Fraction(r - 1, m), 0, r, m))
    out.append(_close("linear closed form", M.dense(), sym.dense(), ALGEBRA_TOL))
    out.append(_close("linear symbolic vs dense", M.dense(), Md, ALGEBRA_TOL))
    if strict:
        _raise_first(out)
    return out


def qw_det_formula(p) -> LogReal:
    q = DenseParams.of(p)
    return LogReal.from_log(q.r * math.log(q.r) + (q.r - 1) * math.log(q.Lambda * q.cells / 2))


def verify_qw_det(p, strict: bool = True) -> Tuple[LogReal, LogReal]:
    """(formula, numeric) for log |Q^t Q + W^t W|."""
    q = DenseParams.of(p)
    _dense_budget(q)
    mats = build_matrices(q)
    Wd = mats.W.dense()
    sign, logdet = np.linalg.slogdet(mats.Q.T @ mats.Q + Wd.T @ Wd)
    formula = qw_det_formula(q)
    numeric = LogReal(int(sign), float(logdet))
    if strict and not (sign > 0 and formula.isclose(numeric, DET_TOL)):
        raise CheckFailed("QW determinant", f"formula {formula.log_abs} vs dense {logdet}")
    return formula, numeric


def kernel_check(p, strict: bool = True) -> List[Clause]:
    q = DenseParams.of(p)
    _dense_budget(q)
    mats = build_matrices(q)
    Ad = mats.A.dense()
    V = kernel_vectors(q)
    Q = mats.Q
    out = [
        _close("kernel A v_j = 0", Ad @ V, np.zeros_like(V), ALGEBRA_TOL),
        Clause("kernel v_j independent", bool(np.linalg.matrix_rank(V) == q.r - 1)),
    ]
    nullity = q.n - np.linalg.matrix_rank(Ad, tol=1e-9 * max(1.0, np.abs(Ad).max()))
    out.append(Clause("kernel nullity r-1", bool(nullity == q.r - 1), float(nullity - (q.r - 1))))
    out.append(_close("kernel Q v_j = 0", Q @ V, np.zeros_like(V), ALGEBRA_TOL))
    fixed = [(j + 1) * q.m - 1 for j in range(1, q.r)]
    rng = np.random.default_rng(0)
    x = rng.standard_normal((q.n, 5))
    x[fixed, :] = 0
    out.append(_close("kernel Q identity on slice", Q @ x, x, ALGEBRA_TOL))
    out.append(_close("kernel Q idempotent", Q @ Q, Q, ALGEBRA_TOL))
    Pd, Rd, Wd = mats.P.dense(), mats.R.dense(), mats.W.dense()
    out.append(_close("PQ + RW = I", Pd @ Q + Rd @ Wd, np.eye(q.n), ALGEBRA_TOL))
    if strict:
        _raise_first(out)
    return out


# -- Taylor expansion ----------------------------------------------------------

@dataclass(frozen=True)
class TaylorCoeffs:
    a1: complex
    a2: complex
    a3: complex
    a4: complex

    def as_tuple(self):
        return (self.a1, self.a2, self.a3, self.a4)


def taylor_coeffs(lam) -> TaylorCoeffs:
    """Coefficients of x, .., x^4 in log(1 + lambda (e^{ix} - 1))."""
    lam = float(lam)
    if not 0 < lam < 1:
        raise DomainError("lambda must lie strictly between 0 and 1")
    Lam = lam * (1 - lam)
    return TaylorCoeffs(1j * lam, complex(-Lam / 2), -1j * Lam * (1 - 2 * lam) / 6, complex(Lam * (1 - 6 * Lam) / 24))


def taylor_coeffs_exact(lam: Fraction) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Same coefficients with the powers of i stripped: a_p = i^p * value."""
    lam = Fraction(lam)
    Lam = lam * (1 - lam)
    return lam, Lam / 2, Lam * (1 - 2 * lam) / 6, Lam * (1 - 6 * Lam) / 24


def finite_difference_coeffs(lam: float, h: float = 0.1, half_width: int = 5) -> List[complex]:
    """Taylor coefficients 1..4 of log(1 + lambda(e^{ix}-1)) at 0 from a central stencil."""
    k = np.arange(-half_width, half_width + 1)
    x = k * h
    g = np.log(1 + lam * (np.exp(1j * x) - 1))
    # solve sum_k w_k (k h)^q / q! = [q == p] for each p
    V = np.vander(k.astype(float), increasing=True).T
    out = []
    for p in range(1, 5):
        rhs = np.zeros(len(k))
        rhs[p] = math.factorial(p)
        w = np.linalg.solve(V, rhs) / h ** p
        out.append(complex(np.dot(w, g)) / math.factorial(p))
    return out


def check_taylor_coeffs(lam: float, tol: float = 1e-6) -> List[Clause]:
    got = taylor_coeffs(lam).as_tuple()
    fd = finite_difference_coeffs(lam)
    return [_close(f"taylor a{p} vs finite differences", got[p - 1], fd[p - 1], tol, relative=False)
            for p in range(1, 5)]


def taylor_residual_check(p, samples: int = 200, seed: int = 0, C: float = 10.0, box: float = 0.1) -> Clause:
    """|log F - (-theta^t A theta + sum_{p=3,4} a_p sum_e phi_e^p)| <= C Lambda m^r (r |theta|_inf)^5."""
    q = DenseParams.of(p)
    q.require_interior()
    Lam = q.Lambda
    mats = build_matrices(q)
    a = taylor_coeffs(float(q.lam))
    side = box / math.sqrt(Lam * q.m ** (q.r - 1))
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-side, side, size=(samples, q.n))
    phi = theta[:, edge_vertices(q.r, q.m)].sum(axis=-1)
    approx = (-np.einsum("si,ij,sj->s", theta, mats.A.dense(), theta)
              + a.a3 * (phi ** 3).sum(axis=1) + a.a4 * (phi ** 4).sum(axis=1))
    resid = np.abs(log_F(theta, q) - approx)
    bound = C * Lam * q.cells * (q.r * np.abs(theta).max(axis=1)) ** 5
    worst = float(np.max(resid / bound))
    return Clause("taylor residual", bool(worst <= 1.0), worst, "max residual / bound")


# -- Gaussian moments -------------------------------------------------------------

def covariance_sigma(p, k: int):
    """varsigma(k) = (k - (r-1)/m) / (Lambda m^(r-1)); exact when lambda is rational."""
    q = DenseParams.of(p)
    if not 0 <= k <= q.r:
        raise DomainError(f"k must lie in [0, r], got {k}")
    L = q.Lambda_exact
    if L == 0:
        raise DomainError("Lambda = 0")
    return (k - Fraction(q.r - 1, q.m)) / (L * q.m ** (q.r - 1))


def covariance_matrix(p) -> np.ndarray:
    """Covariance of X, (1/2)(A + W^t W)^-1, by dense inversion."""
    q = DenseParams.of(p)
    _dense_budget(q)
    mats = build_matrices(q)
    return 0.5 * np.linalg.inv(mats.A.dense() + mats.W.dense().T @ mats.W.dense())


def check_edge_covariances(p) -> Clause:
    q = DenseParams.of(p)
    S = covariance_matrix(q)
    E = edge_vertices(q.r, q.m)
    inc = np.zeros((len(E), q.n))
    np.put_along_axis(inc, E, 1.0, axis=1)
    sig = inc @ S @ inc.T
    inter = (E[:, None, :] == E[None, :, :]).sum(axis=2)
    table = np.array([float(covariance_sigma(q, k)) for k in range(q.r + 1)])
    return _close("edge covariance = varsigma(|e & e'|)", sig, table[inter], ALGEBRA_TOL)


@dataclass
class MomentReport:
    params: DenseParams
    sigma_diag: Number
    E_f4: Number
    Var_f3: Number
    Var_f4: Number
    pseudo_combo: Number
    E_f4_closed: Number
    Var_f3_closed: Number
    target: float
    exact: bool

    def varsigma(self, k: int):
        return covariance_sigma(self.params, k)

    @property
    def offset(self) -> float:
        return float(self.pseudo_combo) - self.target

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in
                ("sigma_diag", "E_f4", "Var_f3", "Var_f4", "pseudo_combo", "E_f4_closed", "Var_f3_closed",
                 "target", "offset")} | {"exact": self.exact}


def gaussian_moments(p, exact: Optional[bool] = None) -> MomentReport:
    """E f4, Var f3, Var f4 by intersection-class sums, plus their closed forms.

    With ``exact`` (the default for rational lambda) everything is a Fraction.
    """
    q = DenseParams.of(p)
    L = q.Lambda_exact
    if L == 0:
        raise DomainError("Lambda = 0")
    exact = True if exact is None else exact
    conv = (lambda x: x) if exact else float
    r, m = q.r, q.m
    lam = q.lam
    vs = [conv(covariance_sigma(q, k)) for k in range(r + 1)]
    L = conv(L)
    lam = conv(lam)
    sr = vs[r]
    cells = m ** r
    pairs = [math.comb(r, k) * (m - 1) ** (r - k) for k in range(r + 1)]
    E_f4 = L * (1 - 6 * L) / 24 * cells * 3 * sr ** 2
    var3_scale = L ** 2 * (1 - 2 * lam) ** 2 / 36
    Var_f3 = var3_scale * cells * sum(c * (9 * sr ** 2 * s + 6 * s ** 3) for c, s in zip(pairs, vs))
    var4_scale = (L * (1 - 6 * L) / 24) ** 2
    Var_f4 = var4_scale * cells * sum(c * (72 * sr ** 2 * s ** 2 + 24 * s ** 4) for c, s in zip(pairs, vs))
    pseudo = E_f4 + (Var_f4 - Var_f3) / 2
    E_closed = (1 - 6 * L) * (m * r - r + 1) ** 2 / (8 * L * cells)
    V_closed = ((1 - 4 * L) * r * (3 * r + 2) * m / (12 * L * m ** (r - 1))
                * (1 - conv(Fraction(6 * (r - 1), (3 * r + 2) * m))
                   + conv(Fraction((r - 1) * (3 * r - 5), r * (3 * r + 2) * m * m))))
    target = -r / (12 * float(L) * m ** (r - 2))
    return MomentReport(q, sr, E_f4, Var_f3, Var_f4, pseudo, E_closed, V_closed, target, exact)


def check_moments(p, pseudo_C: Optional[float] = None) -> List[Clause]:
    rep = gaussian_moments(p)
    exact = rep.exact
    out = [
        Clause("moments E f4 closed form", rep.E_f4 == rep.E_f4_closed if exact
               else abs(rep.E_f4 - rep.E_f4_closed) <= ALGEBRA_TOL * max(1, abs(rep.E_f4)),
               float(abs(rep.E_f4 - rep.E_f4_closed))),
        Clause("moments Var f3 closed form", rep.Var_f3 == rep.Var_f3_closed if exact
               else abs(rep.Var_f3 - rep.Var_f3_closed) <= ALGEBRA_TOL * max(1, abs(rep.Var_f3)),
               float(abs(rep.Var_f3 - rep.Var_f3_closed))),
        Clause("moments variances nonnegative", rep.Var_f3 >= 0 and rep.Var_f4 >= 0),
    ]
    q = rep.params
    bound = None if pseudo_C is None else pseudo_C / q.n
    out.append(Clause("moments pseudovariance combination", None if bound is None else abs(rep.offset) <= bound,
                      abs(rep.offset), f"combo={float(rep.pseudo_combo):.6g} target={rep.target:.6g}"))
    return out


def pairings(k: int) -> List[Tuple[Tuple[int, int], ...]]:
    """All perfect matchings of range(k)."""
    def rec(items):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for i, other in enumerate(rest):
            for tail in rec(rest[:i] + rest[i + 1:]):
                yield ((first, other),) + tail
    return list(rec(tuple(range(k))))


def isserlis_moment(cov: np.ndarray, labels: Sequence[int]) -> float:
    """E[prod_i Y_{labels[i]}] for a centred Gaussian vector Y with covariance ``cov``."""
    total = 0.0
    for pr in pairings(len(labels)):
        term = 1.0
        for a, b in pr:
            term *= cov[labels[a], labels[b]]
        total += term
    return total


def brute_isserlis_check(p, strict: bool = True) -> List[Clause]:
    """Pair-partition sums against 3 s^2, 9 s s s + 6 s^3 and 72 s s s^2 + 24 s^4 for every edge pair."""
    q = DenseParams.of(p)
    if q.cells > 16:
        raise DomainError("brute Isserlis check is limited to m^r <= 16")
    S = covariance_matrix(q)
    E = edge_vertices(q.r, q.m)
    inc = np.zeros((len(E), q.n))
    np.put_along_axis(inc, E, 1.0, axis=1)
    sig = inc @ S @ inc.T
    worst4 = worst33 = worst44 = 0.0
    for i in range(len(E)):
        c = sig[[i], :][:, [i]]
        fourth = isserlis_moment(c, [0, 0, 0, 0])
        worst4 = max(worst4, abs(fourth - 3 * sig[i, i] ** 2))
        for j in range(len(E)):
            c2 = sig[np.ix_([i, j], [i, j])]
            see, sff, sef = c2[0, 0], c2[1, 1], c2[0, 1]
            m33 = isserlis_moment(c2, [0, 0, 0, 1, 1, 1])
            worst33 = max(worst33, abs(m33 - (9 * see * sff * sef + 6 * sef ** 3)))
            m44 = isserlis_moment(c2, [0, 0, 0, 0, 1, 1, 1, 1]) - 9 * see ** 2 * sff ** 2
            worst44 = max(worst44, abs(m44 - (72 * see * sff * sef ** 2 + 24 * sef ** 4)))
    scale = max(1.0, float(np.abs(sig).max()) ** 4)
    out = [Clause("isserlis E X^4", worst4 <= ALGEBRA_TOL * scale, worst4),
           Clause("isserlis E X^3 X'^3", worst33 <= ALGEBRA_TOL * scale, worst33),
           Clause("isserlis Cov X^4 X'^4", worst44 <= ALGEBRA_TOL * scale, worst44)]
    if strict:
        _raise_first(out)
    return out


# -- assembling the dense formula ----------------------------------------------------

def _entropy_log(q: DenseParams) -> float:
    lam = float(q.lam)
    return -q.cells * (lam * math.log(lam) + (1 - lam) * math.log(1 - lam))


def dense_closed_form(p) -> float:
    q = DenseParams.of(p)
    q.require_interior()
    r, m, n, Lam = q.r, q.m, q.n, q.Lambda
    return (_entropy_log(q) + (r - n - 1) / 2 * math.log(2 * math.pi * Lam)
            - r * (r - 1) * (m - 1) / 2 * math.log(m) - r / (12 * Lam * m ** (r - 2)))


def _assemble(q: DenseParams, logdet_qw: float, logdet_aw: float) -> float:
    r, n = q.r, q.n
    return (_entropy_log(q) + (r - n - 1) * math.log(2 * math.pi) + (n - r + 1) / 2 * math.log(math.pi)
            + 0.5 * logdet_qw - 0.5 * logdet_aw - r / (12 * q.Lambda * q.m ** (q.r - 2)))


def dense_pipeline_log(p, use_dense: Optional[bool] = None) -> LogReal:
    """log H assembled from the two determinants and the Gaussian correction.

    With ``use_dense`` the determinants come from dense matrices (n <= 200),
    otherwise from their closed forms.
    """
    q = DenseParams.of(p)
    q.require_interior()
    if use_dense is None:
        use_dense = q.n <= DENSE_LIMIT
    if use_dense:
        _dense_budget(q)
        mats = build_matrices(q)
        Wd = mats.W.dense()
        s1, qw = np.linalg.slogdet(mats.Q.T @ mats.Q + Wd.T @ Wd)
        s2, aw = np.linalg.slogdet(mats.A.dense() + Wd.T @ Wd)
        if s1 <= 0 or s2 <= 0:
            raise CheckFailed("pipeline determinants", "non-positive determinant")
    else:
        qw = qw_det_formula(q).log_abs
        aw = q.n * math.log(q.Lambda * q.m ** (q.r - 1) / 2) + q.r * math.log(q.r)
    return LogReal.from_log(_assemble(q, qw, aw))


def pipeline_consistency(p) -> Clause:
    q = DenseParams.of(p)
    got = dense_pipeline_log(q, use_dense=True).log_abs
    want = dense_closed_form(q)
    err = abs(got - want) / max(1.0, abs(want))
    return Clause("pipeline determinant composition", err <= DET_TOL, err)


# -- suites ------------------------------------------------------------------

def _symmetry_suite(q: DenseParams, seed: int, samples: int = 50) -> List[Clause]:
    rng = np.random.default_rng(seed)
    out = []
    theta = rng.uniform(-np.pi, np.pi, size=(samples, q.n))
    F = eval_F(theta, q)
    out.append(Clause("|F| <= 1", bool(np.all(np.abs(F) <= 1 + 1e-12)), float(np.abs(F).max())))
    out.append(_close("F(0) = 1", eval_F(np.zeros(q.n), q), 1.0, 1e-15))
    c = rng.uniform(-np.pi, np.pi, size=q.r)
    c[-1] = -c[:-1].sum()
    # a non-integral d breaks 2 pi periodicity, so only shift without wrapping then
    integral = q.d.denominator == 1
    G = eval_F(apply_phi(theta, c, q, wrap_result=integral), q)
    err = float(np.max(np.abs(G - F)))
    out.append(Clause("F symmetry", err <= SYMMETRY_TOL, err, "" if integral else "unwrapped shift"))
    xs = rng.uniform(-10, 10, 10_000)
    ls = rng.uniform(0, 1, 10_000)
    ok = all(factor_bound_check(x, l, strict=False)[0] <= factor_bound_check(x, l, strict=False)[1] * (1 + 1e-13)
             for x, l in zip(xs, ls))
    out.append(Clause("factor bound sweep", ok))
    a, b = rng.uniform(-20, 20, (2, 1000))
    tri = all(circular_norm(x + y) <= circular_norm(x) + circular_norm(y) + 1e-12 for x, y in zip(a, b))
    out.append(Clause("circular norm triangle inequality", tri))
    return out


def run_suites(p, suites: Sequence[str] = SUITES, seed: int = 0) -> List[Clause]:
    """Every requested clause at one (r, m, lambda); failures are reported, not raised."""
    q = DenseParams.of(p)
    q.require_interior()
    bad = set(suites) - set(SUITES)
    if bad:
        raise DomainError(f"unknown suite(s): {', '.join(sorted(bad))}")
    out: List[Clause] = []
    if "linear" in suites:
        out += verify_linear_lemma(q, strict=False)
        out += kernel_check(q, strict=False)
    if "det" in suites:
        formula, numeric = verify_qw_det(q, strict=False)
        out.append(Clause("QW determinant", numeric.sign > 0 and formula.isclose(numeric, DET_TOL),
                          abs(formula.log_abs - numeric.log_abs)))
        out.append(pipeline_consistency(q))
    if "moments" in suites:
        out += check_moments(q)
        out.append(check_edge_covariances(q))
        if q.cells <= 16:
            out += brute_isserlis_check(q, strict=False)
    if "taylor" in suites:
        out += check_taylor_coeffs(float(q.lam))
        out.append(taylor_residual_check(q, seed=seed))
    if "symmetry" in suites:
        out += _symmetry_suite(q, seed)
    return out
