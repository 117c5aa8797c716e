import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypercount import analytic as an
from hypercount.core import make_params
from hypercount.errors import CheckFailed, DomainError
from hypercount.estimate import log_dense_estimate

HALF = Fraction(1, 2)


def test_F_at_origin_and_modulus():
    assert an.eval_F(np.zeros(6), (3, 2, HALF)) == 1
    theta = np.random.default_rng(0).uniform(-np.pi, np.pi, (1000, 6))
    assert np.all(np.abs(an.eval_F(theta, make_params(3, 2, 2))) <= 1 + 1e-12)


def test_F_symmetry():
    rng = np.random.default_rng(1)
    theta = rng.uniform(-np.pi, np.pi, (200, 6))
    c = (np.pi / 3, np.pi / 3, -2 * np.pi / 3)
    F = an.eval_F(theta, (3, 2, HALF))
    G = an.eval_F(an.apply_phi(theta, c, (3, 2, HALF)), (3, 2, HALF))
    assert np.max(np.abs(F - G)) <= 1e-10


def test_apply_phi_identity_cases():
    theta = np.random.default_rng(2).uniform(-np.pi, np.pi, 6)
    assert np.allclose(an.apply_phi(theta, (0, 0, 0), (3, 2, HALF)), theta, atol=0)
    assert np.allclose(an.apply_phi(theta, (2 * np.pi, 0, 0), (3, 2, HALF)), theta, atol=1e-12)
    with pytest.raises(DomainError):
        an.apply_phi(theta, (0.1, 0, 0), (3, 2, HALF))


def test_circular_norm():
    assert an.circular_norm(0) == 0
    assert an.circular_norm(3 * math.pi / 2) == pytest.approx(math.pi / 2)
    assert an.circular_norm(-7 * math.pi) == pytest.approx(math.pi)


def test_factor_bound():
    assert an.factor_bound_check(0, 0.3) == (1, 1)
    lhs, rhs = an.factor_bound_check(math.pi, 0.5)
    assert lhs == 0 and rhs == pytest.approx(math.exp(-(math.pi ** 2 / 8) * (1 - math.pi ** 2 / 12)))
    rng = np.random.default_rng(3)
    for x, lam in zip(rng.uniform(-10, 10, 10_000), rng.uniform(0, 1, 10_000)):
        an.factor_bound_check(x, lam)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 8),
       st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_structured_products_match_dense(r, m, c):
    X = an.StructuredMatrix(c[0], c[1], c[2], r, m)
    Y = an.StructuredMatrix(c[3], c[4], c[5], r, m)
    dense = X.dense() @ Y.dense()
    assert np.max(np.abs((X @ Y).dense() - dense)) <= 1e-12 * max(1.0, np.abs(dense).max())
    assert np.allclose((X + Y).dense(), X.dense() + Y.dense(), atol=1e-12)


def test_structured_exact_mode():
    X = an.StructuredMatrix(Fraction(1, 3), Fraction(-1, 7), Fraction(2, 5), 3, 4)
    P = X @ X
    assert all(isinstance(v, Fraction) for v in (P.alpha, P.beta, P.gamma))
    assert np.allclose(P.dense(), X.dense() @ X.dense(), atol=1e-13)


def test_linear_identities_examples():
    mats = an.build_matrices((3, 2, HALF))
    M = mats.A.dense() + mats.W.dense().T @ mats.W.dense()
    assert np.allclose(np.sort(np.linalg.eigvalsh(M)), [0.5] * 3 + [1.5] * 3, atol=1e-9)
    assert np.linalg.det(M) == pytest.approx(0.421875, abs=1e-9)
    assert all(c.passed for c in an.verify_linear_lemma((5, 3, Fraction(1, 3))))


def test_linear_identities_failure_names_clause(monkeypatch):
    monkeypatch.setattr(an, "block_ones", lambda r, m: np.zeros((r * m, r * m)))
    with pytest.raises(CheckFailed, match="linear"):
        an.verify_linear_lemma((3, 2, HALF))


@pytest.mark.parametrize("q", [(3, 2, HALF), (4, 3, Fraction(1, 4))])
def test_kernel_and_projection(q):
    report = {c.clause: c for c in an.kernel_check(q)}
    assert all(c.passed for c in report.values())
    A = an.build_matrices(q).A.dense()
    V = an.kernel_vectors(an.DenseParams.of(q))
    assert np.max(np.abs(A @ V)) <= 1e-12
    assert q[0] * q[1] - np.linalg.matrix_rank(A) == q[0] - 1


@pytest.mark.parametrize("q", [(3, 2, HALF), (3, 3, Fraction(1, 3)), (4, 2, HALF)])
def test_qw_determinant(q):
    formula, numeric = an.verify_qw_det(q)
    assert formula.isclose(numeric, 1e-9)


def test_qw_determinant_value():
    assert float(an.verify_qw_det((3, 2, HALF))[1]) == pytest.approx(27, rel=1e-12)


def test_taylor_coefficients():
    a = an.taylor_coeffs(0.5)
    assert a.a2 == -1 / 8 and a.a3 == 0 and a.a4 == pytest.approx(-1 / 192, abs=1e-17)
    assert an.taylor_coeffs(0.3).a3 != 0
    assert all(c.passed for c in an.check_taylor_coeffs(0.25))
    assert an.taylor_coeffs_exact(HALF)[3] == Fraction(-1, 192)


def test_taylor_residual():
    assert an.taylor_residual_check((3, 4, HALF), samples=500, seed=1).passed


def test_varsigma():
    assert an.covariance_sigma((3, 10, HALF), 1) == Fraction(4, 125)
    assert an.covariance_sigma((3, 2, HALF), 1) == 0  # k = (r-1)/m
    assert an.check_edge_covariances((3, 2, HALF)).passed


@pytest.mark.parametrize("q", [(3, 2, HALF), (4, 5, Fraction(1, 4))])
def test_var3_closed_form_exact(q):
    rep = an.gaussian_moments(q)
    assert rep.exact and rep.Var_f3 == rep.Var_f3_closed and rep.E_f4 == rep.E_f4_closed


def test_pseudovariance_combination():
    rep = an.gaussian_moments((3, 200, HALF))
    assert abs(float(rep.pseudo_combo) + 3 / (12 * 0.25 * 200)) <= 10 / 600


def test_isserlis():
    S = an.covariance_matrix((3, 2, HALF))
    E = an.edge_vertices(3, 2)
    s_ee = S[np.ix_(E[0], E[0])].sum()
    assert an.isserlis_moment(np.array([[s_ee]]), [0, 0, 0, 0]) == pytest.approx(12)
    assert len(an.pairings(6)) == 15 and len(an.pairings(8)) == 105
    assert all(c.passed for c in an.brute_isserlis_check((3, 2, HALF)))
    assert all(c.passed for c in an.brute_isserlis_check((2, 2, HALF)))


def test_pipeline():
    q = (3, 40, HALF)
    assert an.dense_pipeline_log(q).log_abs == pytest.approx(log_dense_estimate(make_params(3, 40, 800)).log_abs,
                                                             rel=1e-9)
    for q in [(3, 2, HALF), (4, 3, HALF)]:
        assert an.pipeline_consistency(q).passed


@pytest.mark.parametrize("r", [3, 4, 5])
@pytest.mark.parametrize("m", [2, 3, 5])
@pytest.mark.parametrize("lam", ["1/10", "1/2", "9/10"])
def test_suites_on_grid(r, m, lam):
    bad = [c.clause for c in an.run_suites((r, m, Fraction(lam))) if c.passed is False]
    assert bad == []


def test_domain():
    with pytest.raises(DomainError):
        an.build_matrices((3, 2, 0))
    with pytest.raises(DomainError):
        an.verify_linear_lemma((3, 70, HALF))
    with pytest.raises(DomainError):
        an.run_suites((3, 2, HALF), ["nope"])
