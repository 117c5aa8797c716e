import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypercount.core import (Configuration, Hypergraph, LogReal, Params, RngStream, all_cells, complement,
                             degrees, make_params, multi_params, params_from_lambda, provides, resolve_budget)
from hypercount.errors import DomainError


def test_params_arithmetic():
    p = make_params(3, 2, 2)
    assert (p.lam, p.Lambda, p.n) == (0.5, 0.25, 6)
    q = make_params(3, 2, 0)
    assert (q.lam, q.Lambda) == (0, 0)
    full = make_params(4, 3, 27)
    assert full.lam == 1 and full.Lambda == 0 and full.d == full.degree_cap


@pytest.mark.parametrize("args", [(1, 2, 1), (3, 0, 0), (3, 2, 5), (3, 2, -1)])
def test_params_domain(args):
    with pytest.raises(DomainError):
        make_params(*args)


def test_multi_params_lifts_degree_cap():
    assert multi_params(3, 1, 3).d == 3
    with pytest.raises(DomainError):
        make_params(3, 1, 3)


def test_params_from_lambda():
    assert params_from_lambda(3, 40, "1/2").d == 800
    with pytest.raises(DomainError):
        params_from_lambda(3, 3, Fraction(1, 2))


def test_complement_examples():
    p = make_params(3, 2, 0)
    full = complement(Hypergraph(p, ()))
    assert full.params.d == 4 and len(full.edges) == 8
    g = Hypergraph(make_params(3, 2, 1), ((1, 1, 1), (2, 2, 2)))
    c = complement(g)
    assert len(c.edges) == 6 and c.is_regular(3)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4), st.integers(1, 3), st.data())
def test_complement_involution(r, m, data):
    cells = list(all_cells(r, m))
    edges = data.draw(st.lists(st.sampled_from(cells), unique=True)) if cells else []
    g = Hypergraph(make_params(r, m, 0), tuple(edges))
    assert complement(complement(g)).edges == g.edges


def test_degrees():
    g = Hypergraph(make_params(3, 2, 1), ((1, 1, 1), (2, 2, 2)))
    assert list(degrees(g)) == [1] * 6
    assert list(degrees(Hypergraph(make_params(3, 2, 0), ()))) == [0] * 6
    full = Hypergraph(make_params(3, 2, 4), tuple(all_cells(3, 2)))
    assert list(degrees(full)) == [4] * 6


def test_hypergraph_rejects_repeats_and_bad_coordinates():
    p = make_params(3, 2, 1)
    with pytest.raises(DomainError):
        Hypergraph(p, ((1, 1, 1), (1, 1, 1)))
    with pytest.raises(DomainError):
        Hypergraph(p, ((1, 1, 3),))


def test_hypergraph_json_roundtrip():
    g = Hypergraph(make_params(3, 2, 1), ((2, 2, 2), (1, 1, 1)))
    assert Hypergraph.from_json(g.to_json()) == g


def test_provides_examples():
    p = make_params(3, 2, 1)
    assert provides(Configuration.identity(p)).to_hypergraph().edges == ((1, 1, 1), (2, 2, 2))
    swapped = Configuration(p, ((1, 0), (0, 1)))
    assert provides(swapped).to_hypergraph().edges == ((1, 2, 1), (2, 1, 2))
    q = multi_params(3, 1, 2)
    for perms in (((0, 1), (0, 1)), ((1, 0), (0, 1))):
        g = provides(Configuration(q, perms))
        assert g.edge_mult == {(1, 1, 1): 2} and not g.is_simple()


def test_configuration_rejects_non_permutations():
    with pytest.raises(DomainError):
        Configuration(make_params(3, 2, 1), ((0, 0), (0, 1)))


def test_logreal_arithmetic():
    a, b = LogReal.from_value(6), LogReal.from_value(-2)
    assert float(a * b) == pytest.approx(-12)
    assert float(a / b) == pytest.approx(-3)
    assert float(a + b) == pytest.approx(4)
    assert (a - a).sign == 0
    assert float(b ** 3) == pytest.approx(-8)
    huge = LogReal.from_value(math.factorial(500))
    assert huge.log_abs == pytest.approx(math.lgamma(501), rel=1e-14)
    assert LogReal.from_value(Fraction(1, 3)).log_abs == pytest.approx(-math.log(3))


def test_rng_stream_determinism():
    a = RngStream(42).generator().integers(0, 2 ** 32, 8)
    b = RngStream(42).generator().integers(0, 2 ** 32, 8)
    c = RngStream(42).child(1).generator().integers(0, 2 ** 32, 8)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert RngStream(42).child(3) == RngStream(42).child(3)


def test_resolve_budget(monkeypatch):
    monkeypatch.delenv("HYPERCOUNT_BUDGET", raising=False)
    assert resolve_budget(10) == 10
    monkeypatch.setenv("HYPERCOUNT_BUDGET", "5")
    assert resolve_budget(10) == 5
    assert resolve_budget(10, 7) == 7
    monkeypatch.setenv("HYPERCOUNT_BUDGET", "lots")
    with pytest.raises(DomainError):
        resolve_budget(10)
