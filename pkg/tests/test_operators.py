import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpuncertainty.bases import canonical_basis, random_basis
from lpuncertainty.grams import SubsetPair, cross_gram, mu_global
from lpuncertainty.operators import (
    composite_matrix,
    dense_sampling_norm,
    opnorm_p,
    paper_norm_bound,
    project,
    restricted_norm,
)
from lpuncertainty.spaces import StructuralError, p_norm


def sp(M, N, n):
    return SubsetPair.from_one_based(M, N, n)


def test_project_examples():
    pair = random_basis(4, 2, seed=1, field="complex")
    x = np.array([1.0, -2.0, 0.5, 3.0])
    assert np.allclose(project(pair, range(4), x), x, atol=1e-14)
    assert np.array_equal(project(pair, [], x), np.zeros(4))
    c = canonical_basis(3, 2)
    assert np.array_equal(project(c, [0, 2], np.array([5.0, 6.0, 7.0])), [5.0, 0.0, 7.0])
    with pytest.raises(StructuralError):
        project(c, [3], np.ones(3))


def test_restricted_norm_examples():
    pair = random_basis(5, 3, seed=2)
    x = np.arange(1.0, 6.0)
    assert restricted_norm(pair, range(5), x) == pytest.approx(p_norm(x, 3), rel=1e-14)
    assert restricted_norm(pair, [], x) == 0.0
    assert restricted_norm(canonical_basis(2, 2), [1], np.array([3.0, 4.0])) == 4.0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 7), st.sampled_from([1.5, 2.0, 3.0]), st.integers(0, 10**6))
def test_projection_identities(n, p, seed):
    rng = np.random.default_rng(seed)
    pair = random_basis(n, p, seed=seed, field="complex")
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    S = sorted(rng.choice(n, rng.integers(0, n + 1), replace=False).tolist())
    Sc = [j for j in range(n) if j not in S]
    Px = project(pair, S, x)
    assert abs(p_norm(Px, p) - restricted_norm(pair, S, x)) < 1e-12 * max(1, p_norm(x, p))
    assert np.max(np.abs(Px + project(pair, Sc, x) - x)) < 1e-12
    assert np.allclose(project(pair, S, Px), Px, atol=1e-12)


def test_composite_matrix_examples(dft4):
    c, d = dft4
    full = sp([1, 2, 3, 4], [1, 2, 3, 4], 4)
    assert np.allclose(composite_matrix(cross_gram(c, c), full), np.eye(4))
    assert not np.any(composite_matrix(cross_gram(c, d), sp([], [1, 2], 4)))
    A = composite_matrix(cross_gram(c, d), sp([1], [1], 4))
    assert np.count_nonzero(A) == 1 and abs(A[0, 0]) == pytest.approx(0.5)


def test_composite_matrix_is_projection_composite():
    f = random_basis(5, 2, seed=3, field="complex")
    g = random_basis(5, 2, seed=4, field="complex")
    s = sp([1, 4], [2, 3, 5], 5)
    A = composite_matrix(cross_gram(f, g), s)
    # V x = sum_k g_k(x) tau_k; compare P_N V P_M in tau-coordinates
    V = f.T @ g.F
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        y = project(f, s.N, V @ project(f, s.M, x))
        assert np.allclose(f.F @ y, A @ (f.F @ x), atol=1e-12)


def test_norm_bound_examples():
    assert paper_norm_bound(0.5, sp([], [1], 4), 2) == 0.0
    assert paper_norm_bound(0.5, sp([1], [1], 4), 2) == 0.5
    assert paper_norm_bound(0.5, sp([1, 2], [1, 2], 4), 2) == pytest.approx(1.0)
    assert paper_norm_bound(1.0, sp([1, 2], [1], 4), 3) == pytest.approx(2 ** (2 / 3))


def test_opnorm_identity_and_diagonal():
    for p in (1.5, 2.0, 3.0, 7.0):
        e = opnorm_p(np.eye(4), p)
        assert e.lower == pytest.approx(1.0) and e.upper == pytest.approx(1.0)
    e = opnorm_p(np.diag([2.0, 3.0]), 2)
    assert e.lower == pytest.approx(3.0) and e.upper == pytest.approx(3.0)
    assert e.method in ("spectral_p2", "interpolation", "paper_bound")


def test_opnorm_zero_matrix():
    e = opnorm_p(np.zeros((3, 3)), 3)
    assert e.lower == 0.0 and e.upper == 0.0 and "zero_matrix" in e.flags


def test_opnorm_random_3x3_against_dense_sampling():
    A = np.random.default_rng(7).standard_normal((3, 3))
    est = opnorm_p(A, 3, seed=1)
    oracle = dense_sampling_norm(A, 3, samples=1_000_000, seed=2)
    assert est.lower <= est.upper + 1e-9
    assert est.lower - 5e-2 <= oracle.lower <= est.upper + 5e-2
    assert abs(oracle.lower - est.lower) <= 5e-2


def test_witness_reproduces_lower():
    A = np.random.default_rng(9).standard_normal((4, 6)) + 1j
    est = opnorm_p(A, 1.5, seed=3)
    w = est.witness
    assert abs(p_norm(A @ w, 1.5) / p_norm(w, 1.5) - est.lower) < 1e-9
    assert est.lower <= est.upper + 1e-9


def test_opnorm_deterministic():
    A = np.random.default_rng(10).standard_normal((5, 5))
    a, b = opnorm_p(A, 3, seed=4), opnorm_p(A, 3, seed=4)
    assert a.lower == b.lower and np.array_equal(a.witness, b.witness)


def test_interpolation_bound_tends_to_exact_at_extremes():
    rng = np.random.default_rng(11)
    for _ in range(20):
        A = rng.standard_normal((5, 5))
        col = np.abs(A).sum(axis=0).max()
        row = np.abs(A).sum(axis=1).max()
        near1 = opnorm_p(A, 1.0001, restarts=0).candidates["interpolation"]
        near_inf = opnorm_p(A, 1000, restarts=0).candidates["interpolation"]
        assert near1 == pytest.approx(col, rel=1e-2)
        assert near_inf == pytest.approx(row, rel=1e-2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.sampled_from([1.5, 2.0, 3.0]), st.integers(0, 10**6))
def test_lower_bound_below_holder_bound(n, p, seed):
    rng = np.random.default_rng(seed)
    f = random_basis(n, 2, seed=seed, field="complex")
    g = random_basis(n, 2, seed=seed + 7, field="complex")
    gram = cross_gram(f, g)
    M = rng.choice(n, rng.integers(0, n + 1), replace=False)
    N = rng.choice(n, rng.integers(0, n + 1), replace=False)
    s = SubsetPair(M, N, n)
    est = opnorm_p(composite_matrix(gram, s), p, restarts=2, seed=seed)
    assert est.lower <= paper_norm_bound(mu_global(gram), s, p) + 1e-9
