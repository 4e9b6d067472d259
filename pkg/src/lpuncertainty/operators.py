"""Coordinate projections, restricted norms and p -> p operator norm estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._parallel import ordered_map
from .bases import BasisPair
from .grams import CrossGram, SubsetPair, size_bound
from .spaces import (
    StructuralError,
    as_exponent,
    conjugate_exponent,
    random_unit_vectors,
)

METHODS = (
    "exact_p1",
    "exact_pinf",
    "spectral_p2",
    "power_iteration",
    "interpolation",
    "paper_bound",
    "dense_sampling",
)


@dataclass(frozen=True, eq=False)
class NormEstimate:
    """Certified interval [lower, upper] for ||A||_{p->p}.

    ``lower`` is realized by ``witness``; ``method`` names the estimator that
    supplied ``upper``.
    """

    lower: float
    upper: float
    witness: np.ndarray
    method: str
    lower_method: str = "power_iteration"
    converged: bool = True
    flags: tuple = ()
    candidates: dict = field(default_factory=dict)


def _check_indices(pair: BasisPair, S):
    S = tuple(int(i) for i in S)
    for i in S:
        if not 0 <= i < pair.n:
            raise StructuralError(f"index {i + 1} outside 1..{pair.n}")
    return S


def project(pair: BasisPair, S, x) -> np.ndarray:
    """P_S x = sum_{j in S} f_j(x) tau_j."""
    S = _check_indices(pair, S)
    x = np.asarray(x)
    if x.shape[0] != pair.n:
        raise StructuralError(f"vector has dimension {x.shape[0]}, pair has n={pair.n}")
    if not S:
        return np.zeros(x.shape, dtype=np.result_type(x, pair.T))
    idx = list(S)
    return pair.T[:, idx] @ (pair.F[idx, :] @ x)


def restricted_norm(pair: BasisPair, S, x) -> float:
    """(sum_{j in S} |f_j(x)|^p)^(1/p)."""
    S = _check_indices(pair, S)
    x = np.asarray(x)
    if x.shape[0] != pair.n:
        raise StructuralError(f"vector has dimension {x.shape[0]}, pair has n={pair.n}")
    if not S:
        return 0.0
    c = pair.F[list(S), :] @ x
    return float(np.sum(np.abs(c) ** pair.p) ** (1.0 / pair.p))


def composite_matrix(gram: CrossGram, subsets: SubsetPair) -> np.ndarray:
    """P_N V P_M in tau-coordinates: G masked to rows N and columns M."""
    if subsets.universe != gram.n:
        raise StructuralError(f"subsets live in 1..{subsets.universe}, gram has n={gram.n}")
    A = np.zeros_like(gram.G)
    if subsets.M and subsets.N:
        rows, cols = np.ix_(subsets.N, subsets.M)
        A[rows, cols] = gram.G[rows, cols]
    return A


def paper_norm_bound(mu: float, subsets: SubsetPair, p) -> float:
    """mu * o(N)^(1/p) * o(M)^(1/q), the Hölder estimate of ||P_N V P_M||."""
    p = as_exponent(p)
    m, k = subsets.sizes
    return float(mu) * size_bound(m, k, p)


def _pnorm_cols(Y, p):
    return np.sum(np.abs(Y) ** p, axis=0) ** (1.0 / p)


def _pn(v, r):
    a = np.abs(v)
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((a / m) ** r) ** (1.0 / r))


def _ratio(A, x, p):
    nx = _pn(x, p)
    if nx == 0:
        return 0.0
    return _pn(A @ x, p) / nx


def _dual(y, r):
    """Unit vector in the conjugate norm attaining <., y> = ||y||_r."""
    a = np.abs(y)
    m = a.max()
    if m == 0:
        return np.zeros_like(y)
    a = a / m
    if np.iscomplexobj(y):
        phase = np.where(a > 0, y / np.where(a > 0, np.abs(y), 1.0), 0.0)
    else:
        phase = np.sign(y)
    w = phase * a ** (r - 1.0)
    norm_r = np.sum(a**r) ** (1.0 / r)
    return w / norm_r ** (r - 1.0)


def power_iteration(A, p, x0, max_iter=500, rtol=1e-10):
    """Nonlinear power method for ||A||_{p->p}; returns (x, value, converged).

    The value is nondecreasing along the iteration, so the best vector seen is
    always the last accepted one.
    """
    q = conjugate_exponent(p)
    x = x0 / _pn(x0, p)
    best = _ratio(A, x, p)
    for _ in range(max_iter):
        y = A @ x
        if not np.any(y):
            return x, best, True
        z = A.conj().T @ _dual(y, p)
        nz = _pn(z, q)
        if nz <= abs(np.vdot(z, x)) * (1.0 + 1e-15):
            return x, best, True
        x_new = _dual(z, q)
        val = _ratio(A, x_new, p)
        if val <= best:
            return x, best, True
        change = (val - best) / val
        x, best = x_new, val
        if change < rtol:
            return x, best, True
    return x, best, False


def upper_bounds(A, p) -> dict:
    a = np.abs(A)
    q = conjugate_exponent(p)
    col = float(a.sum(axis=0).max())
    row = float(a.sum(axis=1).max())
    out = {"interpolation": col ** (1.0 / p) * row ** (1.0 / q)}
    nz_rows = int(np.count_nonzero(a.any(axis=1)))
    nz_cols = int(np.count_nonzero(a.any(axis=0)))
    out["paper_bound"] = float(a.max()) * nz_cols ** (1.0 / q) * nz_rows ** (1.0 / p)
    if p == 2.0:
        out["spectral_p2"] = float(np.linalg.norm(A, 2))
    return out


def opnorm_p(A, p, restarts: int = 8, max_iter: int = 500, seed: int = 0) -> NormEstimate:
    """Certified bracket for the p -> p operator norm of A.

    The lower end is the best power-iteration value from every canonical
    vector, the all-ones vector and ``restarts`` seeded random starts. The
    upper end is the smallest of the Riesz-Thorin interpolation bound, the
    entrywise Hölder bound and (p = 2) the largest singular value.
    """
    p = as_exponent(p)
    A = np.asarray(A)
    if A.ndim != 2 or 0 in A.shape:
        raise StructuralError(f"expected a nonempty matrix, got shape {A.shape}")
    if restarts < 0 or max_iter < 1:
        raise ValueError("budget must be positive")
    n = A.shape[1]
    cplx = np.iscomplexobj(A)
    dtype = np.complex128 if cplx else np.float64

    if not np.any(A):
        e = np.zeros(n, dtype=dtype)
        e[0] = 1.0
        return NormEstimate(0.0, 0.0, e, "exact_p1", "exact_p1", True, ("zero_matrix",))

    starts = [np.eye(n, dtype=dtype)[:, j] for j in range(n)]
    starts.append(np.ones(n, dtype=dtype))
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        starts.append(random_unit_vectors(n, 1, p, rng, "complex" if cplx else "real")[:, 0])

    runs = ordered_map(lambda x0: power_iteration(A, p, x0, max_iter), starts)
    # first index wins ties, so the merge does not depend on scheduling
    k = max(range(len(runs)), key=lambda i: (runs[i][1], -i))
    x, _, converged = runs[k]
    lower = _ratio(A, x, p)

    cands = upper_bounds(A, p)
    method = min(cands, key=cands.get)
    flags = () if converged else ("not_converged",)
    return NormEstimate(
        lower=lower,
        upper=cands[method],
        witness=x,
        method=method,
        lower_method="power_iteration",
        converged=converged,
        flags=flags,
        candidates=cands,
    )


def dense_sampling_norm(
    A, p, samples: int = 1_000_000, seed: int = 0, chunk: int = 100_000,
    field: Optional[str] = None,
) -> NormEstimate:
    """Brute-force lower bound: best of random unit-sphere samples, then coordinate ascent.

    Meant as an independent check at small n (cost is samples * n^2). The
    returned ``upper`` is infinite because sampling certifies nothing above.
    """
    p = as_exponent(p)
    A = np.asarray(A)
    n = A.shape[1]
    if field is None:
        field = "complex" if np.iscomplexobj(A) else "real"
    rng = np.random.default_rng(seed)
    best_val, best_x = -1.0, None
    left = int(samples)
    while left > 0:
        m = min(chunk, left)
        X = random_unit_vectors(n, m, p, rng, field)
        vals = _pnorm_cols(A @ X, p)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_x = float(vals[k]), X[:, k].copy()
        left -= m

    x = best_x
    val = _ratio(A, x, p)
    parts = [1.0, 1j] if field == "complex" else [1.0]
    step = 0.1
    # stay on the unit sphere so steps remain relative; cap sweeps per step size
    sweeps = 0
    while step > 1e-9:
        improved = False
        for i in range(n):
            for unit in parts:
                for sgn in (1.0, -1.0):
                    y = x.copy()
                    y[i] += sgn * step * unit
                    ny = _pn(y, p)
                    if ny == 0:
                        continue
                    y = y / ny
                    v = _ratio(A, y, p)
                    if v > val:
                        x, val, improved = y, v, True
        sweeps += 1
        if not improved or sweeps >= 200:
            step *= 0.5
            sweeps = 0
    return NormEstimate(_ratio(A, x, p), math.inf, x, "dense_sampling", "dense_sampling")
