"""Numerical certificates for the functional Ghobber-Jaming inequalities.

For two p-orthonormal pairs (f, tau) and (g, omega) and index sets M, N with
o(M)^(1/q) o(N)^(1/p) mu < 1, every x satisfies

    ||x|| <= (1 + 1/(1 - o(M)^(1/q) o(N)^(1/p) mu)) * (tail_f + tail_g)

where tail_f = ||x||_{M^c, f} and tail_g = ||x||_{N^c, g}. Four variants
differ in which pair plays the first role and whether mu is the global
coherence max or the max over the block M x N.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bases import BasisPair, _check_compatible, is_unitary
from .grams import (
    BOUNDARY_MARGIN,
    AdmissibilityReport,
    SubsetPair,
    admissibility,
    cross_gram,
    mu_global,
    mu_local,
    size_bound,
)
from .operators import paper_norm_bound, restricted_norm
from .spaces import DomainError, PreconditionError, StructuralError, p_norm

SLACK_TOL = 1e-9
RANK_TOL = 1e-8
SUPPORT_TOL = 1e-10

# variant -> (swap roles of the two pairs, localized coherence)
VARIANTS = {
    "fgj": (False, False),
    "fgj_swapped": (True, False),
    "fgj_local": (False, True),
    "fgj_swapped_local": (True, True),
}


class TheoremViolation(AssertionError):
    """An admissible certificate came out with negative slack."""

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data or {}


@dataclass(frozen=True, eq=False)
class Certificate:
    variant: str
    n: int
    p: float
    subsets: SubsetPair
    lhs: float
    tail_f: float
    tail_g: float
    admissibility: AdmissibilityReport
    constant: Optional[float]
    rhs: Optional[float]
    slack: Optional[float]
    digest: str
    pair_digests: tuple

    @property
    def admissible(self) -> bool:
        return self.admissibility.admissible

    @property
    def violated(self) -> bool:
        return self.admissible and self.slack < -SLACK_TOL


@dataclass(frozen=True, eq=False)
class InpRecord:
    lhs_tail: float
    bound: float
    norm_bound: float
    holds: bool


@dataclass(frozen=True, eq=False)
class AnnihilationReport:
    intersection_dim: int
    smallest_gap: float
    witness: Optional[np.ndarray] = None
    residual_f: float = 0.0
    residual_g: float = 0.0


@dataclass(frozen=True, eq=False)
class HilbertRecord:
    fgj_rhs: Optional[float]
    gj_rhs: Optional[float]
    equal: bool


def _roles(pair_f, pair_g, swapped):
    return (pair_g, pair_f) if swapped else (pair_f, pair_g)


def _check_inputs(pair_f, pair_g, subsets, x=None):
    _check_compatible(pair_f, pair_g)
    if subsets.universe != pair_f.n:
        raise StructuralError(f"subsets live in 1..{subsets.universe}, pairs have n={pair_f.n}")
    if x is not None:
        x = np.asarray(x)
        if x.shape != (pair_f.n,):
            raise StructuralError(f"vector has shape {x.shape}, expected ({pair_f.n},)")
    return x


def input_digest(pair_f, pair_g, subsets, x, variant) -> str:
    h = hashlib.sha256()
    h.update(f"{pair_f.digest}|{pair_g.digest}|{variant}|{subsets.M}|{subsets.N}|".encode())
    h.update(np.ascontiguousarray(x, dtype=np.complex128).tobytes())
    return h.hexdigest()


def verify(pair_f: BasisPair, pair_g: BasisPair, subsets: SubsetPair, x, variant="fgj") -> Certificate:
    """Evaluate both sides of one uncertainty inequality at x.

    Inadmissible subsets still produce a certificate with ``constant``,
    ``rhs`` and ``slack`` set to None.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    x = _check_inputs(pair_f, pair_g, subsets, x)
    swapped, local = VARIANTS[variant]
    first, second = _roles(pair_f, pair_g, swapped)
    gram = cross_gram(first, second)
    mu = mu_local(gram, subsets) if local else mu_global(gram)
    report = admissibility(subsets, first.p, mu)

    lhs = p_norm(x, first.p)
    tail_f = restricted_norm(first, subsets.complement("M"), x)
    tail_g = restricted_norm(second, subsets.complement("N"), x)
    if report.admissible:
        constant = report.constant
        rhs = constant * (tail_f + tail_g)
        slack = rhs - lhs
    else:
        constant = rhs = slack = None
    return Certificate(
        variant=variant,
        n=first.n,
        p=first.p,
        subsets=subsets,
        lhs=lhs,
        tail_f=tail_f,
        tail_g=tail_g,
        admissibility=report,
        constant=constant,
        rhs=rhs,
        slack=slack,
        digest=input_digest(pair_f, pair_g, subsets, x, variant),
        pair_digests=(pair_f.digest, pair_g.digest),
    )


def verify_fgj(pair_f, pair_g, subsets, x) -> Certificate:
    """Global coherence, M measured in the first pair and N in the second."""
    return verify(pair_f, pair_g, subsets, x, "fgj")


def verify_fgj_swapped(pair_f, pair_g, subsets, x) -> Certificate:
    """Roles exchanged: M measured in (g, omega), N in (f, tau), mu over |f_j(omega_k)|."""
    return verify(pair_f, pair_g, subsets, x, "fgj_swapped")


def verify_fgj_local(pair_f, pair_g, subsets, x) -> Certificate:
    return verify(pair_f, pair_g, subsets, x, "fgj_local")


def verify_fgj_swapped_local(pair_f, pair_g, subsets, x) -> Certificate:
    return verify(pair_f, pair_g, subsets, x, "fgj_swapped_local")


def verify_inp(pair_f, pair_g, subsets, y, localized=False) -> InpRecord:
    """Check ||y||_{N^c, g} >= (1 - mu o(N)^(1/p) o(M)^(1/q)) ||y|| for y supported on M."""
    y = _check_inputs(pair_f, pair_g, subsets, y)
    coeffs = pair_f.F @ y
    scale = max(1.0, float(np.abs(coeffs).max()))
    inside = set(subsets.M)
    for j in range(pair_f.n):
        if j not in inside and abs(coeffs[j]) > SUPPORT_TOL * scale:
            raise PreconditionError(
                f"y is not supported on M: f_{j + 1}(y) = {coeffs[j]!r} with {j + 1} not in M"
            )
    gram = cross_gram(pair_f, pair_g)
    mu = mu_local(gram, subsets) if localized else mu_global(gram)
    nb = paper_norm_bound(mu, subsets, pair_f.p)
    if nb >= 1.0:
        raise PreconditionError(f"norm bound {nb!r} is not below 1")
    lhs_tail = restricted_norm(pair_g, subsets.complement("N"), y)
    bound = (1.0 - nb) * p_norm(y, pair_f.p)
    return InpRecord(lhs_tail, bound, nb, lhs_tail >= bound - SLACK_TOL)


def _stacked_system(pair_f, pair_g, subsets):
    """[T_M | -W_N]: x = sum_{j in M} a_j tau_j = sum_{k in N} b_k omega_k."""
    return np.hstack([pair_f.T[:, list(subsets.M)], -pair_g.T[:, list(subsets.N)]])


def annihilation_test(pair_f: BasisPair, pair_g: BasisPair, subsets: SubsetPair) -> AnnihilationReport:
    """Dimension of span{tau_j : j in M} intersected with span{omega_k : k in N}.

    Vectors in the intersection are exactly the solutions of x = T_M a = W_N b,
    so the dimension is the nullity of the stacked system [T_M | -W_N] at
    numerical rank threshold 1e-8. ``smallest_gap`` is its smallest singular
    value (0 when the system has more unknowns than rows, inf when M and N
    are both empty).
    """
    _check_inputs(pair_f, pair_g, subsets)
    n, p = pair_f.n, pair_f.p
    a, b = subsets.sizes
    if a + b == 0:
        return AnnihilationReport(0, np.inf)
    S = _stacked_system(pair_f, pair_g, subsets)
    _, s, Vh = np.linalg.svd(S, full_matrices=True)
    gap = float(s[a + b - 1]) if a + b <= n else 0.0
    dim = a + b - int(np.count_nonzero(s > RANK_TOL))
    if dim == 0:
        return AnnihilationReport(0, gap)
    coef = Vh[-1].conj()
    w = pair_f.T[:, list(subsets.M)] @ coef[:a]
    w = w / p_norm(w, p)
    return AnnihilationReport(
        intersection_dim=dim,
        smallest_gap=gap,
        witness=w,
        residual_f=restricted_norm(pair_f, subsets.complement("M"), w),
        residual_g=restricted_norm(pair_g, subsets.complement("N"), w),
    )


def hilbert_reduction_check(pair_f, pair_g, subsets, x, tol=1e-12) -> HilbertRecord:
    """Compare the functional right-hand side with the inner-product form at p = 2.

    The inner-product side uses <h, tau_j> and max |<tau_j, omega_k>| directly
    from the synthesis vectors, never the stored functionals.
    """
    if pair_f.p != 2.0 or pair_g.p != 2.0:
        raise DomainError("the Hilbert space reduction needs p = 2")
    x = _check_inputs(pair_f, pair_g, subsets, x)
    if not (is_unitary(pair_f.T) and is_unitary(pair_g.T)):
        raise PreconditionError("both synthesis matrices must be unitary")
    cert = verify_fgj(pair_f, pair_g, subsets, x)

    inner_tau = pair_f.T.conj().T @ x
    inner_omega = pair_g.T.conj().T @ x
    mu = float(np.abs(pair_f.T.conj().T @ pair_g.T).max())
    a, b = subsets.sizes
    root = np.sqrt(a * b) * mu
    if root < 1.0 - BOUNDARY_MARGIN:
        tail_m = float(np.linalg.norm(inner_tau[list(subsets.complement("M"))]))
        tail_n = float(np.linalg.norm(inner_omega[list(subsets.complement("N"))]))
        gj_rhs = (1.0 + 1.0 / (1.0 - root)) * (tail_m + tail_n)
    else:
        gj_rhs = None

    if cert.rhs is None or gj_rhs is None:
        equal = cert.rhs is None and gj_rhs is None
    else:
        equal = abs(cert.rhs - gj_rhs) <= tol * max(1.0, abs(gj_rhs))
    return HilbertRecord(cert.rhs, gj_rhs, equal)


# ---------------------------------------------------------------------------
# vectorized evaluation over many (M, N) and many vectors


@dataclass(frozen=True, eq=False)
class GridResult:
    """Per subset pair: admissibility, constant and the minimum slack over all vectors."""

    subsets: list
    mu: np.ndarray
    admissible: np.ndarray
    constant: np.ndarray
    min_slack: np.ndarray
    argmin: np.ndarray
    rhs_max: np.ndarray


def _index_table(sets):
    table, index = {}, np.empty(len(sets), dtype=np.int64)
    for i, s in enumerate(sets):
        index[i] = table.setdefault(s, len(table))
    return list(table), index


def _tails(pair, sets, X):
    """Rows: ||x||_{S^c} for each S in ``sets``; columns: vectors in X."""
    P = np.abs(pair.F @ X) ** pair.p
    mask = np.ones((len(sets), pair.n))
    for i, s in enumerate(sets):
        mask[i, list(s)] = 0.0
    return (mask @ P) ** (1.0 / pair.p)


def certify_grid(pair_f, pair_g, subsets_list, X, variant="fgj", chunk=4096) -> GridResult:
    """Vectorized ``verify`` over every subset pair and every column of X.

    Numerically equivalent to calling ``verify`` in a loop (up to summation
    order in the tails); used for the large sweeps.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    _check_compatible(pair_f, pair_g)
    swapped, local = VARIANTS[variant]
    first, second = _roles(pair_f, pair_g, swapped)
    n, p = first.n, first.p
    X = np.asarray(X)
    gram = cross_gram(first, second)
    A = gram.moduli

    Ms, iM = _index_table([s.M for s in subsets_list])
    Ns, iN = _index_table([s.N for s in subsets_list])
    tail_m = _tails(first, Ms, X)
    tail_n = _tails(second, Ns, X)
    lhs = np.sum(np.abs(X) ** p, axis=0) ** (1.0 / p)

    sizes = np.array([s.sizes for s in subsets_list], dtype=np.int64).reshape(-1, 2)
    if local:
        # rowmax[iM, k] = max_{j in M} |G[k, j]|, with a trailing zero column for padding
        rowmax = np.zeros((len(Ms), n + 1))
        for i, M in enumerate(Ms):
            if M:
                rowmax[i, :n] = A[:, list(M)].max(axis=1)
        width = max(1, int(sizes[:, 1].max()) if len(subsets_list) else 1)
        Npad = np.full((len(subsets_list), width), n, dtype=np.int64)
        for i, s in enumerate(subsets_list):
            Npad[i, : len(s.N)] = s.N
        mu = rowmax[iM[:, None], Npad].max(axis=1)
    else:
        mu = np.full(len(subsets_list), float(A.max()))

    bounds = {}
    bound = np.empty(len(subsets_list))
    for i, (a, b) in enumerate(sizes):
        key = (int(a), int(b))
        if key not in bounds:
            bounds[key] = size_bound(key[0], key[1], p)
        bound[i] = bounds[key]
    prod = bound * mu
    ok = prod < 1.0 - BOUNDARY_MARGIN
    constant = np.where(ok, 1.0 + 1.0 / np.where(ok, 1.0 - prod, 1.0), np.nan)

    min_slack = np.full(len(subsets_list), np.nan)
    argmin = np.full(len(subsets_list), -1, dtype=np.int64)
    rhs_max = np.full(len(subsets_list), np.nan)
    idx = np.flatnonzero(ok)
    for start in range(0, idx.size, chunk):
        sel = idx[start : start + chunk]
        rhs = constant[sel, None] * (tail_m[iM[sel]] + tail_n[iN[sel]])
        slack = rhs - lhs[None, :]
        k = np.argmin(slack, axis=1)
        argmin[sel] = k
        min_slack[sel] = slack[np.arange(sel.size), k]
        rhs_max[sel] = rhs.max(axis=1)
    return GridResult(list(subsets_list), mu, ok, constant, min_slack, argmin, rhs_max)


def annihilation_grid(pair_f, pair_g, subsets_list, chunk=8192):
    """Smallest gaps and intersection dimensions for many subset pairs at once.

    Returns ``(gaps, dims)`` arrays aligned with ``subsets_list``; same
    conventions as ``annihilation_test``.
    """
    _check_compatible(pair_f, pair_g)
    n = pair_f.n
    gaps = np.full(len(subsets_list), np.inf)
    dims = np.zeros(len(subsets_list), dtype=np.int64)
    groups = {}
    for i, s in enumerate(subsets_list):
        groups.setdefault(s.sizes, []).append(i)
    for (a, b), members in groups.items():
        if a + b == 0:
            continue
        Ms = np.array([subsets_list[i].M for i in members], dtype=np.int64).reshape(len(members), a)
        Ns = np.array([subsets_list[i].N for i in members], dtype=np.int64).reshape(len(members), b)
        for start in range(0, len(members), chunk):
            sl = slice(start, start + chunk)
            # (batch, n, a + b) stacks of [T_M | -W_N]
            S = np.concatenate(
                [pair_f.T[:, Ms[sl]].transpose(1, 0, 2), -pair_g.T[:, Ns[sl]].transpose(1, 0, 2)],
                axis=2,
            )
            s = np.linalg.svd(S, compute_uv=False)
            sel = np.array(members[sl])
            gaps[sel] = s[:, a + b - 1] if a + b <= n else 0.0
            dims[sel] = a + b - np.count_nonzero(s > RANK_TOL, axis=1)
    return gaps, dims
