"""p-orthonormal basis pairs in reference l^p coordinates.

A pair is stored as two n x n matrices: ``T`` whose columns are the synthesis
vectors tau_j, and ``F`` whose rows are the coordinate functionals f_j. Every
finite dimensional space carrying such a pair is isometric to l^p([n]), so
nothing is lost by working in coordinates.

For p != 2 the linear isometries of l^p([n]) are exactly the generalized
permutation matrices (one unimodular entry per row and column). That rigidity
makes the structural isometry test below exact; the sampled test is kept as a
cross-check and to produce witness vectors.
"""

from __future__ import annotations

import functools
import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .spaces import (
    DomainError,
    StructuralError,
    as_exponent,
    conjugate_exponent,
    field_of,
    functional_norm,
    p_norm,
)

TOL = 1e-10

CLAUSES = (
    "biorthogonality",
    "unit_vector_norm",
    "unit_functional_norm",
    "synthesis_isometry",
)


class IsometryError(DomainError):
    """A matrix is not an isometry of l^p; ``witness`` is a distorted vector."""

    def __init__(self, message, witness=None, distortion=None):
        super().__init__(message)
        self.witness = witness
        self.distortion = distortion


@dataclass(frozen=True, eq=False)
class BasisPair:
    """Synthesis vectors (columns of T) and coordinate functionals (rows of F)."""

    T: np.ndarray
    F: np.ndarray
    p: float

    def __post_init__(self):
        T = np.array(self.T)
        F = np.array(self.F)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
            raise StructuralError(f"T must be a nonempty square matrix, got {T.shape}")
        if F.shape != T.shape:
            raise StructuralError(f"F has shape {F.shape}, T has shape {T.shape}")
        dtype = np.complex128 if field_of(T, F) == "complex" else np.float64
        T = T.astype(dtype)
        F = F.astype(dtype)
        T.flags.writeable = False
        F.flags.writeable = False
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "p", as_exponent(self.p))

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)

    @property
    def field(self) -> str:
        return "complex" if np.iscomplexobj(self.T) else "real"

    def coefficients(self, x):
        """f_j(x) for all j (works on a vector or on columns of a matrix)."""
        return self.F @ x

    @functools.cached_property
    def digest(self) -> str:
        payload = json.dumps(
            {"p": self.p, "T": _flat(self.T), "F": _flat(self.F)},
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def same_values(self, other: "BasisPair") -> bool:
        return (
            self.p == other.p
            and self.field == other.field
            and np.array_equal(self.T, other.T)
            and np.array_equal(self.F, other.F)
        )


def _flat(A):
    A = np.asarray(A)
    if np.iscomplexobj(A):
        return [[float(z.real), float(z.imag)] for z in A.ravel()]
    return [float(z) for z in A.ravel()]


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violated_clause: Optional[str] = None
    violations: tuple = ()
    witness: Optional[np.ndarray] = None
    distortion: float = 0.0
    structural_ok: bool = True
    empirical_ok: bool = True
    details: dict = field(default_factory=dict)


def is_unitary(A, tol=TOL) -> bool:
    A = np.asarray(A)
    return bool(np.max(np.abs(A.conj().T @ A - np.eye(A.shape[0]))) <= tol)


def is_generalized_permutation(A, tol=TOL) -> bool:
    """Exactly one entry per row and column, of modulus 1; all others ~0."""
    a = np.abs(np.asarray(A))
    big = a > tol
    if not (np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1)):
        return False
    return bool(np.all(np.abs(a[big] - 1.0) <= tol))


def is_lp_isometry(A, p, tol=TOL) -> bool:
    """Structural test for a square matrix being an isometry of l^p."""
    if p == 2.0:
        return is_unitary(A, tol)
    return is_generalized_permutation(A, tol)


def _probe_vectors(n, trials, seed, complex_field):
    rng = np.random.default_rng(seed)
    cols = [np.eye(n), np.ones((n, 1))]
    if n > 1:
        i, j = np.triu_indices(n, k=1)
        spikes = np.zeros((n, i.size))
        spikes[i, np.arange(i.size)] = 1.0
        spikes[j, np.arange(i.size)] = 1.0
        cols.append(spikes)
    if trials > 0:
        R = rng.standard_normal((n, trials))
        if complex_field:
            R = R + 1j * rng.standard_normal((n, trials))
        cols.append(R)
    return np.hstack(cols)


def worst_distortion(A, p, trials=64, seed=0):
    """Largest | ||A a||_p - ||a||_p | over probe vectors a with ||a||_p = 1.

    Probes are the canonical vectors, the all-ones vector, every two-spike
    vector and ``trials`` seeded Gaussian vectors.
    """
    A = np.asarray(A)
    n = A.shape[1]
    X = _probe_vectors(n, trials, seed, np.iscomplexobj(A))
    X = X / (np.sum(np.abs(X) ** p, axis=0) ** (1.0 / p))
    out = np.sum(np.abs(A @ X) ** p, axis=0) ** (1.0 / p)
    gaps = np.abs(out - 1.0)
    k = int(np.argmax(gaps))
    return X[:, k].copy(), float(gaps[k])


def validate(pair: BasisPair, trials: int = 64, seed: int = 0) -> ValidationReport:
    """Check the four defining clauses of a p-orthonormal basis.

    The synthesis isometry clause is checked structurally (unitary for p=2,
    generalized permutation otherwise) and empirically on probe vectors. The
    reported clause is ``synthesis_isometry`` whenever that clause fails,
    since the norm clauses are consequences of it.
    """
    n, p = pair.n, pair.p
    violations = []
    details = {}

    bio = float(np.max(np.abs(pair.F @ pair.T - np.eye(n))))
    details["biorthogonality_error"] = bio
    if bio > TOL:
        violations.append("biorthogonality")

    col = max(abs(p_norm(pair.T[:, j], p) - 1.0) for j in range(n))
    details["vector_norm_error"] = col
    if col > TOL:
        violations.append("unit_vector_norm")

    row = max(abs(functional_norm(pair.F[j, :], p) - 1.0) for j in range(n))
    details["functional_norm_error"] = row
    if row > TOL:
        violations.append("unit_functional_norm")

    structural_ok = is_lp_isometry(pair.T, p)
    witness, distortion = worst_distortion(pair.T, p, trials, seed)
    empirical_ok = distortion <= TOL
    details["max_distortion"] = distortion
    if not (structural_ok and empirical_ok):
        violations.append("synthesis_isometry")

    if not violations:
        return ValidationReport(True, details=details)
    clause = "synthesis_isometry" if "synthesis_isometry" in violations else violations[0]
    return ValidationReport(
        valid=False,
        violated_clause=clause,
        violations=tuple(violations),
        witness=witness,
        distortion=distortion,
        structural_ok=structural_ok,
        empirical_ok=empirical_ok,
        details=details,
    )


def canonical_basis(n: int, p) -> BasisPair:
    """The coordinate vectors delta_j with their coordinate functionals."""
    if int(n) < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    I = np.eye(int(n))
    return BasisPair(I, I.copy(), p)


def dft_basis(n: int, p=2.0) -> BasisPair:
    """Unitary DFT basis, T[j, k] = n^(-1/2) exp(2 pi i jk / n)."""
    if float(p) != 2.0:
        raise DomainError("the DFT matrix is an l^p isometry only for p = 2")
    if int(n) < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    n = int(n)
    jk = np.outer(np.arange(n), np.arange(n)) % n
    T = np.exp(2j * np.pi * jk / n) / np.sqrt(n)
    return BasisPair(T, T.conj().T, 2.0)


def random_isometry(n, p, rng, field="real", structure=None) -> np.ndarray:
    """A seeded random isometry of l^p([n]).

    ``structure`` is "unitary" (p = 2 only) or "genperm"; by default unitary
    for p = 2 and genperm otherwise. Unitary: QR of a Gaussian matrix with
    column phases fixed so each column's first entry is real and nonnegative.
    Genperm: a random permutation times a random unimodular diagonal.
    """
    if field not in ("real", "complex"):
        raise DomainError(f"field must be 'real' or 'complex', got {field!r}")
    if structure is None:
        structure = "unitary" if p == 2.0 else "genperm"
    if structure not in ("unitary", "genperm"):
        raise DomainError(f"unknown isometry structure {structure!r}")
    if structure == "unitary" and p != 2.0:
        raise DomainError("unitary matrices are l^p isometries only for p = 2")
    if structure == "unitary":
        A = rng.standard_normal((n, n))
        if field == "complex":
            A = A + 1j * rng.standard_normal((n, n))
        Q, _ = np.linalg.qr(A)
        first = Q[0, :]
        mod = np.abs(first)
        phase = np.where(mod > 0, first / np.where(mod > 0, mod, 1.0), 1.0)
        return Q * phase.conj()
    perm = rng.permutation(n)
    if field == "complex":
        diag = np.exp(2j * np.pi * rng.random(n))
    else:
        diag = rng.choice([-1.0, 1.0], size=n)
    V = np.zeros((n, n), dtype=diag.dtype)
    V[perm, np.arange(n)] = diag
    return V


def random_basis(n: int, p, seed: int = 0, field: str = "real", structure=None) -> BasisPair:
    """Deterministic random p-orthonormal pair; F is the conjugate transpose of T."""
    p = as_exponent(p)
    if int(n) < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    T = random_isometry(int(n), p, rng, field, structure)
    return BasisPair(T, T.conj().T, p)


def _check_compatible(a: BasisPair, b: BasisPair):
    if a.n != b.n:
        raise StructuralError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.p != b.p:
        raise StructuralError(f"exponent mismatch: {a.p} vs {b.p}")


def isometry_between(pair_a: BasisPair, pair_b: BasisPair) -> np.ndarray:
    """Matrix of x -> sum_j f_j(x) omega_j, the isometry carrying tau_j to omega_j."""
    _check_compatible(pair_a, pair_b)
    return pair_b.T @ pair_a.F


def from_isometry(V, pair: BasisPair) -> BasisPair:
    """Transport a pair along an isometry: omega_j = V tau_j, g_j = f_j V^-1."""
    V = np.asarray(V)
    if V.shape != pair.T.shape:
        raise StructuralError(f"isometry has shape {V.shape}, pair has n={pair.n}")
    if not is_lp_isometry(V, pair.p):
        witness, distortion = worst_distortion(V, pair.p)
        raise IsometryError(
            f"matrix is not an isometry of l^{pair.p:g} (distortion {distortion:.3g})",
            witness=witness,
            distortion=distortion,
        )
    return BasisPair(V @ pair.T, pair.F @ np.linalg.inv(V), pair.p)


def embed_to_lp(pair: BasisPair) -> np.ndarray:
    """Matrix of the isometric isomorphism x -> sum_j f_j(x) delta_j onto l^p([n])."""
    return np.array(pair.F)
