"""Scalar substrate: exponents, p-norms and dual norms on K^n.

Vectors and matrices are plain numpy arrays. The scalar field is carried by
the dtype (float64 for real, complex128 for complex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXPONENT_TOL = 1e-14


class DomainError(ValueError):
    """A value lies outside the mathematical domain of an operation."""


class StructuralError(ValueError):
    """Shapes, dimensions or indices are inconsistent."""


class PreconditionError(ValueError):
    """A documented precondition on the inputs does not hold."""


def conjugate_exponent(p):
    """Return q with 1/p + 1/q = 1 for 1 < p < inf."""
    p = float(p)
    if not math.isfinite(p) or p <= 1.0:
        raise DomainError(f"exponent must satisfy 1 < p < inf, got {p!r}")
    if p == 2.0:
        return 2.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class Exponent:
    """A Hölder exponent p in (1, inf) together with its conjugate q."""

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        conjugate_exponent(self.p)

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)

    def __float__(self):
        return self.p


def as_exponent(p) -> float:
    """Validate an exponent at an API boundary and return it as a float."""
    if isinstance(p, Exponent):
        return p.p
    return Exponent(p).p


def _as_vector(v) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1:
        raise StructuralError(f"expected a 1-d vector, got shape {v.shape}")
    if v.size == 0:
        raise DomainError("norm of an empty vector is undefined")
    return v


def _norm(v: np.ndarray, r: float) -> float:
    a = np.abs(v)
    m = a.max()
    if m == 0.0:
        return 0.0
    # scale by the max entry so |v|^r neither overflows nor underflows
    return float(m * np.sum((a / m) ** r) ** (1.0 / r))


def p_norm(v, p) -> float:
    """(sum |v_i|^p)^(1/p) for p >= 1."""
    v = _as_vector(v)
    p = float(p)
    if not p >= 1.0:
        raise DomainError(f"p-norm needs p >= 1, got {p!r}")
    if math.isinf(p):
        return float(np.abs(v).max())
    return _norm(v, p)


def functional_norm(coeffs, p) -> float:
    """Dual norm on (l^p)* of the functional x -> sum coeffs_i x_i, i.e. the q-norm."""
    v = _as_vector(coeffs)
    return _norm(v, conjugate_exponent(p))


def field_of(*arrays) -> str:
    return "complex" if any(np.iscomplexobj(a) for a in arrays) else "real"


def random_unit_vectors(n, count, p, rng, field="real") -> np.ndarray:
    """Gaussian directions scaled to unit p-norm, returned as columns of an (n, count) array."""
    X = rng.standard_normal((n, count))
    if field == "complex":
        X = X + 1j * rng.standard_normal((n, count))
    norms = np.sum(np.abs(X) ** p, axis=0) ** (1.0 / p)
    return X / norms
