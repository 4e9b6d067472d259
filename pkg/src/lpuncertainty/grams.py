"""Cross-Gram matrices, coherence maxima and the admissibility test.

Indices are 0-based internally. ``SubsetPair.one_based`` and
``SubsetPair.from_one_based`` convert at I/O boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bases import BasisPair, _check_compatible
from .spaces import StructuralError, as_exponent, conjugate_exponent

# Margin applied to the strict inequality bound * mu < 1. Products such as
# sqrt(2) * sqrt(2) * 0.5 land within a few ulps of 1 on exact ties; the
# margin resolves those ties as inadmissible.
BOUNDARY_MARGIN = 1e-12


@dataclass(frozen=True, eq=False)
class CrossGram:
    """G[k, j] = g_k(tau_j)."""

    G: np.ndarray
    source_f: str = ""
    source_g: str = ""

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.G)


@dataclass(frozen=True)
class SubsetPair:
    M: tuple
    N: tuple
    universe: int

    def __post_init__(self):
        n = int(self.universe)
        object.__setattr__(self, "universe", n)
        for name in ("M", "N"):
            idx = tuple(int(i) for i in getattr(self, name))
            if len(set(idx)) != len(idx):
                raise StructuralError(f"{name} has duplicate indices: {idx}")
            for i in idx:
                if not 0 <= i < n:
                    raise StructuralError(f"{name} index {i + 1} outside 1..{n}")
            object.__setattr__(self, name, tuple(sorted(idx)))

    @classmethod
    def from_one_based(cls, M, N, universe):
        return cls(tuple(i - 1 for i in M), tuple(i - 1 for i in N), universe)

    @property
    def one_based(self):
        return [i + 1 for i in self.M], [i + 1 for i in self.N]

    @property
    def sizes(self):
        return len(self.M), len(self.N)

    def complement(self, which: str) -> tuple:
        S = set(getattr(self, which))
        return tuple(i for i in range(self.universe) if i not in S)


@dataclass(frozen=True)
class AdmissibilityReport:
    mu: float
    bound: float
    admissible: bool
    constant: Optional[float]
    empty_subset: bool = False


def cross_gram(pair_f: BasisPair, pair_g: BasisPair) -> CrossGram:
    """Coherence matrix of the second pair's functionals against the first pair's vectors."""
    _check_compatible(pair_f, pair_g)
    return CrossGram(pair_g.F @ pair_f.T, pair_f.digest, pair_g.digest)


def mu_global(gram: CrossGram) -> float:
    return float(gram.moduli.max())


def mu_local(gram: CrossGram, subsets: SubsetPair) -> float:
    """max |g_k(tau_j)| over j in M, k in N; 0 when either set is empty."""
    if subsets.universe != gram.n:
        raise StructuralError(f"subsets live in 1..{subsets.universe}, gram has n={gram.n}")
    if not subsets.M or not subsets.N:
        return 0.0
    return float(gram.moduli[np.ix_(subsets.N, subsets.M)].max())


def size_bound(m: int, k: int, p: float) -> float:
    """o(M)^(1/q) * o(N)^(1/p) with 0^(1/q) = 0."""
    if m == 0 or k == 0:
        return 0.0
    q = conjugate_exponent(p)
    return m ** (1.0 / q) * k ** (1.0 / p)


def admissibility(subsets: SubsetPair, p, mu: float) -> AdmissibilityReport:
    p = as_exponent(p)
    if mu < 0:
        raise ValueError(f"coherence must be nonnegative, got {mu}")
    m, k = subsets.sizes
    bound = size_bound(m, k, p)
    prod = bound * mu
    ok = prod < 1.0 - BOUNDARY_MARGIN
    return AdmissibilityReport(
        mu=float(mu),
        bound=bound,
        admissible=ok,
        constant=1.0 + 1.0 / (1.0 - prod) if ok else None,
        empty_subset=(m == 0 or k == 0),
    )


def admissibility_swapped(subsets: SubsetPair, p, mu_f_omega: float) -> AdmissibilityReport:
    """Admissibility with the coherence taken over |f_j(omega_k)|.

    The arithmetic is identical; only the provenance of ``mu`` differs.
    """
    return admissibility(subsets, p, mu_f_omega)
