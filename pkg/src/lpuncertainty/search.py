"""Admissible subset enumeration and extremal-ratio search.

The extremal search maximizes ||x|| / rhs(x) for a fixed admissible (M, N).
The inequality says this ratio never exceeds 1; how close it gets probes how
sharp the constant is. Results are reported as found and never extrapolated.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterator

import numpy as np

from .bases import BasisPair
from .grams import CrossGram, SubsetPair, admissibility, cross_gram, mu_global, mu_local
from .spaces import DomainError, PreconditionError, StructuralError
from .uncertainty import VARIANTS, Certificate, TheoremViolation, _roles, verify

RATIO_TOL = 1e-9
RECOMPUTE_TOL = 1e-10


@dataclass(frozen=True)
class SearchConfig:
    max_subset_size: int = 3
    restarts: int = 32
    steps: int = 2000
    step_size: float = 0.5
    decay: float = 0.95
    decay_every: int = 50
    seed: int = 0
    variant: str = "fgj"

    def __post_init__(self):
        for name in ("max_subset_size", "restarts", "steps", "decay_every"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"{name} must be positive")
        if not self.step_size > 0:
            raise DomainError("step_size must be positive")
        if not 0.0 < self.decay < 1.0:
            raise DomainError("decay must lie in (0, 1) so step sizes strictly decrease")
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")

    def step_at(self, t: int) -> float:
        return self.step_size * self.decay ** (t // self.decay_every)


@dataclass(frozen=True)
class AdmissibleEntry:
    subsets: SubsetPair
    report: object
    count: int = 1


@dataclass(frozen=True, eq=False)
class ExtremalResult:
    best_x: np.ndarray
    ratio: float
    subsets: SubsetPair
    certificate: Certificate
    trace: tuple
    n: int
    p: float
    variant: str
    config: SearchConfig = field(default_factory=SearchConfig)


def all_subset_pairs(n: int, max_size: int) -> Iterator[SubsetPair]:
    """Every (M, N) with |M|, |N| <= max_size, empty sets included."""
    sets = [c for r in range(max_size + 1) for c in itertools.combinations(range(n), r)]
    for M in sets:
        for N in sets:
            yield SubsetPair(M, N, n)


def enumerate_admissible(gram: CrossGram, p, max_subset_size: int, localized: bool = False):
    """Stream admissible (M, N) with both sizes at most ``max_subset_size``.

    Global mode yields one representative per admissible size pair, with
    ``count`` the number of subset pairs of those sizes. Localized mode yields
    every admissible pair explicitly; the search is pruned using the fact that
    enlarging M or N can only destroy admissibility.
    """
    n = gram.n
    if not 0 <= max_subset_size <= n:
        raise StructuralError(f"max_subset_size must lie in 0..{n}")
    if not localized:
        mu = mu_global(gram)
        for a in range(max_subset_size + 1):
            for b in range(max_subset_size + 1):
                rep = SubsetPair(range(a), range(b), n)
                report = admissibility(rep, p, mu)
                if report.admissible:
                    yield AdmissibleEntry(rep, report, comb(n, a) * comb(n, b))
        return
    yield from _localized(gram, p, max_subset_size)


def _localized(gram, p, k):
    n = gram.n

    def check(M, N):
        s = SubsetPair(M, N, n)
        return s, admissibility(s, p, mu_local(gram, s))

    def visit_n(M, allowed, N, start):
        for pos in range(start, len(allowed)):
            N2 = N + (allowed[pos],)
            s, r = check(M, N2)
            if not r.admissible:
                continue
            yield AdmissibleEntry(s, r)
            if len(N2) < k:
                yield from visit_n(M, allowed, N2, pos + 1)

    def visit_m(M, cand):
        # (M, {k}) inadmissible rules k out for M and for every superset of M
        allowed = [j for j in cand if check(M, (j,))[1].admissible] if M else list(cand)
        s, r = check(M, ())
        yield AdmissibleEntry(s, r)
        yield from visit_n(M, allowed, (), 0)
        if len(M) < k:
            for j in range((M[-1] + 1) if M else 0, n):
                yield from visit_m(M + (j,), allowed)

    yield from visit_m((), range(n))


def _ascent(first, second, subsets, constant, config, cplx):
    """Run every restart in lockstep; restart r draws only from its own seed stream."""
    n, p, R, steps = first.n, first.p, config.restarts, config.steps
    FM = first.F[list(subsets.complement("M")), :]
    GN = second.F[list(subsets.complement("N")), :]
    dtype = np.complex128 if cplx else np.float64

    X = np.empty((n, R), dtype=dtype)
    coord = np.empty((R, steps), dtype=np.int64)
    unit = np.ones((R, steps), dtype=dtype)
    for r, child in enumerate(np.random.SeedSequence(config.seed).spawn(R)):
        rng = np.random.default_rng(child)
        x = rng.standard_normal(n)
        if cplx:
            x = x + 1j * rng.standard_normal(n)
        X[:, r] = x
        coord[r] = rng.integers(n, size=steps)
        if cplx:
            unit[r] = np.where(rng.integers(2, size=steps) == 1, 1j, 1.0)

    def pn(Y):
        return np.sum(np.abs(Y) ** p, axis=0) ** (1.0 / p)

    def ratio(Y, YM, YN):
        rhs = constant * (pn(YM) + pn(YN))
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(rhs > 0, pn(Y) / rhs, np.inf)

    CM, CN = FM @ X, GN @ X
    best = ratio(X, CM, CN)
    cols = np.arange(R)
    for t in range(steps):
        i = coord[:, t]
        d = config.step_at(t) * unit[:, t]
        for sgn in (1.0, -1.0):
            Y = X.copy()
            Y[i, cols] += sgn * d
            YM = CM + sgn * d * FM[:, i]
            YN = CN + sgn * d * GN[:, i]
            r = ratio(Y, YM, YN)
            up = r > best
            if up.any():
                X[:, up], CM[:, up], CN[:, up] = Y[:, up], YM[:, up], YN[:, up]
                best = np.where(up, r, best)
    return X, best


def extremal_ratio_search(
    pair_f: BasisPair, pair_g: BasisPair, subsets: SubsetPair, config: SearchConfig = SearchConfig()
) -> ExtremalResult:
    """Maximize ||x|| / rhs(x) by seeded restarts and coordinate perturbation ascent.

    Each step perturbs one randomly chosen coordinate (real or imaginary part)
    by plus or minus the current step size and keeps the better move. The
    step size decays geometrically. Deterministic for a fixed config.

    Raises
    ------
    PreconditionError
        If (M, N) is not admissible for the chosen variant.
    TheoremViolation
        If a ratio above 1 is ever found.
    """
    swapped, local = VARIANTS[config.variant]
    first, second = _roles(pair_f, pair_g, swapped)
    gram = cross_gram(first, second)
    mu = mu_local(gram, subsets) if local else mu_global(gram)
    report = admissibility(subsets, first.p, mu)
    if not report.admissible:
        raise PreconditionError(
            f"subsets M={subsets.one_based[0]} N={subsets.one_based[1]} are not admissible "
            f"(bound {report.bound:.6g} * mu {mu:.6g} >= 1)"
        )
    cplx = pair_f.field == "complex" or pair_g.field == "complex"
    X, best = _ascent(first, second, subsets, report.constant, config, cplx)
    trace = tuple(float(v) for v in best)
    # argmax returns the lowest restart index among ties
    k = int(np.argmax(best))
    x = X[:, k]
    x = x / (np.sum(np.abs(x) ** first.p) ** (1.0 / first.p))

    cert = verify(pair_f, pair_g, subsets, x, config.variant)
    ratio = cert.lhs / cert.rhs
    repro = {
        "variant": config.variant,
        "subsets": subsets.one_based,
        "x": x.tolist() if not cplx else [[z.real, z.imag] for z in x],
        "pair_digests": cert.pair_digests,
        "config": config,
    }
    if ratio > 1.0 + RATIO_TOL:
        raise TheoremViolation(f"ratio {ratio!r} exceeds 1 on admissible subsets", repro)
    if abs(ratio - best[k]) > RECOMPUTE_TOL:
        raise AssertionError(f"recomputed ratio {ratio!r} disagrees with search value {best[k]!r}")
    return ExtremalResult(x, ratio, subsets, cert, trace, first.n, first.p, config.variant, config)


def witness_digest(x) -> str:
    return hashlib.sha256(np.ascontiguousarray(x, dtype=np.complex128).tobytes()).hexdigest()[:16]


def sharpness_report(results) -> list:
    """One row per (n, p, |M|, |N|) with the best ratio found, sorted by gap to 1."""
    results = list(results)
    if not results:
        raise DomainError("sharpness report needs at least one result")
    best = {}
    for r in results:
        key = (r.n, r.p, *r.subsets.sizes)
        if key not in best or r.ratio > best[key].ratio:
            best[key] = r
    rows = [
        {
            "n": key[0],
            "p": key[1],
            "size_M": key[2],
            "size_N": key[3],
            "max_ratio": r.ratio,
            "gap": 1.0 - r.ratio,
            "witness_digest": witness_digest(r.best_x),
        }
        for key, r in best.items()
    ]
    rows.sort(key=lambda row: (row["gap"], row["n"], row["p"], row["size_M"], row["size_N"]))
    return rows
