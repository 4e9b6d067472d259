import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpuncertainty.bases import canonical_basis, dft_basis, random_basis
from lpuncertainty.grams import SubsetPair, admissibility, cross_gram, mu_local
from lpuncertainty.search import (
    SearchConfig,
    all_subset_pairs,
    enumerate_admissible,
    extremal_ratio_search,
    sharpness_report,
)
from lpuncertainty.spaces import DomainError, PreconditionError, StructuralError

FAST = SearchConfig(restarts=8, steps=300)


def brute_localized(gram, p, k):
    out = set()
    for s in all_subset_pairs(gram.n, k):
        if admissibility(s, p, mu_local(gram, s)).admissible:
            out.add((s.M, s.N))
    return out


def test_dft4_global_sizes():
    gram = cross_gram(canonical_basis(4, 2), dft_basis(4))
    entries = list(enumerate_admissible(gram, 2, 3))
    sizes = {e.subsets.sizes for e in entries}
    # mu = 1/2, so admissible iff |M||N| < 4
    expected = {(a, b) for a in range(4) for b in range(4) if a * b < 4}
    assert sizes == expected
    for e in entries:
        a, b = e.subsets.sizes
        assert e.count == comb(4, a) * comb(4, b)


def test_identical_pairs_only_empty():
    d = dft_basis(5)
    gram = cross_gram(d, d)
    for e in enumerate_admissible(gram, 2, 2):
        assert 0 in e.subsets.sizes
    # the local coherence of the identity gram vanishes off the diagonal
    for e in enumerate_admissible(gram, 2, 2, localized=True):
        assert not set(e.subsets.M) & set(e.subsets.N)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.sampled_from([1.5, 2.0, 3.0]), st.integers(0, 10**6))
def test_localized_matches_brute_force(n, p, seed):
    structure = None if p == 2.0 else "unitary"
    a = random_basis(n, 2.0, seed=seed, field="real", structure=structure)
    b = random_basis(n, 2.0, seed=seed + 1, field="real", structure=structure)
    gram = cross_gram(a, b)
    k = min(n, 3)
    got = [(e.subsets.M, e.subsets.N) for e in enumerate_admissible(gram, p, k, localized=True)]
    assert len(got) == len(set(got))
    assert set(got) == brute_localized(gram, p, k)


def test_localized_covers_global():
    c, d = canonical_basis(8, 2), dft_basis(8)
    gram = cross_gram(c, d)
    loc = {(e.subsets.M, e.subsets.N) for e in enumerate_admissible(gram, 2, 2, localized=True)}
    for e in enumerate_admissible(gram, 2, 2):
        a, b = e.subsets.sizes
        for M in itertools.combinations(range(8), a):
            for N in itertools.combinations(range(8), b):
                assert (M, N) in loc


def test_enumerate_rejects_bad_size():
    gram = cross_gram(canonical_basis(3, 2), dft_basis(3))
    with pytest.raises(StructuralError):
        list(enumerate_admissible(gram, 2, 4))


def test_config_validation():
    with pytest.raises(DomainError):
        SearchConfig(decay=1.0)
    with pytest.raises(DomainError):
        SearchConfig(restarts=0)
    with pytest.raises(DomainError):
        SearchConfig(variant="other")
    cfg = SearchConfig()
    assert cfg.step_at(49) == 0.5 and cfg.step_at(50) == pytest.approx(0.475)


def test_empty_subsets_ratio_is_quarter(dft4):
    c, d = dft4
    r = extremal_ratio_search(c, d, SubsetPair((), (), 4), FAST)
    assert r.ratio == pytest.approx(0.25, rel=1e-14)


def test_inadmissible_rejected():
    d = dft_basis(4)
    with pytest.raises(PreconditionError):
        extremal_ratio_search(d, d, SubsetPair((0,), (0,), 4), FAST)


def test_deterministic_and_bounded(dft4):
    c, d = dft4
    s = SubsetPair((0,), (0,), 4)
    r1 = extremal_ratio_search(c, d, s, FAST)
    r2 = extremal_ratio_search(c, d, s, FAST)
    assert r1.ratio == r2.ratio
    assert np.array_equal(r1.best_x, r2.best_x)
    assert 0 < r1.ratio <= 1
    assert r1.ratio == pytest.approx(r1.certificate.lhs / r1.certificate.rhs)
    other = extremal_ratio_search(c, d, s, SearchConfig(restarts=8, steps=300, seed=1))
    assert other.ratio <= 1


@pytest.mark.parametrize("variant", ["fgj_swapped", "fgj_local", "fgj_swapped_local"])
def test_variants_search(dft4, variant):
    c, d = dft4
    cfg = SearchConfig(restarts=4, steps=200, variant=variant)
    r = extremal_ratio_search(c, d, SubsetPair((0,), (1,), 4), cfg)
    assert r.variant == variant and r.ratio <= 1


def test_sharpness_report(dft4):
    c, d = dft4
    results = [
        extremal_ratio_search(c, d, SubsetPair(M, N, 4), FAST)
        for M, N in [((0,), (0,)), ((1,), (2,)), ((), ()), ((0, 1), ())]
    ]
    rows = sharpness_report(results)
    keys = [(r["size_M"], r["size_N"]) for r in rows]
    assert len(keys) == len(set(keys)) == 3
    gaps = [r["gap"] for r in rows]
    assert gaps == sorted(gaps)
    assert all(g > 0 for g in gaps)
    single = [r for r in rows if (r["size_M"], r["size_N"]) == (1, 1)][0]
    assert single["max_ratio"] == max(results[0].ratio, results[1].ratio)
    assert len(sharpness_report(results[:1])) == 1
    with pytest.raises(DomainError):
        sharpness_report([])


@pytest.mark.parametrize("n", [4, 8])
def test_dft_gaps_positive(n):
    c, d = canonical_basis(n, 2), dft_basis(n)
    r = extremal_ratio_search(c, d, SubsetPair((0,), (0,), n), FAST)
    assert 1 - r.ratio > 0
