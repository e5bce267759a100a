"""Gaussian k-local instances: goodness counts, covariance PSD floor, split bound."""

from itertools import combinations
from math import comb, log

import numpy as np
import pytest

from hamlb.local_case import (
    LocalInstance,
    SpikeEnsemble,
    covariance_bruteforce,
    covariance_psd_check,
    covariance_zcount,
    gap_table,
    goodness_check,
    local_sigma2,
    per_step_split_bound,
    random_subset_family,
    sample_local_instance,
)
from hamlb.pauli_core import subset_mask


def test_sigma2_uses_natural_log():
    assert local_sigma2(14, 3) == pytest.approx(1.0 / (30.0 * log(14)), rel=1e-15)
    with pytest.raises(ValueError):
        local_sigma2(1, 3)


def test_sample_determinism_and_support():
    a = sample_local_instance(8, 3, 2, 1.0, seed=5)
    b = sample_local_instance(8, 3, 2, 1.0, seed=5)
    assert np.array_equal(a.g.values, b.g.values)
    assert a.sigma2 == local_sigma2(8, 3)
    # "exact" support: every nonzero coefficient sits on weight-k Z strings
    weights = [p.z_mask.bit_count() for p, v in a.alpha.items() if v != 0.0]
    assert weights and set(weights) == {3}
    assert len(weights) == comb(8, 3)
    up = sample_local_instance(8, 3, 2, 1.0, seed=5, support_degree="upto")
    up_weights = {p.z_mask.bit_count() for p, v in up.alpha.items() if v != 0.0}
    assert up_weights == {1, 2, 3}


def test_sample_validation():
    with pytest.raises(ValueError):
        sample_local_instance(8, 3, 1, 1.0, 0)  # c < 2
    with pytest.raises(ValueError):
        sample_local_instance(8, 2, 2, 1.0, 0)  # k < ceil(3c/2)
    with pytest.raises(ValueError):
        sample_local_instance(8, 7, 2, 1.0, 0)  # k > 3c
    with pytest.raises(ValueError):
        sample_local_instance(3, 3, 2, 1.0, 0)  # n < 2c
    with pytest.raises(ValueError):
        sample_local_instance(8, 3, 2, 0.0, 0)  # beta must be positive
    with pytest.raises(ValueError):
        sample_local_instance(8, 3, 2, 1.0, 0, support_degree="all")


def test_spike_ensemble():
    ens = SpikeEnsemble(8, 2)
    assert len(ens) == comb(8, 2)
    assert all(int(m).bit_count() == 2 for m in ens.masks)
    rng1 = np.random.default_rng(0)
    rng2 = np.random.default_rng(0)
    assert np.array_equal(ens.sample(rng1, 50), ens.sample(rng2, 50))
    with pytest.raises(ValueError):
        SpikeEnsemble(4, 5)


def test_gap_table_symmetry():
    inst = sample_local_instance(6, 3, 2, 1.0, 0)
    mask = subset_mask(6, (1, 4))
    gaps = gap_table(inst, mask)
    idx = np.arange(gaps.size)
    assert np.array_equal(gaps, gaps[idx ^ mask])


def test_goodness_matches_flip_identity():
    # independent route: gap = |2 sum_{|S & T| odd} alpha_S chi_S(x)|
    inst = sample_local_instance(6, 3, 2, 1.0, seed=2)
    rep = goodness_check(inst, threshold_exponent=0.1)
    assert rep.threshold == pytest.approx(6.0 ** 0.1, rel=1e-15)
    n = inst.n
    items = [(p.z_mask, v) for p, v in inst.alpha.items() if v != 0.0]
    xs = np.arange(1 << n)
    expect = np.zeros(1 << n)
    for T in combinations(range(1, n + 1), inst.c):
        tm = subset_mask(n, T)
        gap = np.zeros(1 << n)
        for sm, coef in items:
            if bin(sm & tm).count("1") % 2 == 1:
                chi = 1.0 - 2.0 * (np.bitwise_count(xs & sm).astype(np.int64) % 2)
                gap += coef * chi
        expect += np.abs(2.0 * gap) <= rep.threshold
    expect /= comb(n, inst.c)
    assert np.allclose(rep.fractions, expect, atol=1e-12)
    assert rep.max_fraction == expect.max()
    assert 0.0 <= rep.fractions.min() and rep.max_fraction <= 1.0
    assert rep.quantile(0.5) == float(np.quantile(rep.fractions, 0.5))


def test_subset_family_modes():
    full = random_subset_family(8, 2, seed=0)
    assert len(full) == comb(8, 2) and len(set(full)) == len(full)
    sampled = random_subset_family(14, 4, seed=0, max_size=50)
    assert len(sampled) == 50 and len(set(sampled)) == 50
    assert sampled == random_subset_family(14, 4, seed=0, max_size=50)


def test_covariance_routes_agree():
    fam = random_subset_family(10, 2, seed=0)
    Qb = covariance_bruteforce(10, 3, 2, fam)
    Qz = covariance_zcount(10, 3, 2, fam)
    assert np.array_equal(Qb, Qz)
    assert np.array_equal(Qb, Qb.T)
    # entries depend only on the pairwise intersection size
    sets = [frozenset(T) for T in fam]
    by_t = {}
    for i in range(len(fam)):
        for j in range(len(fam)):
            by_t.setdefault(len(sets[i] & sets[j]), set()).add(int(Qb[i, j]))
    assert all(len(vals) == 1 for vals in by_t.values())


def test_covariance_rejects_duplicates():
    with pytest.raises(ValueError):
        covariance_bruteforce(8, 3, 2, [(1, 2), (1, 2)])


@pytest.mark.parametrize("n,k,c,floor", [(10, 3, 2, 24), (12, 3, 2, 32), (14, 4, 2, 180)])
def test_psd_floor_attained(n, k, c, floor):
    fam = random_subset_family(n, c, seed=0)
    chk = covariance_psd_check(n, k, c, fam)
    assert chk.floor == 4 ** (c - 1) * comb(n - 2 * c, k - c) == floor
    assert chk.satisfied
    # the floor is attained by disjoint pairs, not just respected
    assert chk.min_eigenvalue == pytest.approx(floor, abs=1e-6)


def test_psd_floor_fails_at_12_6_2():
    fam = random_subset_family(12, 2, seed=0)
    chk = covariance_psd_check(12, 6, 2, fam)
    assert chk.floor == 4 * comb(8, 4) == 280
    assert not chk.satisfied
    assert abs(chk.min_eigenvalue) <= 1e-6  # Q is exactly singular
    # integer witness: v_T = [1 in T] - [2 in T] is a null vector of Q
    Q = covariance_bruteforce(12, 6, 2, fam)
    v = np.array([(1 in T) - (2 in T) for T in fam], dtype=np.int64)
    assert v.any()
    assert np.array_equal(Q @ v, np.zeros(len(fam), dtype=np.int64))


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    s = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return s / np.linalg.norm(s)


def test_split_bound_unconditional():
    inst = sample_local_instance(8, 3, 2, 1.0, seed=1)
    mask = subset_mask(8, (2, 5))
    for seed, t in [(0, 0.3), (1, 2.0), (2, 17.0), (3, 400.0)]:
        rec = per_step_split_bound(inst, mask, random_state(8, seed), t)
        assert rec.exact_dist <= rec.split_bound + 1e-9
        assert rec.split_bound == 2.0 * rec.proj_v_norm + rec.vbar_block_sup
        assert 0.0 <= rec.exact_dist <= 2.0 + 1e-9
    rec0 = per_step_split_bound(inst, mask, random_state(8, 0), 0.0)
    assert rec0.exact_dist == 0.0


def test_split_bound_matches_dense(monkeypatch):
    # cross-check the paired-block distance against a dense matrix product
    from hamlb.dense_linalg import expm_unitary
    from hamlb.pauli_core import PauliString, pauli_matrix

    inst = sample_local_instance(6, 3, 2, 1.0, seed=3)
    T = (1, 6)
    mask = subset_mask(6, T)
    psi = random_state(6, 9)
    t = 1.3
    M = np.diag(inst.g.values)
    X = pauli_matrix(PauliString.x_string(6, T))
    diff = expm_unitary(M, t) - expm_unitary(M + inst.beta * X, t)
    expect = float(np.linalg.norm(diff @ psi))
    rec = per_step_split_bound(inst, mask, psi, t)
    assert rec.exact_dist == pytest.approx(expect, abs=1e-9)


def test_split_bound_validation():
    inst = sample_local_instance(6, 3, 2, 1.0, seed=0)
    good = random_state(6, 0)
    with pytest.raises(ValueError):
        per_step_split_bound(inst, 0, good, 1.0)
    with pytest.raises(ValueError):
        per_step_split_bound(inst, 3, good[:16], 1.0)
    with pytest.raises(ValueError):
        per_step_split_bound(inst, 3, 2.0 * good, 1.0)
