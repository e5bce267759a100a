"""Exact subset-counting identities (integer/Fraction arithmetic only)."""

from fractions import Fraction
from math import comb

import pytest

from hamlb.combinatorics import (
    BinomTable,
    alternating_nonnegativity,
    alternating_sum,
    minimal_nonnegative_n,
    verify_complex_identity,
    verify_reconstruction,
    verify_simple_identity,
    z_count,
)


def test_binom_table_matches_math_comb():
    bt = BinomTable(20)
    for n in range(21):
        for k in range(n + 2):
            assert bt(n, k) == comb(n, k)


def test_z_count_small_hand_value():
    # n=6, k=3, c=2, |T1 & T2| = 1: counted by hand from the 20 subsets
    assert z_count(6, 3, 2, 1) == 6


def test_z_count_routes_agree():
    for n in (6, 8, 10):
        for c in (2, 3):
            if 2 * c > n:
                continue
            for k in range((3 * c + 1) // 2, min(3 * c, n) + 1):
                for t in range(c + 1):
                    e = z_count(n, k, c, t, method="enumerate")
                    p = z_count(n, k, c, t, method="partition")
                    assert e == p, (n, k, c, t)


def test_z_count_frozen_values_12_6_2():
    # the triple where the covariance floor fails; counts pinned from both
    # counting routes
    assert z_count(12, 6, 2, 0) == 280
    assert z_count(12, 6, 2, 1) == 252
    assert z_count(12, 6, 2, 2) == 504


def test_enumeration_guard():
    with pytest.raises(ValueError):
        z_count(40, 20, 2, 1, method="enumerate")


def test_simple_identity_range():
    for l in range(0, 33):
        for t in range(0, l + 1):
            assert verify_simple_identity(l, t), (l, t)


def test_complex_identity_and_reconstruction():
    for n in (8, 10, 12, 14):
        for c in (2, 3):
            for k in range((3 * c + 1) // 2, min(3 * c, n) + 1):
                assert verify_reconstruction(n, k, c), (n, k, c)
                for r in range(1, c + 1):
                    assert verify_complex_identity(n, k, c, r), (n, k, c, r)


def test_alternating_sum_values():
    assert alternating_sum(12, 6, 2, 1) == Fraction(-28)
    assert alternating_sum(12, 6, 2, 2) == Fraction(280)
    # negativity at r=1 is exactly what breaks the PSD floor at (12, 6, 2)
    assert alternating_sum(12, 6, 2, 1) < 0


def test_alternating_nonnegativity_report():
    rep = alternating_nonnegativity(14, 3, 2)
    assert rep[0] == Fraction(-1)
    assert rep[1] == Fraction(26)
    assert rep[2] == Fraction(40)
    rep15 = alternating_nonnegativity(15, 3, 2)
    assert all(v >= 0 for v in rep15.values())
    assert rep15[0] == Fraction(7, 4)


def test_minimal_nonnegative_n():
    assert minimal_nonnegative_n(3, 2) == 15
    assert minimal_nonnegative_n(4, 2) == 18


def test_identity_input_validation():
    with pytest.raises(ValueError):
        z_count(6, 3, 2, 5)  # t > c
    with pytest.raises(ValueError):
        verify_complex_identity(3, 3, 2, 1)  # n < 2c
