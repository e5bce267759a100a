"""Exact subset-counting identities behind the covariance decomposition.

Everything here is integer or rational arithmetic; floats never appear.  The
central quantity is

    z_t(n, k, c) = #{ S subset of [n], |S| = k : |S & A| and |S & B| odd }

for fixed c-subsets A, B with |A & B| = t.  The count depends on (n, k, c, t)
only, which is what makes the covariance matrix of a Gaussian k-local
instance a function of pairwise intersection sizes.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb

ENUM_GUARD = 10**7


class BinomTable:
    """Pascal-triangle table of binomial coefficients up to a fixed n."""

    def __init__(self, max_n: int):
        if max_n < 0:
            raise ValueError("max_n must be >= 0")
        self.max_n = max_n
        rows = [[1]]
        for n in range(1, max_n + 1):
            prev = rows[-1]
            row = [1] + [prev[j - 1] + prev[j] for j in range(1, n)] + [1]
            rows.append(row)
        self._rows = rows

    def __call__(self, n: int, k: int) -> int:
        if n < 0 or n > self.max_n:
            raise ValueError(f"n={n} outside table range 0..{self.max_n}")
        if k < 0 or k > n:
            return 0
        return self._rows[n][k]


def _check_ztc(n: int, k: int, c: int, t: int) -> None:
    if not (0 <= t <= c):
        raise ValueError(f"need 0 <= t <= c, got t={t}, c={c}")
    if 2 * c - t > n:
        raise ValueError(f"subsets do not fit: |A u B| = {2 * c - t} > n = {n}")
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n")


def z_count(n: int, k: int, c: int, t: int, method: str = "partition") -> int:
    """The count z_t(n, k, c), by explicit enumeration or by a partition sum.

    The two methods are independent: enumeration walks all k-subsets
    (guarded by C(n, k) <= 10^7); the partition sum splits S over the four
    cells of [n] induced by A and B and constrains the two parities.
    """
    _check_ztc(n, k, c, t)
    if method == "enumerate":
        if comb(n, k) > ENUM_GUARD:
            raise ValueError(f"C({n},{k}) exceeds the enumeration guard {ENUM_GUARD}")
        A = frozenset(range(1, c + 1))
        B = frozenset(range(c - t + 1, 2 * c - t + 1))
        count = 0
        for S in combinations(range(1, n + 1), k):
            s = frozenset(S)
            if len(s & A) % 2 == 1 and len(s & B) % 2 == 1:
                count += 1
        return count
    if method == "partition":
        # cells: A&B (t), A\B (c-t), B\A (c-t), complement (n-2c+t)
        total = 0
        for i in range(0, min(t, k) + 1):
            for p in range(0, min(c - t, k - i) + 1):
                if (i + p) % 2 == 0:
                    continue
                for q in range(0, min(c - t, k - i - p) + 1):
                    if (i + q) % 2 == 0:
                        continue
                    r = k - i - p - q
                    if r < 0 or r > n - 2 * c + t:
                        continue
                    total += comb(t, i) * comb(c - t, p) * comb(c - t, q) * comb(n - 2 * c + t, r)
        return total
    raise ValueError(f"unknown method {method!r}")


def verify_simple_identity(l: int, t: int) -> bool:
    """sum_{r=t}^{l} (-1)^(r-t) C(r,t) C(l,r) equals [l == t], exactly."""
    if l < 0 or t < 0 or t > l:
        raise ValueError("need 0 <= t <= l")
    s = sum((-1) ** (r - t) * comb(r, t) * comb(l, r) for r in range(t, l + 1))
    return s == (1 if l == t else 0)


def alternating_sum(n: int, k: int, c: int, r: int) -> Fraction:
    """Closed form 4^(r-1) sum_s (-1)^s C(2c-2r, s) C(n-2c, k-r-s), exact.

    For r = 0 the prefactor is the rational 1/4, hence the Fraction return.
    """
    if not (0 <= r <= c):
        raise ValueError("need 0 <= r <= c")
    s_sum = sum(
        (-1) ** s * comb(2 * c - 2 * r, s) * comb(n - 2 * c, k - r - s)
        for s in range(0, k - r + 1)
    )
    return Fraction(4) ** (r - 1) * s_sum


def verify_complex_identity(n: int, k: int, c: int, r: int) -> bool:
    """sum_{t<=r} (-1)^(r-t) C(r,t) z_t == alternating_sum(n,k,c,r), exactly."""
    if n < 2 * c:
        raise ValueError("identity needs n >= 2c so that z_0 is realizable")
    lhs = sum(
        (-1) ** (r - t) * comb(r, t) * z_count(n, k, c, t) for t in range(0, r + 1)
    )
    return Fraction(lhs) == alternating_sum(n, k, c, r)


def verify_reconstruction(n: int, k: int, c: int) -> bool:
    """Binomial-transform inversion: z_l == sum_r (transformed_r) C(l, r) for l <= c."""
    if n < 2 * c:
        raise ValueError("needs n >= 2c")
    z = [z_count(n, k, c, t) for t in range(c + 1)]
    inner = [
        sum((-1) ** (r - t) * comb(r, t) * z[t] for t in range(r + 1))
        for r in range(c + 1)
    ]
    return all(z[l] == sum(inner[r] * comb(l, r) for r in range(c + 1)) for l in range(c + 1))


def alternating_nonnegativity(n: int, k: int, c: int) -> dict[int, Fraction]:
    """The closed-form values for r = 0..c; negativity at small n is reported
    by callers, never asserted (the covariance floor argument needs all of
    them nonnegative, which only holds for n large enough)."""
    if n < 2 * c:
        raise ValueError("needs n >= 2c")
    return {r: alternating_sum(n, k, c, r) for r in range(c + 1)}


def minimal_nonnegative_n(k: int, c: int, n_max: int = 64) -> int | None:
    """Smallest n with every alternating_sum(n, k, c, r) >= 0 such that the
    property persists through n_max; None if that never happens by n_max."""
    start = None
    for n in range(max(2 * c, k), n_max + 1):
        vals = alternating_nonnegativity(n, k, c)
        if all(v >= 0 for v in vals.values()):
            if start is None:
                start = n
        else:
            start = None
    return start
