"""Pauli strings as (x_mask, z_mask) bit pairs, and diagonal Hamiltonians.

Conventions, fixed once for the whole package:

* Qubits are numbered 1..n.  Qubit ``i`` owns bit ``n - i`` of every mask and
  of every basis-state index, so qubit 1 is the most significant bit and
  qubit n the least significant.  With this layout ``pauli_matrix`` equals
  the Kronecker product of the single-qubit factors taken in qubit order,
  and an X on qubit n couples adjacent basis indices ``2y`` and ``2y + 1``.
* Basis index ``b`` represents the sign vector ``x`` with
  ``x_i = (-1)^(bit of b owned by qubit i)``.  The all-(+1) vector is b = 0.
* ``Y = i X Z``.  A string is ``i^(|x_mask & z_mask|)`` times the product of
  per-qubit ``X^x Z^z`` factors; with that phase every string is Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import json

import numpy as np

from .kernels import fwht_inplace

_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
}

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


def subset_mask(n: int, subset: Iterable[int]) -> int:
    """Bitmask of a subset of qubits 1..n (qubit i -> bit n - i)."""
    m = 0
    for i in subset:
        if not 1 <= i <= n:
            raise ValueError(f"qubit index {i} outside 1..{n}")
        b = 1 << (n - i)
        if m & b:
            raise ValueError(f"repeated qubit index {i}")
        m |= b
    return m


def mask_subset(n: int, mask: int) -> tuple[int, ...]:
    """Inverse of subset_mask."""
    return tuple(i for i in range(1, n + 1) if mask >> (n - i) & 1)


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli string encoded by X- and Z-support bitmasks."""

    n: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        full = (1 << self.n) - 1
        if not 0 <= self.x_mask <= full or not 0 <= self.z_mask <= full:
            raise ValueError("mask outside of qubit range")

    @classmethod
    def z_string(cls, n: int, subset: Iterable[int]) -> "PauliString":
        return cls(n, 0, subset_mask(n, subset))

    @classmethod
    def x_string(cls, n: int, subset: Iterable[int]) -> "PauliString":
        return cls(n, subset_mask(n, subset), 0)

    @property
    def locality(self) -> int:
        """Number of non-identity tensor factors."""
        return (self.x_mask | self.z_mask).bit_count()

    def label(self) -> str:
        return "".join(
            _LETTER[(self.x_mask >> (self.n - i) & 1, self.z_mask >> (self.n - i) & 1)]
            for i in range(1, self.n + 1)
        )

    def __str__(self) -> str:
        return self.label()


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a Pauli string (n <= 12 guard)."""
    if p.n > 12:
        raise ValueError(f"dense Pauli matrix limited to n <= 12, got n={p.n}")
    m = np.eye(1, dtype=complex)
    for i in range(1, p.n + 1):
        bit = p.n - i
        m = np.kron(m, _SINGLE[(p.x_mask >> bit & 1, p.z_mask >> bit & 1)])
    return m


def pauli_product(p: PauliString, q: PauliString) -> tuple[PauliString, int]:
    """Product of two strings: returns (string, k) with P·Q = i^k · string.

    The phase exponent k (mod 4) comes from the per-qubit X^x Z^z normal
    ordering plus the i^|x&z| Hermitian-phase convention.
    """
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    x3 = p.x_mask ^ q.x_mask
    z3 = p.z_mask ^ q.z_mask
    k = (
        (p.x_mask & p.z_mask).bit_count()
        + (q.x_mask & q.z_mask).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (p.z_mask & q.x_mask).bit_count()
    ) % 4
    return PauliString(p.n, x3, z3), k


class CoeffVector:
    """Real coefficients attached to Pauli strings on a common qubit count.

    Stored sparsely as {(x_mask, z_mask): coeff}.  The JSON form is
    ``{"n": n, "terms": [{"x_mask":..., "z_mask":..., "coeff":...}, ...]}``
    with terms sorted by (z_mask, x_mask), so serialization round-trips
    byte for byte.
    """

    def __init__(self, n: int, terms: dict[tuple[int, int], float] | None = None):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self._terms: dict[tuple[int, int], float] = {}
        if terms:
            for (x, z), c in terms.items():
                self[PauliString(n, x, z)] = c

    def __setitem__(self, key: PauliString, coeff: float) -> None:
        if key.n != self.n:
            raise ValueError("qubit count mismatch")
        self._terms[(key.x_mask, key.z_mask)] = float(coeff)

    def __getitem__(self, key: PauliString) -> float:
        return self._terms.get((key.x_mask, key.z_mask), 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def items(self) -> Iterator[tuple[PauliString, float]]:
        for (x, z), c in sorted(self._terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            yield PauliString(self.n, x, z), c

    @property
    def inf_norm(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_z_only(self) -> bool:
        return all(x == 0 for x, _ in self._terms)

    def z_spectrum(self) -> np.ndarray:
        """Dense array over z-masks (Z-only vectors; n <= 24 guard)."""
        if not self.is_z_only():
            raise ValueError("vector has X support")
        if self.n > 24:
            raise ValueError("dense spectrum limited to n <= 24")
        out = np.zeros(1 << self.n)
        for (_, z), c in self._terms.items():
            out[z] = c
        return out

    @classmethod
    def from_z_spectrum(cls, n: int, coeffs: np.ndarray, atol: float = 0.0) -> "CoeffVector":
        """Build a Z-only vector from a dense array indexed by z-mask."""
        if coeffs.shape != (1 << n,):
            raise ValueError(f"expected length {1 << n}, got {coeffs.shape}")
        v = cls(n)
        for z in np.flatnonzero(np.abs(coeffs) > atol):
            v._terms[(0, int(z))] = float(coeffs[z])
        return v

    def to_json(self) -> str:
        terms = [
            {"coeff": c, "x_mask": x, "z_mask": z}
            for (x, z), c in sorted(self._terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ]
        return json.dumps({"n": self.n, "terms": terms}, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "CoeffVector":
        data = json.loads(s)
        v = cls(int(data["n"]))
        for t in data["terms"]:
            v[PauliString(v.n, int(t["x_mask"]), int(t["z_mask"]))] = float(t["coeff"])
        return v

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CoeffVector)
            and other.n == self.n
            and other._terms == self._terms
        )


@dataclass
class DiagonalHamiltonian:
    """A diagonal Hamiltonian g on n qubits, stored as its 2^n diagonal."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} diagonal entries")

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())


def build_diagonal(coeffs: CoeffVector) -> DiagonalHamiltonian:
    """Evaluate g(x) = sum_S alpha_S chi_S(x) from Z-only coefficients.

    Uses the Walsh-Hadamard butterfly; the character convention is
    chi_S(x_b) = (-1)^popcount(b & mask_S).
    """
    g = coeffs.z_spectrum()
    fwht_inplace(g)
    return DiagonalHamiltonian(coeffs.n, g)


def apply_y_flip(index: int, n: int, subset_or_mask) -> int:
    """Index of x · y_T: flip the sign coordinates listed in T."""
    mask = subset_or_mask if isinstance(subset_or_mask, int) else subset_mask(n, subset_or_mask)
    if not 0 <= index < (1 << n):
        raise ValueError("basis index out of range")
    return index ^ mask


def chi_values(n: int, mask: int) -> np.ndarray:
    """chi_S over all 2^n sign vectors, as a +-1 array indexed by b."""
    b = np.arange(1 << n, dtype=np.uint64)
    par = np.bitwise_and(b, np.uint64(mask))
    return 1.0 - 2.0 * (popcount_u64(par) & 1)


def popcount_u64(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)
