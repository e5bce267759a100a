"""Boolean tables, Walsh-Fourier transforms, and the certified flat-spectrum sampler.

A function f on {+-1}^n is stored as its value table indexed by basis index b
(see ``pauli_core`` for the bit layout).  The normalized transform

    fhat(S) = 2^-n sum_x f(x) chi_S(x)

shares the subset-bitmask indexing with ``pauli_core`` z-masks, so the
Z-coefficient vector of a diagonal Hamiltonian is literally a copy of the
transform of its diagonal.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .kernels import fwht_inplace

_MAGIC_VALUES = b"HBT1"
_MAGIC_COEFFS = b"HFT1"

MAX_N = 24


@dataclass
class BooleanTable:
    """Values of a real function on all 2^n sign vectors."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must be in 1..{MAX_N}")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values")

    def to_bytes(self) -> bytes:
        return _MAGIC_VALUES + struct.pack("<I", self.n) + self.values.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "BooleanTable":
        return cls(*_unpack_table(blob, _MAGIC_VALUES))


@dataclass
class FourierTable:
    """Walsh-Fourier coefficients indexed by subset bitmask."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must be in 1..{MAX_N}")
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} coefficients")

    @property
    def inf_norm(self) -> float:
        return float(np.abs(self.coeffs).max())

    def to_bytes(self) -> bytes:
        return _MAGIC_COEFFS + struct.pack("<I", self.n) + self.coeffs.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "FourierTable":
        return cls(*_unpack_table(blob, _MAGIC_COEFFS))


def _unpack_table(blob: bytes, magic: bytes) -> tuple[int, np.ndarray]:
    if blob[:4] != magic:
        raise ValueError(f"bad magic {blob[:4]!r}, expected {magic!r}")
    (n,) = struct.unpack("<I", blob[4:8])
    body = np.frombuffer(blob[8:], dtype="<f8")
    if body.size != 1 << n:
        raise ValueError(f"payload holds {body.size} floats, expected {1 << n}")
    return int(n), body.copy()


def wht_forward(table: BooleanTable) -> FourierTable:
    """Normalized transform: fhat(S) = 2^-n sum_x f(x) chi_S(x)."""
    a = table.values.copy()
    fwht_inplace(a)
    a /= 1 << table.n
    return FourierTable(table.n, a)


def wht_inverse(spec: FourierTable) -> BooleanTable:
    """Inverse transform: f(x) = sum_S fhat(S) chi_S(x)."""
    a = spec.coeffs.copy()
    fwht_inplace(a)
    return BooleanTable(spec.n, a)


def parseval_gap(table: BooleanTable, spec: FourierTable) -> float:
    """| mean_x f(x)^2 - sum_S fhat(S)^2 |, zero for matching pairs."""
    return float(abs(np.mean(table.values**2) - np.sum(spec.coeffs**2)))


class CertificateError(RuntimeError):
    """All sampling attempts exceeded the Fourier sup-norm certificate."""


@dataclass
class HardFunctionCertificate:
    """Record of the sup-norm certificate max_S |fhat(S)| <= 1.

    ``attempts`` lists the measured sup-norm of every draw; resamples are
    attempts after the first.  ``certified`` is the outcome for the returned
    table (the final attempt in strict mode, the best attempt otherwise).
    """

    n: int
    delta: float
    magnitude: float
    max_coeff: float
    certified: bool
    attempts: list[float] = field(default_factory=list)

    @property
    def resamples(self) -> int:
        return max(0, len(self.attempts) - 1)


def sample_hard_function(
    n: int,
    delta: float,
    seed: int,
    max_resamples: int = 8,
    on_failure: str = "raise",
) -> tuple[BooleanTable, HardFunctionCertificate]:
    """Sample f with i.i.d. values +-2^((1/2-delta)n) and certify max_S|fhat| <= 1.

    Draws are resampled (up to ``max_resamples`` extra draws, all logged in the
    certificate) while the certificate fails.  ``on_failure`` selects what
    happens when every draw fails: ``"raise"`` raises CertificateError,
    ``"best"`` returns the draw with the smallest sup-norm, uncertified.

    Whether certification is reachable at all depends on (n, delta): the
    per-coefficient scale is 2^(-delta n) and there are 2^n coefficients, so
    the expected sup-norm is about 2^(-delta n) * sqrt(2 ln 2 * n).  That
    crosses 1 only once delta*n is roughly log2(sqrt(2 ln 2 * n)); e.g. at
    delta = 0.25 certification succeeds from n around 6 on virtually every
    draw, while at delta = 0.1 it is hopeless for every n below the hundreds.
    ``certification_profile`` measures this boundary.
    """
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must be in (0, 1/2)")
    if on_failure not in ("raise", "best"):
        raise ValueError("on_failure must be 'raise' or 'best'")
    rng = np.random.default_rng(np.random.SeedSequence([0x48464E, seed]))
    magnitude = 2.0 ** ((0.5 - delta) * n)
    attempts: list[float] = []
    best: tuple[float, np.ndarray] | None = None
    for _ in range(1 + max_resamples):
        signs = rng.integers(0, 2, size=1 << n) * 2 - 1
        values = magnitude * signs
        spec = values.copy()
        fwht_inplace(spec)
        spec /= 1 << n
        sup = float(np.abs(spec).max())
        attempts.append(sup)
        if best is None or sup < best[0]:
            best = (sup, values)
        if sup <= 1.0:
            cert = HardFunctionCertificate(n, delta, magnitude, sup, True, attempts)
            return BooleanTable(n, values), cert
    assert best is not None
    if on_failure == "raise":
        raise CertificateError(
            f"no draw certified max_S|fhat| <= 1 after {1 + max_resamples} attempts "
            f"(n={n}, delta={delta}, best={best[0]:.4f})"
        )
    cert = HardFunctionCertificate(n, delta, magnitude, best[0], False, attempts)
    return BooleanTable(n, best[1]), cert


def certification_profile(
    delta: float, n_values: list[int], seeds: int = 10
) -> dict[int, float]:
    """Fraction of seeds whose first draw certifies, per n.  Documents the
    (n, delta) boundary discussed in ``sample_hard_function``."""
    out = {}
    for n in n_values:
        ok = 0
        for s in range(seeds):
            try:
                _, cert = sample_hard_function(n, delta, seed=s, max_resamples=0)
                ok += cert.certified
            except CertificateError:
                pass
        out[n] = ok / seeds
    return out


def lift_to_spiked(table: BooleanTable) -> BooleanTable:
    """Lift f on n-1 coordinates to g(x) = f(x_1..n-1) (1 + x_n) on n.

    With qubit n in the least significant bit, the table interleaves:
    g[2y] = 2 f[y] (x_n = +1) and g[2y+1] = 0.
    """
    n = table.n + 1
    if n > MAX_N:
        raise ValueError("lift exceeds the table size guard")
    g = np.zeros(1 << n)
    g[0::2] = 2.0 * table.values
    return BooleanTable(n, g)


def lifted_spectrum(spec: FourierTable) -> FourierTable:
    """Transform of the lift: ghat(S) = fhat(S \\ {n}) for every S."""
    n = spec.n + 1
    if n > MAX_N:
        raise ValueError("lift exceeds the table size guard")
    return FourierTable(n, np.repeat(spec.coeffs, 2))
