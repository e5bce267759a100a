"""Bitmask Pauli strings: conventions, products, serialization, diagonals."""

import json

import numpy as np
import pytest

from hamlb.pauli_core import (
    CoeffVector,
    PauliString,
    apply_y_flip,
    build_diagonal,
    chi_values,
    mask_subset,
    pauli_matrix,
    pauli_product,
    subset_mask,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


def test_subset_mask_msb_convention():
    # qubit 1 owns the most significant bit
    assert subset_mask(3, (1,)) == 0b100
    assert subset_mask(3, (3,)) == 0b001
    assert subset_mask(4, (1, 4)) == 0b1001
    assert mask_subset(4, 0b1001) == (1, 4)
    with pytest.raises(ValueError):
        subset_mask(3, (0,))
    with pytest.raises(ValueError):
        subset_mask(3, (2, 2))


def test_pauli_matrix_is_kron_in_qubit_order():
    p = PauliString(2, x_mask=0b01, z_mask=0b10)  # Z on qubit 1, X on qubit 2
    assert p.label() == "ZX"
    assert np.array_equal(pauli_matrix(p), np.kron(Z, X))


def test_y_convention_hermitian():
    p = PauliString(1, 1, 1)
    assert p.label() == "Y"
    assert np.array_equal(pauli_matrix(p), Y)
    for n in range(1, 4):
        rng = np.random.default_rng(n)
        x = int(rng.integers(1 << n))
        z = int(rng.integers(1 << n))
        M = pauli_matrix(PauliString(n, x, z))
        assert np.allclose(M, M.conj().T), "every string must be Hermitian"
        assert np.allclose(M @ M, np.eye(1 << n)), "and involutory"


def test_pauli_product_phase_exhaustive_n2():
    for x1 in range(4):
        for z1 in range(4):
            for x2 in range(4):
                for z2 in range(4):
                    p, q = PauliString(2, x1, z1), PauliString(2, x2, z2)
                    r, k = pauli_product(p, q)
                    lhs = pauli_matrix(p) @ pauli_matrix(q)
                    rhs = (1j) ** k * pauli_matrix(r)
                    assert np.allclose(lhs, rhs, atol=1e-12), (p.label(), q.label())


def test_xz_product_is_minus_iy():
    r, k = pauli_product(PauliString(1, 1, 0), PauliString(1, 0, 1))
    assert r.label() == "Y"
    assert k == 3  # X Z = -i Y


def test_locality_counts_union():
    p = PauliString(5, x_mask=0b10010, z_mask=0b00011)
    assert p.locality == 3
    assert PauliString(5).locality == 0


def test_coeff_vector_json_roundtrip_byte_exact():
    v = CoeffVector(4)
    v[PauliString.z_string(4, (1, 3))] = -0.25
    v[PauliString.z_string(4, (2,))] = 1.5
    v[PauliString(4, x_mask=0b0001)] = 0.125
    s = v.to_json()
    w = CoeffVector.from_json(s)
    assert w == v
    assert w.to_json() == s
    # sanity on the wire format
    data = json.loads(s)
    assert set(data) == {"n", "terms"}
    assert all(set(t) == {"coeff", "x_mask", "z_mask"} for t in data["terms"])


def test_z_spectrum_roundtrip():
    rng = np.random.default_rng(2)
    coeffs = rng.normal(size=1 << 4)
    v = CoeffVector.from_z_spectrum(4, coeffs)
    assert np.array_equal(v.z_spectrum(), coeffs)
    assert v.is_z_only()
    v[PauliString(4, x_mask=1)] = 1.0
    with pytest.raises(ValueError):
        v.z_spectrum()


def test_build_diagonal_matches_dense_sum():
    n = 5
    rng = np.random.default_rng(7)
    v = CoeffVector.from_z_spectrum(n, rng.normal(size=1 << n))
    H = sum(c * pauli_matrix(p) for p, c in v.items())
    g = build_diagonal(v)
    assert np.allclose(np.diag(H).real, g.values, atol=1e-10)
    assert np.abs(H - np.diag(np.diag(H))).max() < 1e-12


def test_chi_values_and_flip():
    n = 4
    mask = subset_mask(n, (2, 4))
    chi = chi_values(n, mask)
    # chi_S(x . y_T) = chi_S(x) * (-1)^{|S & T|}
    tmask = subset_mask(n, (2,))
    flipped = np.array([chi[apply_y_flip(b, n, tmask)] for b in range(1 << n)])
    assert np.array_equal(flipped, -chi)
    assert chi[0] == 1.0  # all-(+1) point


def test_build_diagonal_flip_identity():
    # g(x) - g(x.y_T) = 2 sum_{|S&T| odd} alpha_S chi_S(x): check via matrices
    n = 4
    rng = np.random.default_rng(12)
    v = CoeffVector.from_z_spectrum(n, rng.normal(size=1 << n))
    g = build_diagonal(v).values
    tmask = subset_mask(n, (1, 3))
    idx = np.arange(1 << n)
    lhs = g - g[idx ^ tmask]
    rhs = np.zeros(1 << n)
    for p, c in v.items():
        if bin(p.z_mask & tmask).count("1") % 2 == 1:
            rhs += 2.0 * c * chi_values(n, p.z_mask)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_pauli_matrix_guard():
    with pytest.raises(ValueError):
        pauli_matrix(PauliString(13))
