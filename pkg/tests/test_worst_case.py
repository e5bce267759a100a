"""Spiked diagonal instances: block structure, distances, dephasing."""

import numpy as np
import pytest

from hamlb.fourier import CertificateError, wht_forward
from hamlb.worst_case import (
    GUARD,
    WorstCaseInstance,
    build_worst_instance,
    default_t_grid,
    dense_opnorm_distance,
    distance_bound,
    exact_block_distance,
    resonance_time,
    sup_block_distance,
    sup_distance_report,
)


@pytest.fixture(scope="module")
def inst10():
    return build_worst_instance(10, 0.1, 1.0, 0)


def test_build_is_deterministic(inst10):
    again = build_worst_instance(10, 0.1, 1.0, 0)
    assert np.array_equal(inst10.g.values, again.g.values)
    assert inst10.certificate.max_coeff == again.certificate.max_coeff


def test_magnitude_is_exact(inst10):
    # |f(x)| = 2^{(1/2 - delta)(n-1)} exactly, for every x
    expect = 2.0 ** (0.4 * 9)
    assert inst10.magnitude == expect
    assert np.all(np.abs(inst10.f.values) == expect)


def test_lift_structure(inst10):
    g = inst10.g.values
    f = inst10.f.values
    # even index (last qubit bit 0 <-> x_n = +1): g = 2f; odd: g = 0
    assert np.array_equal(g[0::2], 2.0 * f)
    assert np.all(g[1::2] == 0.0)
    a, b = inst10.block_diagonals()
    assert np.array_equal(a, 2.0 * f)
    assert np.all(b == 0.0)


def test_spectrum_matches_constant_coefficient(inst10):
    # coefficient of Z_emptyset equals fhat(emptyset) of the sampled f
    fhat = wht_forward(inst10.f)
    assert inst10.spectrum.coeffs[0] == pytest.approx(fhat.coeffs[0], abs=1e-12)
    # lifted sup norm equals the f sup norm exactly
    assert np.abs(inst10.spectrum.coeffs).max() == np.abs(fhat.coeffs).max()


def test_spike_is_x_on_last_qubit(inst10):
    s = inst10.spike
    assert s.x_mask == 1 and s.z_mask == 0


def test_certificate_at_small_delta_records_failure():
    # at delta = 0.1 no draw reaches ||fhat||_inf <= 1; the factory keeps the
    # best draw and the certificate says so
    inst = build_worst_instance(10, 0.1, 1.0, 7)
    assert not inst.certificate.certified
    assert inst.certificate.max_coeff > 1.0
    with pytest.raises(CertificateError):
        build_worst_instance(10, 0.1, 1.0, 7, require_certificate=True)
    # larger delta certifies immediately
    ok = build_worst_instance(10, 0.3, 1.0, 7)
    assert ok.certificate.certified and ok.certificate.max_coeff <= 1.0


def test_validation():
    with pytest.raises(ValueError):
        build_worst_instance(1, 0.1, 1.0, 0)
    inst = build_worst_instance(4, 0.1, 1.0, 0)
    with pytest.raises(ValueError):
        WorstCaseInstance(4, 0.1, -1.0, 0, inst.f, inst.g, inst.spectrum, inst.certificate)


def test_beta_zero_distance_identically_zero():
    inst = build_worst_instance(8, 0.1, 0.0, 0)
    for t in (0.0, 0.5, 7.0, 1e5):
        assert exact_block_distance(inst, t) == 0.0
    assert resonance_time(inst) == float("inf")


def test_distance_bound_values(inst10):
    assert distance_bound(inst10) == 2.0 ** (-4)  # beta=1, n=10, delta=0.1
    inst_b2 = build_worst_instance(10, 0.1, 2.0, 0)
    assert distance_bound(inst_b2) == 2.0 * distance_bound(inst10)


def test_default_t_grid_formula(inst10):
    grid = default_t_grid(inst10, points=5)
    t0 = np.pi / (4.0 * np.abs(inst10.g.values).max())
    assert np.allclose(grid, t0 * 2.0 ** np.arange(5), rtol=1e-15)


def test_block_matches_dense_n8():
    inst = build_worst_instance(8, 0.1, 1.0, 0)
    for t in default_t_grid(inst, points=12):
        blk = exact_block_distance(inst, float(t))
        dense = dense_opnorm_distance(inst, float(t))
        assert abs(blk - dense) <= 1e-9
    with pytest.raises(ValueError):
        dense_opnorm_distance(build_worst_instance(10, 0.1, 1.0, 0), 1.0)


def test_distance_small_t_envelope():
    inst = build_worst_instance(10, 0.1, 2.0, 0)
    for t in np.geomspace(1e-3, 1e5, 30):
        d = exact_block_distance(inst, float(t))
        assert d <= min(inst.beta * t, 2.0) + 1e-9


def test_block_distance_depends_only_on_gap(inst10):
    # every x has the same |f|, so every block contributes the same distance
    from hamlb.dense_linalg import block_pair_diff_opnorm

    a, b = inst10.block_diagonals()
    d = block_pair_diff_opnorm(a, b, inst10.beta, 3.7)
    assert d.max() - d.min() <= 1e-12


def test_resonance_reaches_two(inst10):
    tstar = resonance_time(inst10)
    nu = inst10.magnitude
    om = float(np.hypot(nu, inst10.beta))
    assert tstar == pytest.approx(np.pi / (om - nu), rel=1e-12)
    assert exact_block_distance(inst10, tstar) >= 1.9
    # ... which is far above the claimed envelope at beta=1
    assert exact_block_distance(inst10, tstar) > GUARD * distance_bound(inst10)


def test_pre_dephasing_portion_respects_envelope(inst10):
    rep = sup_distance_report(inst10)
    assert rep["pre_dephasing_sup"] is not None
    assert rep["pre_dephasing_sup"] <= rep["envelope"]
    assert rep["resonance_time"] == resonance_time(inst10)


def test_large_beta_envelope_holds_trivially():
    # beta = 2^{0.2 n} makes the claimed envelope >= 2, the diameter
    inst = build_worst_instance(10, 0.1, 2.0 ** 2, 0)
    rep = sup_distance_report(inst)
    assert rep["envelope"] >= 2.0
    assert rep["satisfied"]


def test_sup_search_refinement():
    inst = build_worst_instance(8, 0.25, 1.0, 3)
    grid = default_t_grid(inst, points=10)
    coarse = sup_block_distance(inst, t_grid=grid, refine=False)
    refined = sup_block_distance(inst, t_grid=grid, refine=True)
    assert refined["sup"] >= coarse["sup"]
    assert coarse["sup"] == float(np.max(coarse["distances"]))
