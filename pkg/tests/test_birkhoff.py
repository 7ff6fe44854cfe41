import math

import numpy as np
import pytest

from bolax import (PotentialSpectrum, WeightSpec, assemble_lax_matrix, birkhoff_forward,
                   birkhoff_inverse, diagonal_identity_residual, differential_at_zero,
                   eigendecompose, generating_function_check, make_potential,
                   norming_constants, second_differential_at_zero, weighted_norm)
from bolax.birkhoff import CorruptedGapsError, coordinates_from_spectral

INV_4_SQRT2 = 0.17677669529663687


def test_kappa_free_case():
    sd = eigendecompose(assemble_lax_matrix(make_potential("zero", 4), 128))
    kap = norming_constants(sd)
    assert kap[0] == pytest.approx(1.0, abs=1e-12)
    n = np.arange(1, sd.reliable_count + 1)
    assert np.max(np.abs(n * kap[1:] - 1.0)) < 1e-12


def test_kappa_window_bounded():
    u = make_potential("cosine", 4, amplitude=0.2)
    sd = eigendecompose(assemble_lax_matrix(u, 256))
    kap = norming_constants(sd)
    n = np.arange(1, sd.reliable_count + 1)
    prod = n * kap[1:]
    assert np.all(prod > 0.0)
    assert np.all(np.isfinite(prod))
    assert prod.max() / prod.min() < 10.0  # window stays tight for small data


def test_norming_identity_refined(smooth_ensemble):
    # |<1|f_n>|^2 = gamma_n kappa_n and |<1|f_0>|^2 = kappa_0
    for u in smooth_ensemble[:3]:
        sd = eigendecompose(assemble_lax_matrix(u, 128), refine=True)
        kap = norming_constants(sd)
        assert abs(abs(sd.inner1[0]) ** 2 - kap[0]) <= 1e-10 * kap[0]
        mask = sd.gaps > 1e-10
        lhs = np.abs(sd.inner1[1:]) ** 2
        rhs = sd.gaps * kap[1:]
        rel = np.abs(lhs[mask] - rhs[mask]) / rhs[mask]
        assert rel.max() <= 1e-8


def test_forward_zero():
    co = birkhoff_forward(make_potential("zero", 4), 64)
    assert np.all(co.zetas == 0.0)
    assert np.all(co.actions == 0.0)


def test_forward_small_cosine_linearization():
    eps = 1e-3
    co = birkhoff_forward(make_potential("cosine", 4, amplitude=eps), 64)
    assert abs(co.zetas[0] + eps / 2.0) <= 1e-5


def test_action_identity_refined(smooth_ensemble):
    for u in smooth_ensemble[:3]:
        sd = eigendecompose(assemble_lax_matrix(u, 128), refine=True)
        co = coordinates_from_spectral(sd)
        mask = co.gaps > 1e-10
        rel = np.abs(co.actions[mask] - co.gaps[mask]) / co.gaps[mask]
        assert rel.max() <= 1e-8


def test_generating_function_free():
    chk = generating_function_check(make_potential("zero", 2), 1.0, 32)
    assert chk.lhs == pytest.approx(1.0, abs=1e-13)
    assert chk.rhs == pytest.approx(1.0, abs=1e-13)


def test_generating_function_cosine():
    u = make_potential("cosine", 4, amplitude=0.2)
    sd = eigendecompose(assemble_lax_matrix(u, 256))
    chk = generating_function_check(u, -sd.lambdas[0] + 2.0, 256)
    assert chk.rel_gap <= 1e-7


def test_generating_function_gap_shrinks_with_M_rough_potential():
    # algebraic coefficient decay keeps the dropped product tail above the
    # noise floor, so refinement visibly tightens the match
    u = make_potential("random", 96, seed=13, decay=1.2, amplitude=0.3)
    gaps = []
    for M in (64, 128, 256):
        sd = eigendecompose(assemble_lax_matrix(u, M))
        gaps.append(generating_function_check(u, -sd.lambdas[0] + 2.0, M).rel_gap)
    assert gaps[2] < gaps[1] < gaps[0]


def test_diagonal_identity_free():
    assert diagonal_identity_residual(make_potential("zero", 2), 32) < 1e-13


def test_diagonal_identity_cosine():
    u = make_potential("cosine", 4, amplitude=0.2)
    assert diagonal_identity_residual(u, 256) <= 1e-8


def test_differential_zero_input():
    xi = make_potential("zero", 6)
    assert np.all(differential_at_zero(xi) == 0.0)


def test_differential_cosine():
    xi = make_potential("cosine", 6, amplitude=1.0)
    d = differential_at_zero(xi)
    assert d[0] == pytest.approx(-0.5, abs=1e-15)
    assert np.max(np.abs(d[1:])) == 0.0


@pytest.mark.parametrize("maker", [
    lambda: make_potential("cosine", 8, amplitude=1.0),
    lambda: make_potential("explicit", 8, coeffs=[0, 0.5, 0, 0, 0, 0, 0, 0]),  # cos 2x
    lambda: make_potential("explicit", 8, coeffs=[0.5, 0, 0.25, 0, 0, 0, 0, 0]),
])
def test_differential_matches_central_differences(maker):
    xi = maker()
    want = differential_at_zero(xi)
    errs = []
    for eps in (2e-2, 1e-2):
        zp = birkhoff_forward(PotentialSpectrum(eps * xi.coeffs), 48).zetas
        zm = birkhoff_forward(PotentialSpectrum(-eps * xi.coeffs), 48).zetas
        fd = (zp - zm) / (2.0 * eps)
        errs.append(np.max(np.abs(fd[:xi.n_max] - want)))
    order = math.log2(errs[0] / errs[1])
    assert order >= 1.9


def test_second_differential_zero():
    assert np.all(second_differential_at_zero(make_potential("zero", 4)) == 0.0)


def test_second_differential_cosine_hand_value():
    d2 = second_differential_at_zero(make_potential("cosine", 4, amplitude=1.0))
    assert abs(d2[1] - INV_4_SQRT2) < 1e-10
    others = np.delete(d2, 1)
    assert np.max(np.abs(others)) < 1e-15


def test_second_differential_matches_central_differences():
    # quadratic Taylor coefficient estimator: (P(e) - 2 P(0) + P(-e)) / (2 e^2)
    xi = make_potential("cosine", 4, amplitude=1.0)
    d2 = second_differential_at_zero(xi)
    eps = 1e-3
    zp = birkhoff_forward(PotentialSpectrum(eps * xi.coeffs), 48).zetas
    zm = birkhoff_forward(PotentialSpectrum(-eps * xi.coeffs), 48).zetas
    fd = (zp + zm) / (2.0 * eps ** 2)
    assert abs(fd[1] - d2[1]) / abs(d2[1]) <= 1e-3


def test_second_differential_convention_with_complex_phases():
    # the conjugation convention is pinned by the finite-difference oracle:
    # with complex coefficient phases only the positive-mode product form
    # xi_hat(k) xi_hat(n-k) matches; its conjugate-index mirror does not
    rng = np.random.default_rng(7)
    xi = PotentialSpectrum((rng.standard_normal(4) + 1j * rng.standard_normal(4))
                           * np.array([1.0, 0.7, 0.4, 0.2]))
    d2 = second_differential_at_zero(xi, n_out=8)
    eps = 1e-3
    zp = birkhoff_forward(PotentialSpectrum(eps * xi.coeffs), 48).zetas
    zm = birkhoff_forward(PotentialSpectrum(-eps * xi.coeffs), 48).zetas
    fd = (zp + zm)[:8] / (2.0 * eps ** 2)
    rel_ours = np.max(np.abs(fd - d2)) / np.max(np.abs(d2))
    rel_conj = np.max(np.abs(fd - np.conj(d2))) / np.max(np.abs(d2))
    assert rel_ours < 1e-3
    assert rel_conj > 1e-1


def test_inverse_zero_target():
    res = birkhoff_inverse(np.zeros(8, dtype=complex), n_max=4, M=16)
    assert res.converged
    assert res.iterations <= 1
    assert np.all(res.potential.coeffs == 0.0)


def test_inverse_roundtrip_cosine():
    u = make_potential("cosine", 4, amplitude=0.1)
    co = birkhoff_forward(u, 64)
    res = birkhoff_inverse(co.zetas, n_max=4, M=64)
    assert res.converged
    assert abs(res.potential.coeffs[0] - 0.05) <= 1e-6


def test_inverse_single_coordinate_matches_linearization():
    target = np.zeros(8, dtype=complex)
    target[0] = 1e-3
    res = birkhoff_inverse(target, n_max=8, M=16)
    assert res.converged
    assert abs(res.potential.coeffs[0] - (-1e-3)) <= 1e-5


def test_inverse_roundtrip_ensemble(smooth_ensemble):
    w = WeightSpec(-0.5, "sqrt_log")
    for u in smooth_ensemble[:4]:
        co = birkhoff_forward(u, 128)
        res = birkhoff_inverse(co.zetas, n_max=u.n_max, M=128)
        diff = PotentialSpectrum(res.potential.coeffs - u.coeffs)
        assert weighted_norm(diff, w) <= 1e-6


def test_inverse_log_schema():
    u = make_potential("cosine", 4, amplitude=0.1)
    co = birkhoff_forward(u, 64)
    res = birkhoff_inverse(co.zetas, n_max=4, M=64)
    assert all(len(row) == 3 for row in res.log)
    assert res.log[0][0] == 0


def test_gauge_invariance_of_actions(smooth_ensemble):
    u = smooth_ensemble[5]
    theta = 0.7
    n = np.arange(1, u.n_max + 1)
    shifted = PotentialSpectrum(u.coeffs * np.exp(1j * n * theta))
    a0 = birkhoff_forward(u, 128).actions
    a1 = birkhoff_forward(shifted, 128).actions
    big = a0 > 1e-12
    assert np.max(np.abs(a0[big] - a1[big]) / a0[big]) < 1e-7


def test_corrupted_gaps_raise():
    sd = eigendecompose(assemble_lax_matrix(make_potential("cosine", 2, amplitude=0.2), 32))
    broken = type(sd)(lambdas=sd.lambdas, eigvecs=sd.eigvecs,
                      gaps=sd.gaps + 10.0, inner1=sd.inner1,
                      reliable_count=sd.reliable_count)
    with pytest.raises(CorruptedGapsError):
        norming_constants(broken)
