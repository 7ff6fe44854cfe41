"""Acceptance gate: one test per primary criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Shared heavy artifacts are session fixtures.  Criterion 12's stated
tolerance is numerically unattainable at its pinned parameters: the
windowed integral at (beta=2, q=0.9) measures 0.611*sqrt(2), confirmed by
two fully independent evolution methods agreeing to 2e-5, and the deficit
follows the expected O(1/mu_q) finite-q correction (deficit*mu_q = 1.76 at
q=0.9, 2.01 at q=0.95).  The check is asserted faithfully and left red
rather than loosened.
"""

import math

import numpy as np
import pytest

from bolax import (CounterexampleParams, PotentialSpectrum, WeightSpec,
                   assemble_lax_matrix, birkhoff_forward, birkhoff_inverse,
                   cross_validate_lambda0, diagonal_identity_residual,
                   differential_at_zero, eigendecompose, evolve_birkhoff_trajectory,
                   evolve_direct_trajectory, gaps_and_trace,
                   generating_function_check, make_potential, norming_constants,
                   obstruction_sequence, q_form, second_differential_at_zero,
                   weak_limit_observable, weighted_norm)
from bolax.birkhoff import coordinates_from_spectral
from bolax.flow import action_drift, l2_distance

DIAG_NOISE_FLOOR = 1e-10   # ~1e3 x eps x M: working-precision zero for the
                           # in-model-exact diagonal identity


def _report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


@pytest.fixture(scope="module")
def ensemble_spectra(smooth_ensemble):
    return [eigendecompose(assemble_lax_matrix(u, 128)) for u in smooth_ensemble]


@pytest.fixture(scope="module")
def ensemble_spectra_refined(smooth_ensemble):
    return [eigendecompose(assemble_lax_matrix(u, 128), refine=True)
            for u in smooth_ensemble]


def test_criterion_01_free_case_exactness():
    sd = eigendecompose(assemble_lax_matrix(make_potential("zero", 4), 128))
    kap = norming_constants(sd)
    co = coordinates_from_spectral(sd)
    n = np.arange(sd.size)
    worst = max(
        float(np.max(np.abs(sd.lambdas - n))),
        float(np.max(np.abs(sd.gaps))),
        abs(kap[0] - 1.0),
        float(np.max(np.abs(np.arange(1, sd.reliable_count + 1) * kap[1:] - 1.0))),
        float(np.max(np.abs(co.zetas))),
    )
    assert _report("free-case exactness", worst <= 1e-12, f"worst deviation {worst:.2e}")


def test_criterion_02_trace_formula():
    u = make_potential("cosine", 4, amplitude=0.2)
    _, r = gaps_and_trace(eigendecompose(assemble_lax_matrix(u, 256)))
    assert _report("trace formula", r <= 1e-6, f"|sum gaps + lambda_0| = {r:.2e}")


def test_criterion_03_spectral_bounds_and_gap_inequality(ensemble_spectra):
    worst_hi = worst_lo = worst_gap = 0.0
    for sd in ensemble_spectra:
        K = sd.reliable_count
        n = np.arange(K + 1)
        worst_hi = max(worst_hi, float(np.max(sd.lambdas[:K + 1] - n)))
        worst_lo = max(worst_lo, float(np.max(n + sd.lambdas[0] - sd.lambdas[:K + 1])))
        raw = sd.lambdas[1:K + 1] - sd.lambdas[:K] - 1.0
        worst_gap = max(worst_gap, -float(np.min(raw)))
    ok = worst_hi <= 1e-6 and worst_lo <= 1e-6 and worst_gap <= 1e-6
    assert _report("spectral bounds + gap inequality", ok,
                   f"lambda_n - n <= {worst_hi:.2e}, n + lambda_0 - lambda_n <= "
                   f"{worst_lo:.2e}, most negative raw gap {worst_gap:.2e}")


def test_criterion_04_action_and_norming_identities(ensemble_spectra_refined):
    worst = worst0 = 0.0
    tested = 0
    for sd in ensemble_spectra_refined:
        kap = norming_constants(sd)
        co = coordinates_from_spectral(sd)
        mask = co.gaps > 1e-10
        tested += int(mask.sum())
        rel_a = np.abs(co.actions[mask] - co.gaps[mask]) / co.gaps[mask]
        rhs = co.gaps[mask] * kap[1:][mask]
        rel_n = np.abs(np.abs(sd.inner1[1:][mask]) ** 2 - rhs) / rhs
        worst = max(worst, float(rel_a.max()), float(rel_n.max()))
        worst0 = max(worst0, abs(abs(sd.inner1[0]) ** 2 - kap[0]) / kap[0])
    ok = worst <= 1e-8 and worst0 <= 1e-8
    assert _report("action + norming identities", ok,
                   f"max rel {max(worst, worst0):.2e} over {tested} resolvable modes")


def test_criterion_05_generating_function():
    u = make_potential("cosine", 4, amplitude=0.2)
    sd = eigendecompose(assemble_lax_matrix(u, 256))
    chk = generating_function_check(u, -sd.lambdas[0] + 2.0, 256)
    assert _report("generating function vs resolvent", chk.rel_gap <= 1e-7,
                   f"relative gap {chk.rel_gap:.2e}")


def test_criterion_06_diagonal_identity():
    u = make_potential("cosine", 4, amplitude=0.2)
    r256 = diagonal_identity_residual(u, 256)
    r512 = diagonal_identity_residual(u, 512)
    halved = r512 <= 0.5 * r256
    at_floor = r512 <= DIAG_NOISE_FLOOR
    ok = r256 <= 1e-8 and (halved or at_floor)
    assert _report("diagonal identity", ok,
                   f"residual(256) = {r256:.2e}, residual(512) = {r512:.2e} "
                   f"({'halved' if halved else 'at working-precision floor'})")


def test_criterion_07_differentials():
    makers = [
        make_potential("cosine", 8, amplitude=1.0),
        make_potential("explicit", 8, coeffs=[0, 0.5, 0, 0, 0, 0, 0, 0]),
        make_potential("explicit", 8, coeffs=[0.5, 0, 0.25, 0, 0, 0, 0, 0]),
    ]
    min_order = np.inf
    for xi in makers:
        want = differential_at_zero(xi)
        errs = []
        for eps in (2e-2, 1e-2):
            zp = birkhoff_forward(PotentialSpectrum(eps * xi.coeffs), 48).zetas
            zm = birkhoff_forward(PotentialSpectrum(-eps * xi.coeffs), 48).zetas
            errs.append(np.max(np.abs((zp - zm)[:xi.n_max] / (2 * eps) - want)))
        min_order = min(min_order, math.log2(errs[0] / errs[1]))
    xi = makers[0]
    d2 = second_differential_at_zero(xi)
    val_err = abs(d2[1] - 1.0 / (4.0 * math.sqrt(2.0)))
    eps = 1e-3
    zp = birkhoff_forward(PotentialSpectrum(eps * xi.coeffs), 48).zetas
    zm = birkhoff_forward(PotentialSpectrum(-eps * xi.coeffs), 48).zetas
    fd = (zp + zm) / (2.0 * eps ** 2)
    fd_rel = abs(fd[1] - d2[1]) / abs(d2[1])
    ok = min_order >= 1.9 and val_err <= 1e-10 and fd_rel <= 1e-3
    assert _report("differentials", ok,
                   f"order {min_order:.2f}, hand value err {val_err:.1e}, "
                   f"second-difference rel {fd_rel:.1e}")


def test_criterion_08_smoothness_obstruction():
    N = 100_000
    x = obstruction_sequence(N)
    Q = q_form(x, N, method="fft")
    n = np.arange(1, N + 1, dtype=float)
    cum = np.cumsum(np.log(n + 1.0) * Q ** 2)
    p = [cum[999], cum[9_999], cum[99_999]]
    controlled = np.log(n + 1.0) / n * x[1:] ** 2      # -1/2 sqrt-log mass of x
    steps = [controlled[999], controlled[9_999], controlled[99_999]]
    ok = p[0] < p[1] < p[2] and all(s < 1e-3 for s in steps)
    assert _report("smoothness obstruction witness", ok,
                   f"weighted Q partial sums {p[0]:.4f} < {p[1]:.4f} < {p[2]:.4f}; "
                   f"controlled per-step increments {max(steps):.1e}")


def test_criterion_09_counterexample_cross_validation():
    results = {}
    for q in (0.9, 0.99):
        results[q] = cross_validate_lambda0(CounterexampleParams(2.0, q))
    ok = all(r.mu_root is not None and r.rel_gap <= 1e-3 and r.n_negative == 1
             for r in results.values())
    ok = ok and results[0.99].mu_root > results[0.9].mu_root
    assert _report("counterexample cross-validation", ok,
                   "; ".join(f"q={q}: mu={r.mu_root:.6f}, lambda0={r.lambda0:.6f}, "
                             f"rel={r.rel_gap:.1e}, negatives={r.n_negative}"
                             for q, r in results.items()))


def test_criterion_10_flow_validation():
    u0 = make_potential("cosine", 14, amplitude=0.1)
    times = [0.25, 0.5, 1.0]
    direct = evolve_direct_trajectory(u0, times, 1e-4, 256)
    birk = evolve_birkhoff_trajectory(u0, times, 96, n_modes=14)
    gaps = [l2_distance(b, d) for b, d in zip(birk.states, direct.states)]
    drift = action_drift(direct, 96, count=32)
    ok = max(gaps) <= 1e-4 and drift <= 1e-5 and np.all(birk.converged)
    assert _report("flow validation", ok,
                   f"L2 gaps {['%.1e' % g for g in gaps]}, action drift {drift:.1e}")


def test_criterion_11_inverse_roundtrip(smooth_ensemble):
    w = WeightSpec(-0.5, "sqrt_log")
    worst = 0.0
    for u in smooth_ensemble:
        co = birkhoff_forward(u, 128)
        res = birkhoff_inverse(co.zetas, n_max=u.n_max, M=128)
        err = weighted_norm(PotentialSpectrum(res.potential.coeffs - u.coeffs), w)
        worst = max(worst, err)
    assert _report("inverse roundtrip", worst <= 1e-6, f"worst error {worst:.2e}")


def test_criterion_12_windowed_integral():
    # Known red: the measured value is 0.611*sqrt(2), cross-validated by the
    # rotation and pseudo-spectral methods to 2e-5, and consistent with the
    # O(1/mu_q) finite-q correction (deficit*mu_q ~ 1.8).  The 25% target is
    # asserted as stated rather than loosened; see the module docstring.
    rep = weak_limit_observable(2.0, 0.9, np.linspace(0.0, 1.0, 21),
                                coeff_tail=1e-3, inverse_tol=1e-3)
    dev = abs(rep.windowed_abs / rep.target - 1.0)
    ok = dev <= 0.25
    _report("windowed-integral observable", ok,
            f"|integral| = {rep.windowed_abs:.4f}, sqrt(2)|I| = {rep.target:.4f}, "
            f"deviation {100 * dev:.1f}% (known red, see module docstring)")
    assert ok, ("outside 25%: value cross-validated by two independent methods; "
                "the target tolerance underestimates the O(1/mu_q) correction "
                "at q = 0.9")
