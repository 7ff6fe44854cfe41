"""Norming constants, Birkhoff coordinates, structural identities, and the
numerical inverse map.

Conventions fixed against central-difference oracles of the full nonlinear
map: the linearization at zero sends xi to (-xi_hat(n)/sqrt(n))_{n>=1}, and
the quadratic Taylor coefficient at zero is
(1/sqrt(n)) sum_{k>=0,k!=n} xi_hat(k) xi_hat(n-k)/(n-k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lax import (GAP_CLAMP, EigenvalueCollisionError, SpectralData,
                  _apply_phase_conditions, _assemble_batch, assemble_lax_matrix,
                  eigendecompose)
from .potentials import PotentialSpectrum
from .validation import check_positive_int


class CorruptedGapsError(RuntimeError):
    """A norming-constant factor was nonpositive; gaps are inconsistent."""


@dataclass(frozen=True)
class BirkhoffCoordinates:
    """zeta_n = <1|f_n>/sqrt(kappa_n) for n = 1..K, with kappa_0..kappa_K.

    actions are |zeta_n|^2 by definition; gaps carry the spectral gaps the
    coordinates were built from, and lambdas the reliable eigenvalues.
    """

    zetas: np.ndarray
    kappas: np.ndarray
    gaps: np.ndarray
    lambdas: np.ndarray
    actions: np.ndarray = field(init=False)

    def __post_init__(self):
        if np.any(self.kappas <= 0.0):
            raise CorruptedGapsError("kappa must be positive")
        object.__setattr__(self, "actions", np.abs(self.zetas) ** 2)

    @property
    def count(self) -> int:
        return self.zetas.size


def _kappa_batch(lam: np.ndarray, gaps: np.ndarray, K: int) -> np.ndarray:
    """Truncated norming products from eigenvalues and clamped gaps.

    kappa_0 = prod_{p<=K} (1 - gap_p/(lam_p - lam_0));
    kappa_n = (1/(lam_n - lam_0)) prod_{p<=K, p!=n} (1 - gap_p/(lam_p - lam_n)).
    """
    lamK = lam[..., :K + 1]
    diff = lamK[..., 1:, None] - lamK[..., None, :]        # lam_p - lam_n
    with np.errstate(divide="ignore", invalid="ignore"):
        fac = 1.0 - gaps[..., :, None] / diff
    p_eq_n = np.arange(1, K + 1)[:, None] == np.arange(K + 1)[None, :]
    fac = np.where(p_eq_n, 1.0, fac)
    if np.any(fac <= 0.0):
        raise CorruptedGapsError(
            "nonpositive norming factor: gaps inconsistent with eigenvalue ordering"
        )
    kap = np.prod(fac, axis=-2)
    out = kap.copy()
    out[..., 1:] = kap[..., 1:] / (lamK[..., 1:] - lamK[..., :1])
    return out


def norming_constants(sd: SpectralData) -> np.ndarray:
    """kappa_0..kappa_K from spectral data (gaps already clamped nonnegative)."""
    return _kappa_batch(sd.lambdas, sd.gaps, sd.reliable_count)


def coordinates_from_spectral(sd: SpectralData) -> BirkhoffCoordinates:
    K = sd.reliable_count
    kap = norming_constants(sd)
    zetas = sd.inner1[1:] / np.sqrt(kap[1:])
    return BirkhoffCoordinates(
        zetas=zetas, kappas=kap, gaps=sd.gaps.copy(), lambdas=sd.lambdas[:K + 1].copy()
    )


def birkhoff_forward(u: PotentialSpectrum, M: int, refine: bool = False) -> BirkhoffCoordinates:
    """Full pipeline: assemble, eigendecompose, fix phases, norming constants."""
    sd = eigendecompose(assemble_lax_matrix(u, M), refine=refine)
    return coordinates_from_spectral(sd)


def _forward_batch(coeff_batch: np.ndarray, M: int):
    """Vectorized forward map for stacks of coefficient rows (no refinement).

    Returns (lam, gaps, kappas, zetas) with leading batch axis.
    """
    A = _assemble_batch(coeff_batch, M)
    lam, V = np.linalg.eigh(A)
    V = _apply_phase_conditions(V)
    K = M // 2
    raw = lam[:, 1:K + 1] - lam[:, :K] - 1.0
    if np.any(raw < -GAP_CLAMP):
        raise EigenvalueCollisionError("negative gap beyond clamp tolerance in batch")
    gaps = np.where(raw < 0.0, 0.0, raw)
    kap = _kappa_batch(lam, gaps, K)
    inner1 = np.conj(V[:, 0, :K + 1])
    zetas = inner1[:, 1:] / np.sqrt(kap[:, 1:])
    return lam, gaps, kap, zetas


@dataclass(frozen=True)
class GeneratingFunctionCheck:
    lhs: complex          # resolvent form <(A+lam)^{-1} e_0|e_0>
    rhs: complex          # truncated product (1/(lam_0+lam)) prod (1 - gap_n/(lam_n+lam))
    rel_gap: float


def generating_function_check(u: PotentialSpectrum, lam: float, M: int) -> GeneratingFunctionCheck:
    """Compare the resolvent quadratic form against its truncated product form."""
    A = assemble_lax_matrix(u, M)
    sd = eigendecompose(A)
    dist = np.abs(sd.lambdas + lam)
    n = int(np.argmin(dist))
    if dist[n] < 1e-8:
        raise ValueError(f"-lam collides with eigenvalue {n}; move lam")
    e0 = np.zeros(M + 1, dtype=complex)
    e0[0] = 1.0
    g = np.linalg.solve(A.entries + lam * np.eye(M + 1), e0)
    lhs = complex(g[0])
    K = sd.reliable_count
    rhs = np.prod(1.0 - sd.gaps / (sd.lambdas[1:K + 1] + lam)) / (sd.lambdas[0] + lam)
    return GeneratingFunctionCheck(lhs=lhs, rhs=complex(rhs),
                                   rel_gap=abs(lhs - rhs) / abs(lhs))


def diagonal_identity_residual(u: PotentialSpectrum, M: int,
                               sd: SpectralData | None = None) -> float:
    """Residual of the diagonal-transform identity in the 1/2 sqrt-log norm.

    Builds v = -Pi u - lambda_0 + 1 as a Hardy vector, expands it in the
    eigenbasis, divides mode n by (lambda_n - lambda_0 + 1), and measures the
    weighted distance to (<1|f_n>)_n over the reliable modes.
    """
    if sd is None:
        sd = eigendecompose(assemble_lax_matrix(u, M))
    K = sd.reliable_count
    v = np.zeros(M + 1, dtype=complex)
    v[0] = -sd.lambdas[0] + 1.0
    ncopy = min(u.n_max, M)
    v[1:ncopy + 1] = -u.coeffs[:ncopy]
    c = sd.eigvecs.conj().T @ v
    d = c / (sd.lambdas - sd.lambdas[0] + 1.0)
    diff = d[:K + 1] - sd.inner1
    n = np.arange(K + 1)
    w = np.maximum(1, n) * np.log(np.maximum(1, n) + 1.0)
    return float(np.sqrt(np.sum(w * np.abs(diff) ** 2)))


def differential_at_zero(xi: PotentialSpectrum) -> np.ndarray:
    """Linearization of the coordinate map at zero: (-xi_hat(n)/sqrt(n))_{n>=1}."""
    n = np.arange(1, xi.n_max + 1, dtype=float)
    return -xi.coeffs / np.sqrt(n)


def second_differential_at_zero(xi: PotentialSpectrum, n_out: int | None = None) -> np.ndarray:
    """Quadratic Taylor coefficient of the coordinate map at zero.

    Component n is (1/sqrt(n)) sum_{k>=0, k!=n} xi_hat(k) xi_hat(n-k)/(n-k),
    with the conjugate-symmetric extension supplying negative arguments.  The
    central-difference oracle (Phi(eps xi) - 2 Phi(0) + Phi(-eps xi))/(2 eps^2)
    singles out this variant; for real-coefficient xi it coincides with the
    conjugate-index form.
    """
    if n_out is None:
        n_out = 2 * xi.n_max
    L = xi.n_max
    full = np.zeros(2 * L + 1, dtype=complex)      # index j+L = xi_hat(j)
    full[L + 1:] = xi.coeffs
    full[:L] = np.conj(xi.coeffs[::-1])
    out = np.zeros(n_out, dtype=complex)
    for n in range(1, n_out + 1):
        k = np.arange(0, L + 1)                     # xi_hat(k) = 0 beyond L
        k = k[k != n]
        d = n - k
        valid = np.abs(d) <= L
        k, d = k[valid], d[valid]
        out[n - 1] = np.sum(full[k + L] * full[d + L] / d) / np.sqrt(n)
    return out


@dataclass
class InverseResult:
    """Outcome of the damped Gauss-Newton inversion."""

    potential: PotentialSpectrum
    residual_norm: float
    converged: bool
    iterations: int
    log: list  # rows (iteration, residual, step_norm)


def _stacked_residual(zetas: np.ndarray, target: np.ndarray) -> np.ndarray:
    d = zetas[: target.size] - target
    return np.concatenate([d.real, d.imag])


def birkhoff_inverse(zeta_target: np.ndarray, n_max: int | None = None,
                     M: int | None = None, x0: np.ndarray | None = None,
                     max_iter: int = 40, tol: float = 1e-10,
                     grad_tol: float = 1e-12, fd_step: float = 1e-6,
                     fd_floor: float = 1e-8, batch_chunk: int = 96) -> InverseResult:
    """Least-squares inversion of the coordinate map by damped Gauss-Newton.

    The Jacobian is assembled by forward differences on the 2*n_max real
    parameters (step fd_step relative to each coordinate, floored at
    fd_floor), evaluated in batched eigendecompositions.  The initial guess
    inverts the linearization, u_hat(n) = -sqrt(n) zeta_n, unless x0 is given.
    """
    z = np.asarray(zeta_target, dtype=complex)
    Kt = z.size
    if n_max is None:
        n_max = Kt
    check_positive_int(n_max, "n_max")
    if M is None:
        M = 2 * max(Kt, n_max)
    if M // 2 < Kt:
        raise ValueError(f"M//2 = {M // 2} must cover the {Kt} target coordinates")

    def fwd_many(X):
        out = np.empty((X.shape[0], M // 2), dtype=complex)
        for s in range(0, X.shape[0], batch_chunk):
            block = X[s:s + batch_chunk]
            out[s:s + block.shape[0]] = _forward_batch(
                block[:, :n_max] + 1j * block[:, n_max:], M)[3]
        return out

    def fwd(x):
        return fwd_many(x[None, :])[0]

    if x0 is None:
        n = np.arange(1, n_max + 1, dtype=float)
        guess = np.zeros(n_max, dtype=complex)
        m = min(n_max, Kt)
        guess[:m] = -np.sqrt(n[:m]) * z[:m]
        x = np.concatenate([guess.real, guess.imag])
    else:
        x = np.asarray(x0, dtype=float).copy()
        if x.size != 2 * n_max:
            raise ValueError("x0 must have 2*n_max entries")

    P = 2 * n_max
    r = _stacked_residual(fwd(x), z)
    rn = float(np.linalg.norm(r))
    best_x, best_rn = x.copy(), rn
    log = [(0, rn, 0.0)]
    converged = rn < tol
    it = 0
    while not converged and it < max_iter:
        h = np.maximum(fd_step * np.abs(x), fd_floor)
        X = np.tile(x, (P, 1))
        X[np.arange(P), np.arange(P)] += h
        cols = (fwd_many(X) - fwd(x)[None, :]) / h[:, None]
        J = np.concatenate([cols.real.T, cols.imag.T], axis=0)
        grad = J.T @ r
        if np.linalg.norm(grad) < grad_tol:
            converged = True
            break
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        alpha = 1.0
        accepted = False
        for _ in range(8):
            x_try = x + alpha * step
            try:
                r_try = _stacked_residual(fwd(x_try), z)
            except (EigenvalueCollisionError, CorruptedGapsError):
                alpha *= 0.5
                continue
            rn_try = float(np.linalg.norm(r_try))
            if rn_try < rn:
                x, r, rn = x_try, r_try, rn_try
                accepted = True
                break
            alpha *= 0.5
        it += 1
        log.append((it, rn, float(alpha * np.linalg.norm(step)) if accepted else 0.0))
        if rn < best_rn:
            best_x, best_rn = x.copy(), rn
        if rn < tol:
            converged = True
        elif not accepted:
            # Residual floor reached (for instance a target outside the range
            # of the truncated parameterization); stop on the gradient test.
            converged = bool(np.linalg.norm(J.T @ r) < grad_tol)
            break
    u = PotentialSpectrum(best_x[:n_max] + 1j * best_x[n_max:])
    return InverseResult(potential=u, residual_norm=best_rn, converged=converged,
                         iterations=it, log=log)
