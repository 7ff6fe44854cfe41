"""Truncated Lax operator: assembly, spectrum, phase-normalized eigenbasis.

The operator D - T_u acts on Hardy modes 0..M as the Hermitian matrix
A[m,n] = m delta_{mn} - u_hat(m-n).  Its eigenvalues are simple with spacing
close to 1; the upper half of a truncated spectrum is contaminated, so only
modes up to reliable_count = M//2 are trusted downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .potentials import PotentialSpectrum
from .validation import check_positive_int

GAP_CLAMP = 1e-8          # gaps in (-GAP_CLAMP, 0) are truncation noise, clamped to 0
COLLISION_TOL = 1e-10     # eigenvalue spacing below this signals a failed truncation
PHASE_FLOOR = 1e-13       # smallest usable phase-fixing inner product


class DegeneratePhaseError(RuntimeError):
    """Phase-fixing inner product fell below the floor (truncation artifact)."""


class EigenvalueCollisionError(RuntimeError):
    """Consecutive eigenvalues collided; the continuum spectrum is simple."""


@dataclass(frozen=True)
class LaxMatrix:
    """Hermitian truncation of D - T_u on modes 0..M."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("entries must be square")
        if not np.all(np.isfinite(a.view(float))):
            raise ValueError("entries contain non-finite values")
        object.__setattr__(self, "entries", a)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


@dataclass(frozen=True)
class SpectralData:
    """Ordered simple spectrum with phase-normalized eigenbasis.

    gaps[n-1] = lambda_n - lambda_{n-1} - 1 (clamped nonnegative) and
    inner1[n] = <1|f_n>, both for n up to reliable_count.  When lambdas_lo
    is present the eigenpairs were refined and lambdas + lambdas_lo carries
    the eigenvalues in double-double precision.
    """

    lambdas: np.ndarray
    eigvecs: np.ndarray
    gaps: np.ndarray
    inner1: np.ndarray
    reliable_count: int
    lambdas_lo: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.lambdas.size

    @property
    def refined(self) -> bool:
        return self.lambdas_lo is not None


def assemble_lax_matrix(u: PotentialSpectrum, M: int) -> LaxMatrix:
    """A[m,n] = m delta_{mn} - u_hat(m-n); coefficients past u.n_max are zero."""
    check_positive_int(M, "M")
    return LaxMatrix(_assemble_batch(u.coeffs[None, :], M)[0])


def _assemble_batch(coeff_batch: np.ndarray, M: int) -> np.ndarray:
    B, n_max = coeff_batch.shape
    A = np.zeros((B, M + 1, M + 1), dtype=complex)
    i = np.arange(M + 1)
    A[:, i, i] = i
    for d in range(1, min(n_max, M) + 1):
        idx = np.arange(d, M + 1)
        A[:, idx, idx - d] -= coeff_batch[:, d - 1][:, None]
        A[:, idx - d, idx] -= np.conj(coeff_batch[:, d - 1])[:, None]
    return A


def _apply_phase_conditions(V: np.ndarray) -> np.ndarray:
    """Rotate eigencolumns so <f_0|1> > 0 and <f_n|S f_{n-1}> > 0.

    The recursion phi_n = phi_{n-1} |r_n|/r_n collapses to one cumulative
    product over the raw inner products r_n = <f_n^raw | S f_{n-1}^raw>.
    """
    r0 = V[..., 0, 0]
    r = np.einsum("...kn,...kn->...n", V[..., 1:, 1:], np.conj(V[..., :-1, :-1]))
    rs = np.concatenate([r0[..., None], r], axis=-1)
    if np.any(np.abs(rs) < PHASE_FLOOR):
        bad = int(np.argmax(np.abs(rs) < PHASE_FLOOR))
        raise DegeneratePhaseError(
            f"phase normalization degenerate at mode {bad}: "
            f"|inner product| < {PHASE_FLOOR:g}"
        )
    phi = np.cumprod(np.abs(rs) / rs, axis=-1)
    return V * phi[..., None, :]


def normalize_phases(sd: SpectralData) -> SpectralData:
    """Re-apply the phase conditions; idempotent on normalized data."""
    V = _apply_phase_conditions(sd.eigvecs.copy())
    K = sd.reliable_count
    return replace(sd, eigvecs=V, inner1=np.conj(V[0, :K + 1]))


def _gaps_from(lam_hi: np.ndarray, lam_lo: np.ndarray | None, K: int) -> np.ndarray:
    if lam_lo is None:
        raw = lam_hi[1:K + 1] - lam_hi[:K] - 1.0
    else:
        a, b = lam_hi[1:K + 1], -lam_hi[:K]
        s = a + b
        bb = s - a
        e = (a - (s - bb)) + (b - bb)            # branch-free two_sum error term
        raw = (s - 1.0) + (e + lam_lo[1:K + 1] - lam_lo[:K])
    if np.any(raw < -GAP_CLAMP):
        n = int(np.argmin(raw)) + 1
        raise EigenvalueCollisionError(
            f"gap {n} is {raw[n - 1]:.3e} < -{GAP_CLAMP:g}; increase the truncation"
        )
    return np.where(raw < 0.0, 0.0, raw)


def eigendecompose(A: LaxMatrix, refine: bool = False) -> SpectralData:
    """Full spectral data of the truncated operator.

    refine=True polishes the reliable eigenpairs to double-double accuracy
    (compensated residuals + bordered Newton corrections), which is needed
    when gap-sized quantities below ~1e-6 must be resolved.
    """
    defect = A.hermiticity_defect()
    if defect > 1e-12 * max(1.0, A.size):
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    lam, V = np.linalg.eigh(A.entries)
    if np.any(np.diff(lam) < COLLISION_TOL):
        n = int(np.argmin(np.diff(lam)))
        raise EigenvalueCollisionError(
            f"eigenvalues {n} and {n + 1} within {COLLISION_TOL:g}; "
            "the spectrum is simple, increase the truncation"
        )
    V = _apply_phase_conditions(V)
    M = A.size - 1
    K = M // 2
    lam_lo = None
    if refine:
        from .refine import refine_eigenpairs
        lam_hi, lam_lo_part, Vr = refine_eigenpairs(A.entries, lam, V, modes=K + 1)
        lam = lam.copy()
        lam[:K + 1] = lam_hi
        lam_lo = np.zeros_like(lam)
        lam_lo[:K + 1] = lam_lo_part
        V = V.copy()
        V[:, :K + 1] = Vr
        V = _apply_phase_conditions(V)
    gaps = _gaps_from(lam, lam_lo, K)
    return SpectralData(
        lambdas=lam,
        eigvecs=V,
        gaps=gaps,
        inner1=np.conj(V[0, :K + 1]),
        reliable_count=K,
        lambdas_lo=lam_lo,
    )


def gaps_and_trace(sd: SpectralData):
    """Gaps up to reliable_count and the trace residual |sum gaps + lambda_0|."""
    r = abs(float(np.sum(sd.gaps) + sd.lambdas[0]))
    return sd.gaps, r


def resolvent_form(u: PotentialSpectrum, lam: float, M: int) -> complex:
    """<(A + lam)^{-1} e_0 | e_0>, the truncated generating function at lam."""
    A = assemble_lax_matrix(u, M)
    spec = np.linalg.eigvalsh(A.entries)
    dist = np.abs(spec + lam)
    n = int(np.argmin(dist))
    if dist[n] < 1e-8:
        raise ValueError(
            f"-lam collides with eigenvalue {n} (lambda_{n} = {spec[n]:.12g}); "
            "resolvent is near-singular"
        )
    e0 = np.zeros(M + 1, dtype=complex)
    e0[0] = 1.0
    g = np.linalg.solve(A.entries + lam * np.eye(M + 1), e0)
    return complex(g[0])
