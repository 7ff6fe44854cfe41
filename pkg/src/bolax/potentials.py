"""Truncated Fourier representations of periodic potentials and Hardy functions.

A real, mean-zero potential is stored by its positive-frequency coefficients
u_hat(1..n_max); negative modes are conjugates, u_hat(0) = 0.  A Hardy
function carries modes 0..n_max only.  Inner products follow
<f|g> = (1/2pi) int f conj(g), so <f|g> = sum_k f_hat(k) conj(g_hat(k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_positive_int, check_finite_array

_LOG_MODES = ("none", "sqrt_log", "inv_sqrt_log")


@dataclass(frozen=True)
class PotentialSpectrum:
    """Coefficients u_hat(1..n_max) of a real mean-zero periodic potential."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        check_finite_array(c, "coeffs")
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a nonempty 1-d sequence")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return self.coeffs.size

    def grid_samples(self, n_points: int) -> np.ndarray:
        """Complex samples of u on a uniform grid (imaginary part is roundoff)."""
        x = 2.0 * np.pi * np.arange(n_points) / n_points
        n = np.arange(1, self.n_max + 1)
        phases = np.exp(1j * np.outer(x, n))
        vals = phases @ self.coeffs
        return vals + np.conj(vals)

    def full_coeff(self, k: int) -> complex:
        """u_hat(k) for any integer k (conjugate symmetry, u_hat(0)=0)."""
        a = abs(k)
        if a == 0 or a > self.n_max:
            return 0.0 + 0.0j
        return complex(self.coeffs[a - 1]) if k > 0 else complex(np.conj(self.coeffs[a - 1]))


@dataclass(frozen=True)
class HardyFunction:
    """Coefficients f_hat(0..n_max); no negative-frequency content."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        check_finite_array(c, "coeffs")
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a nonempty 1-d sequence")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return self.coeffs.size - 1


@dataclass(frozen=True)
class WeightSpec:
    """Sequence-space weight <n>^{2s} log(<n>+1)^{p}, p in {0, +1, -1}."""

    s: float
    log_mode: str = "none"

    def __post_init__(self):
        if self.log_mode not in _LOG_MODES:
            raise ValueError(f"log_mode must be one of {_LOG_MODES}")
        if not math.isfinite(self.s):
            raise ValueError("s must be finite")

    def weights(self, n: np.ndarray) -> np.ndarray:
        jn = np.maximum(1.0, np.abs(n).astype(float))  # <n> := max(1, |n|)
        w = jn ** (2.0 * self.s)
        if self.log_mode == "sqrt_log":
            w = w * np.log(jn + 1.0)
        elif self.log_mode == "inv_sqrt_log":
            w = w / np.log(jn + 1.0)
        return w


def epsilon_of(beta: float, q: float) -> float:
    """Coupling eps = beta/|log(1-q)| of the geometric family; needs 0 < eps < q."""
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must lie in (0,1), got {q}")
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    eps = beta / abs(math.log1p(-q))
    if eps >= q:
        raise ValueError(
            f"family constraint violated: eps = {eps:.6g} >= q = {q}; "
            "decrease beta or increase q"
        )
    return eps


def make_potential(kind: str, n_max: int, **params) -> PotentialSpectrum:
    """Construct a truncated potential from a family descriptor.

    Supported kinds:
      zero
      cosine(amplitude=a)              u = a cos x, u_hat(1) = a/2
      random(seed=s, decay=p, amplitude=a)
                                       |u_hat(n)| = a n^{-p}, uniform phases
      counterexample(beta=b, q=q)      u_hat(n) = eps q^n, eps = beta/|log(1-q)|
      explicit(coeffs=[...])           coefficients given directly
    """
    check_positive_int(n_max, "n_max")
    if kind == "zero":
        return PotentialSpectrum(np.zeros(n_max, dtype=complex))
    if kind == "cosine":
        a = float(params.get("amplitude", 1.0))
        if not math.isfinite(a):
            raise ValueError("amplitude must be finite")
        c = np.zeros(n_max, dtype=complex)
        c[0] = a / 2.0
        return PotentialSpectrum(c)
    if kind == "random":
        seed = int(params.get("seed", 0))
        p = float(params.get("decay", 2.0))
        a = float(params.get("amplitude", 1.0))
        if not (math.isfinite(a) and math.isfinite(p)):
            raise ValueError("amplitude and decay must be finite")
        rng = np.random.default_rng(seed)
        n = np.arange(1, n_max + 1, dtype=float)
        phases = np.exp(2j * np.pi * rng.random(n_max))
        return PotentialSpectrum(a * n ** (-p) * phases)
    if kind == "counterexample":
        beta = float(params["beta"])
        q = float(params["q"])
        eps = epsilon_of(beta, q)
        n = np.arange(1, n_max + 1, dtype=float)
        return PotentialSpectrum(eps * q ** n + 0j)
    if kind == "explicit":
        return PotentialSpectrum(np.asarray(params["coeffs"], dtype=complex))
    raise ValueError(f"unknown potential kind {kind!r}")


def weighted_norm(u, w: WeightSpec) -> float:
    """Weighted sequence norm over all represented modes.

    Potentials count both signs of each mode; Hardy functions count modes
    0..n_max as stored.
    """
    if isinstance(u, PotentialSpectrum):
        n = np.arange(1, u.n_max + 1)
        return float(np.sqrt(2.0 * np.sum(w.weights(n) * np.abs(u.coeffs) ** 2)))
    if isinstance(u, HardyFunction):
        n = np.arange(0, u.n_max + 1)
        return float(np.sqrt(np.sum(w.weights(n) * np.abs(u.coeffs) ** 2)))
    raise TypeError("expected PotentialSpectrum or HardyFunction")


def toeplitz_apply(u: PotentialSpectrum, f: HardyFunction) -> HardyFunction:
    """Project the pointwise product u*f back to the Hardy space.

    (T_u f)_hat(m) = sum_{n=0}^{n_max} u_hat(m-n) f_hat(n) for 0 <= m <= M,
    with u_hat(-k) = conj(u_hat(k)) and u_hat(0) = 0; the result is truncated
    to the smaller of the two input truncations.
    """
    m_out = min(u.n_max, f.n_max)
    nf = f.n_max
    ufull = np.zeros(2 * u.n_max + 1, dtype=complex)  # index d+u.n_max = u_hat(d)
    ufull[u.n_max + 1:] = u.coeffs
    ufull[:u.n_max] = np.conj(u.coeffs[::-1])
    out = np.zeros(m_out + 1, dtype=complex)
    for m in range(m_out + 1):
        d = m - np.arange(nf + 1)  # u_hat(m-n)
        valid = np.abs(d) <= u.n_max
        out[m] = np.sum(ufull[d[valid] + u.n_max] * f.coeffs[:nf + 1][valid])
    return HardyFunction(out)


def hardy_inner(f: HardyFunction, g: HardyFunction) -> complex:
    """<f|g> = sum_k f_hat(k) conj(g_hat(k)) over the common range."""
    k = min(f.n_max, g.n_max) + 1
    return complex(np.sum(f.coeffs[:k] * np.conj(g.coeffs[:k])))


def potential_to_json(u: PotentialSpectrum) -> dict:
    return {
        "n_max": u.n_max,
        "coeffs": [[float(c.real), float(c.imag)] for c in u.coeffs],
    }


def potential_from_json(obj: dict) -> PotentialSpectrum:
    n_max = int(obj["n_max"])
    pairs = obj["coeffs"]
    if len(pairs) != n_max:
        raise ValueError("coeffs length does not match n_max")
    return PotentialSpectrum(np.array([complex(re, im) for re, im in pairs]))
