"""The geometric potential family with an escaping eigenvalue.

u_{0,q} has coefficients eps q^n with eps = beta/|log(1-q)|.  A number
-mu < 0 is an eigenvalue of the associated operator exactly when
F(mu, q) = F_+ - F_- vanishes, where F_+- are singular integrals over (0, q).
After the substitution t = q s both endpoint singularities become fixed
Jacobi weights on (0, 1):

  F_+ = mu q^mu    int_0^1 s^{eps+mu-1} (1 - q^2 s)^eps     (1-s)^{-eps} ds
  F_- = eps q^{mu+2} int_0^1 s^{eps+mu}   (1 - q^2 s)^{eps-1} (1-s)^{-eps} ds

so Gauss-Jacobi quadrature integrates the endpoint factors exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh
from scipy.special import betaln

from .lax import assemble_lax_matrix
from .potentials import WeightSpec, epsilon_of, make_potential, weighted_norm


class QuadratureError(RuntimeError):
    """Gauss-Jacobi values failed to stabilize under order doubling."""


@dataclass(frozen=True)
class CounterexampleParams:
    beta: float
    q: float
    eps: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eps", epsilon_of(self.beta, self.q))


def _jacobi01(order: int, a: float, b: float):
    """Nodes/weights for int_0^1 (1-s)^a s^b f(s) ds via Golub-Welsch.

    The symmetric-tridiagonal eigenvalue route keeps node errors at the
    backward-stable ~1e-15 level at any order (library Jacobi nodes lose
    several digits by order a few hundred for exponents near -1, which is
    exactly the regime the endpoint weight lives in here).
    """
    k = np.arange(order, dtype=float)
    tot = 2.0 * k + a + b
    diag = np.empty(order)
    diag[0] = (b - a) / (a + b + 2.0)
    kk = k[1:]
    diag[1:] = (b * b - a * a) / ((tot[1:]) * (tot[1:] + 2.0))
    j = kk
    off_sq = (4.0 * j * (j + a) * (j + b) * (j + a + b)
              / (tot[1:] ** 2 * (tot[1:] + 1.0) * (tot[1:] - 1.0)))
    x, V = eigh_tridiagonal(diag, np.sqrt(off_sq))
    mu0 = math.exp((a + b + 1.0) * math.log(2.0) + betaln(a + 1.0, b + 1.0))
    w = mu0 * V[0, :] ** 2
    return (1.0 + x) / 2.0, w * 2.0 ** (-(a + b + 1.0))


def _f_parts_at(mu: float, eps: float, q: float, order: int):
    s, w = _jacobi01(order, -eps, eps + mu - 1.0)
    fp = mu * q ** mu * float(np.sum(w * (1.0 - q * q * s) ** eps))
    s2, w2 = _jacobi01(order, -eps, eps + mu)
    fm = eps * q ** (mu + 2.0) * float(np.sum(w2 * (1.0 - q * q * s2) ** (eps - 1.0)))
    return fp, fm


def F_parts(mu: float, params: CounterexampleParams, quad_order: int = 192,
            check: bool = True, max_order: int = 4096):
    """(F_+, F_-) at mu.

    With check=True the order is doubled until successive values agree to
    1e-10 relative (q near 1 narrows the (1 - q^2 s)^eps layer at s = 1 and
    needs more points); running past max_order raises QuadratureError.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    fp, fm = _f_parts_at(mu, params.eps, params.q, quad_order)
    if not check:
        return fp, fm
    order = quad_order
    while order <= max_order:
        fp2, fm2 = _f_parts_at(mu, params.eps, params.q, 2 * order)
        scale = max(abs(fp2), abs(fm2), 1e-300)
        if max(abs(fp - fp2), abs(fm - fm2)) <= 1e-10 * scale:
            return fp2, fm2
        fp, fm = fp2, fm2
        order *= 2
    raise QuadratureError(
        f"quadrature not converged at mu={mu:g} up to order {2 * max_order}"
    )


def F_total(mu: float, params: CounterexampleParams, quad_order: int = 192,
            check: bool = False) -> float:
    fp, fm = F_parts(mu, params, quad_order, check=check)
    return fp - fm


def find_mu(params: CounterexampleParams, bracket=(1e-3, 1e3), tol: float = 1e-10,
            scan_points: int = 200, quad_order: int = 192):
    """Unique positive root of F(., q) in the bracket, or None.

    A log-spaced pre-scan locates a sign change; bisection plus a secant
    polish then drives |F| below tol.  Absence of a sign change is a
    reportable outcome (shallow potentials put the root below the bracket),
    not an error.
    """
    lo, hi = bracket
    if not (0.0 < lo < hi):
        raise ValueError("bracket must satisfy 0 < lo < hi")
    grid = np.geomspace(lo, hi, scan_points)
    vals = np.array([F_total(m, params, quad_order) for m in grid])
    sign = np.sign(vals)
    flips = np.where(sign[:-1] * sign[1:] < 0)[0]
    if flips.size == 0:
        return None
    a, b = grid[flips[0]], grid[flips[0] + 1]
    fa = F_total(a, params, quad_order)
    for _ in range(80):
        mid = 0.5 * (a + b)
        fm = F_total(mid, params, quad_order)
        if fm == 0.0:
            a = b = mid
            break
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    mu = 0.5 * (a + b)
    # secant polish
    f0 = F_total(mu, params, quad_order)
    m1 = mu * (1.0 + 1e-8)
    f1 = F_total(m1, params, quad_order)
    for _ in range(8):
        if f1 == f0:
            break
        m2 = m1 - f1 * (m1 - mu) / (f1 - f0)
        mu, f0 = m1, f1
        m1 = m2
        f1 = F_total(m1, params, quad_order)
        if abs(f1) < tol:
            break
    return float(m1) if abs(f1) < abs(f0) else float(mu)


@dataclass(frozen=True)
class CrossValidation:
    mu_root: float | None      # -mu is the integral method's eigenvalue
    lambda0: float             # ground eigenvalue of the truncated matrix
    rel_gap: float             # |lambda0 + mu|/mu, NaN when no root
    n_negative: int            # negative eigenvalues of the matrix
    M_used: int


def decay_resolving_M(params: CounterexampleParams, tail: float = 1e-12) -> int:
    """Smallest truncation with eps q^M below the tail threshold."""
    return int(math.ceil(math.log(tail / params.eps) / math.log(params.q))) + 2


def cross_validate_lambda0(params: CounterexampleParams, M: int | None = None,
                           tail: float = 1e-12, **find_kwargs) -> CrossValidation:
    """Compare -mu_root with the ground eigenvalue of the truncated operator."""
    if M is None:
        M = decay_resolving_M(params, tail)
    mu = find_mu(params, **find_kwargs)
    u = make_potential("counterexample", M, beta=params.beta, q=params.q)
    A = assemble_lax_matrix(u, M)
    low = eigvalsh(A.entries, subset_by_index=[0, min(8, M)])
    if low[-1] < 0.0:
        low = eigvalsh(A.entries)  # unexpectedly many negatives: count them all
    n_neg = int(np.sum(low < 0.0))
    lam0 = float(low[0])
    rel = float("nan") if mu is None else abs(lam0 + mu) / mu
    return CrossValidation(mu_root=mu, lambda0=lam0, rel_gap=rel,
                           n_negative=n_neg, M_used=M)


@dataclass(frozen=True)
class TrendRow:
    q: float
    eps: float
    norm_sqrtlog: float        # ||u_{0,q}||_{-1/2, sqrt_log}
    u1: float                  # first coefficient eps q -> 0 (weak-limit witness)


def norm_and_weak_trend(beta: float, qgrid) -> list[TrendRow]:
    """Norms approach beta while each fixed coefficient decays to zero."""
    w = WeightSpec(-0.5, "sqrt_log")
    rows = []
    for q in qgrid:
        eps = epsilon_of(beta, q)
        n_max = int(math.ceil(42.0 / abs(math.log(q)))) + 8  # q^{2n} < ~1e-36 tail
        u = make_potential("counterexample", n_max, beta=beta, q=q)
        rows.append(TrendRow(q=float(q), eps=eps,
                             norm_sqrtlog=weighted_norm(u, w),
                             u1=float(eps * q)))
    return rows
