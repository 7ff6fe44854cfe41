"""Sequence-space probes: the convolution quadratic form and divergence witnesses.

The witness sequences involve iterated logarithms; log(log(2)) < 0 makes the
n = 1 term ill-defined under fractional powers, so both sequences start at
n = 2 (the n = 1 entry is set to zero; every asymptotic statement is a tail
statement and is unaffected).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_positive_int


def witness_sequence(N: int) -> np.ndarray:
    """a_n = 1/(sqrt(n log(n+1)) (log log(n+1))^{3/4}) for 2 <= n <= N; a_0 = a_1 = 0."""
    check_positive_int(N, "N")
    n = np.arange(0, N + 1, dtype=float)
    a = np.zeros(N + 1)
    if N >= 2:
        ln = np.log(n[2:] + 1.0)
        lln = np.log(ln)
        a[2:] = 1.0 / (np.sqrt(n[2:] * ln) * lln ** 0.75)
    return a


def obstruction_sequence(N: int) -> np.ndarray:
    """x_n = 1/(log(n+1) (log log(n+1))^{3/4}) for 2 <= n <= N; x_0 = x_1 = 0.

    This is sqrt(n/log(n+1)) times the witness sequence: it lies in the
    -1/2 sqrt-log sequence space while its self-convolution escapes the
    0 sqrt-log space.
    """
    check_positive_int(N, "N")
    n = np.arange(0, N + 1, dtype=float)
    x = np.zeros(N + 1)
    if N >= 2:
        ln = np.log(n[2:] + 1.0)
        lln = np.log(ln)
        x[2:] = 1.0 / (ln * lln ** 0.75)
    return x


def q_form(x: np.ndarray, N: int, method: str = "direct") -> np.ndarray:
    """Q(x)_n = (1/sqrt(n)) sum_{k>=0, k!=n} x_k x_{n-k}/(n-k), n = 1..N.

    x holds the nonnegative-index half (x_0 must be 0); negative indices use
    the even extension x_{-k} = x_k.  ``direct`` evaluates the double sum in
    vectorized chunks; ``fft`` evaluates the identical sum as a convolution
    with y_j = x_j/j (an odd sequence, y_0 = 0), cross-checked against the
    direct path in the test suite.
    """
    x = np.asarray(x, dtype=float)
    check_positive_int(N, "N")
    L = x.size - 1
    if x[0] != 0.0:
        raise ValueError("x_0 must be zero")
    if N > L:
        raise ValueError(f"N = {N} exceeds available sequence length {L}")
    if method == "direct":
        return _q_form_direct(x, N)
    if method == "fft":
        return _q_form_fft(x, N)
    raise ValueError(f"unknown method {method!r}")


def _q_form_direct(x: np.ndarray, N: int, chunk: int = 512) -> np.ndarray:
    L = x.size - 1
    xs = np.concatenate([x[:0:-1], x])  # signed index j -> xs[j + L]
    k = np.arange(0, L + 1)
    out = np.zeros(N)
    inv = np.zeros(2 * L + 1)
    j = np.arange(-L, L + 1)
    inv[j != 0] = 1.0 / j[j != 0]       # y_j = x_j / j at signed offsets
    y = xs * inv
    for start in range(1, N + 1, chunk):
        ns = np.arange(start, min(start + chunk, N + 1))
        d = ns[:, None] - k[None, :]    # n - k in [-L, N]
        valid = np.abs(d) <= L
        dd = np.where(valid, d, 0)
        term = np.where(valid, x[None, :] * y[dd + L], 0.0)
        out[ns - 1] = term.sum(axis=1) / np.sqrt(ns)
    return out


def _q_form_fft(x: np.ndarray, N: int) -> np.ndarray:
    L = x.size - 1
    j = np.arange(-L, L + 1, dtype=float)
    y = np.zeros(2 * L + 1)
    nz = j != 0
    xs = np.concatenate([x[:0:-1], x])
    y[nz] = xs[nz] / j[nz]
    conv = np.convolve(x, y)            # index m corresponds to n = m - L
    n = np.arange(1, N + 1)
    return conv[n + L] / np.sqrt(n)


@dataclass
class DivergenceReport:
    """Partial sums showing the certified lower bound diverging while the
    plain l2 mass of the witness sequence saturates."""

    N: int
    checkpoints: np.ndarray          # cutoffs where partial sums are sampled
    lower_bound_sums: np.ndarray     # S_N = sum (log log(n+1))^{1/2} a_n^2
    l2_sums: np.ndarray              # sum a_n^2
    last_step_lower: np.ndarray      # per-step increment of S at each cutoff
    last_step_l2: np.ndarray         # per-step increment of the l2 sum


def divergence_witness(N: int, checkpoints=None) -> DivergenceReport:
    """Partial sums of the witness series up to N at the given cutoffs."""
    check_positive_int(N, "N")
    if N < 10:
        raise ValueError("N must be at least 10")
    if checkpoints is None:
        checkpoints = np.unique(np.geomspace(10, N, 7).astype(int))
    checkpoints = np.asarray(checkpoints, dtype=int)
    if checkpoints.max() > N:
        raise ValueError("checkpoints exceed N")
    a = witness_sequence(N)
    n = np.arange(0, N + 1, dtype=float)
    lw = np.zeros(N + 1)
    lw[2:] = np.sqrt(np.log(np.log(n[2:] + 1.0)))
    terms_lower = lw * a * a
    terms_l2 = a * a
    cum_lower = np.cumsum(terms_lower)
    cum_l2 = np.cumsum(terms_l2)
    return DivergenceReport(
        N=N,
        checkpoints=checkpoints,
        lower_bound_sums=cum_lower[checkpoints],
        l2_sums=cum_l2[checkpoints],
        last_step_lower=terms_lower[checkpoints],
        last_step_l2=terms_l2[checkpoints],
    )
