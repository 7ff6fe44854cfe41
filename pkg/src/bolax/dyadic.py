"""Dyadic Littlewood-Paley blocks and empirical bilinear-constant probes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potentials import HardyFunction, PotentialSpectrum, WeightSpec, weighted_norm


def cutoff(xi):
    """C^2 bump: 1 on |xi|<=1/2, smoothstep decay on [1/2,1], 0 beyond."""
    x = np.abs(np.asarray(xi, dtype=float))
    t = np.clip(2.0 * x - 1.0, 0.0, 1.0)
    s = 6.0 * t**5 - 15.0 * t**4 + 10.0 * t**3
    return 1.0 - s


def annulus(xi):
    """phi(xi) = psi(xi/2) - psi(xi); supported in 1/2 < |xi| < 2."""
    return cutoff(np.asarray(xi) / 2.0) - cutoff(xi)


def dyadic_decompose(f: HardyFunction) -> list[HardyFunction]:
    """Split f into blocks [f_-1, f_0, f_1, ...] with sum(blocks) == f exactly.

    Block -1 is the zero mode; block n >= 0 collects phi(k/2^n) f_hat(k),
    supported in 2^{n-1} < k < 2^{n+1}.  The cutoffs telescope to 1 at every
    integer k, so the decomposition is an exact partition.
    """
    k = np.arange(f.n_max + 1)
    blocks = []
    b0 = np.zeros_like(f.coeffs)
    b0[0] = f.coeffs[0]
    blocks.append(HardyFunction(b0))
    n = 0
    while 2 ** (n - 1) < f.n_max:
        w = annulus(k / 2.0 ** n)
        bc = f.coeffs * w
        bc[0] = 0.0
        blocks.append(HardyFunction(bc))
        n += 1
    return blocks


def product_coefficients(u: PotentialSpectrum, v: PotentialSpectrum,
                         oversample: int = 4):
    """Exact Fourier coefficients of the pointwise product u*v.

    Computed on an oversampled grid large enough that the band-limited
    product aliases nothing.  Returns (k, w_hat) with k = -K..K,
    K = u.n_max + v.n_max.
    """
    K = u.n_max + v.n_max
    G = 1
    while G < oversample * (K + 1):
        G *= 2
    x = 2.0 * np.pi * np.arange(G) / G
    ug = u.grid_samples(G).real
    vg = v.grid_samples(G).real
    wh = np.fft.fft(ug * vg) / G
    k = np.arange(-K, K + 1)
    return k, wh[k % G]


def _two_sided_norm(k, wh, spec: WeightSpec) -> float:
    return float(np.sqrt(np.sum(spec.weights(k) * np.abs(wh) ** 2)))


@dataclass
class BilinearProbeReport:
    """Empirical ratios for the two product estimates, over a seeded ensemble."""

    ratios_low: np.ndarray    # ||uv||_{-1/2} / (||u||_{-1/2,sqrt_log} ||v||_{1/2})
    ratios_high: np.ndarray   # ||uv||_{1/2,1/sqrt_log} / (||u||_{1/2} ||v||_{1/2})
    skipped: int
    n_max: int
    seed: int

    @property
    def max_low(self) -> float:
        return float(np.max(self.ratios_low)) if self.ratios_low.size else float("nan")

    @property
    def max_high(self) -> float:
        return float(np.max(self.ratios_high)) if self.ratios_high.size else float("nan")

    def to_csv(self, path) -> None:
        """One probe per line: pair index and both ratios."""
        from .io import write_csv
        rows = [(i, lo, hi) for i, (lo, hi)
                in enumerate(zip(self.ratios_low, self.ratios_high))]
        write_csv(path, ["pair", "ratio_low_product", "ratio_high_product"], rows)


def bilinear_constant_probe(pairs, oversample: int = 4) -> BilinearProbeReport:
    """Measure product-estimate ratios over explicit (u, v) pairs.

    Pairs with a vanishing denominator norm are skipped and counted.
    """
    w_low = WeightSpec(-0.5)
    w_u = WeightSpec(-0.5, "sqrt_log")
    w_half = WeightSpec(0.5)
    w_high = WeightSpec(0.5, "inv_sqrt_log")
    ratios_low, ratios_high = [], []
    skipped = 0
    n_max = 0
    for u, v in pairs:
        n_max = max(n_max, u.n_max, v.n_max)
        nu, nv = weighted_norm(u, w_u), weighted_norm(v, w_half)
        nu_half = weighted_norm(u, w_half)
        if nu == 0.0 or nv == 0.0 or nu_half == 0.0:
            skipped += 1
            continue
        k, wh = product_coefficients(u, v, oversample)
        ratios_low.append(_two_sided_norm(k, wh, w_low) / (nu * nv))
        ratios_high.append(_two_sided_norm(k, wh, w_high) / (nu_half * nv))
    return BilinearProbeReport(
        ratios_low=np.array(ratios_low),
        ratios_high=np.array(ratios_high),
        skipped=skipped,
        n_max=n_max,
        seed=-1,
    )


def random_pair_ensemble(n_pairs: int, n_max: int, seed: int,
                         decay_u: float = 1.0, decay_v: float = 1.5):
    """Seeded (u, v) pairs with |u_hat(n)| = n^{-decay_u}, |v_hat(n)| = n^{-decay_v}.

    Each member draws from its own substream, so enlarging n_max extends the
    same ensemble instead of reshuffling it.
    """
    n = np.arange(1, n_max + 1, dtype=float)
    out = []
    for i in range(n_pairs):
        pu = np.exp(2j * np.pi * np.random.default_rng([seed, i, 0]).random(n_max))
        pv = np.exp(2j * np.pi * np.random.default_rng([seed, i, 1]).random(n_max))
        out.append((PotentialSpectrum(n ** (-decay_u) * pu),
                    PotentialSpectrum(n ** (-decay_v) * pv)))
    return out
