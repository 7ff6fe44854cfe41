import numpy as np
import pytest

from bolax import PotentialSpectrum, WeightSpec, weighted_norm

ENSEMBLE_SEED = 2024


def smooth_member(i: int, n_max: int = 12) -> PotentialSpectrum:
    """Member i of the shared smooth random ensemble.

    Geometric coefficient decay keeps truncation error far below the test
    tolerances at M = 128; amplitudes are scaled so the -1/2 sqrt-log norm
    stays at or below 0.5 (the inverse solver's documented basin).
    """
    rng = np.random.default_rng(ENSEMBLE_SEED + i)
    rho = 0.45 + 0.15 * rng.random()
    n = np.arange(1, n_max + 1)
    raw = PotentialSpectrum(rho ** n * np.exp(2j * np.pi * rng.random(n_max)))
    norm = weighted_norm(raw, WeightSpec(-0.5, "sqrt_log"))
    target = 0.2 + 0.25 * rng.random()
    return PotentialSpectrum(raw.coeffs * (target / norm))


@pytest.fixture(scope="session")
def smooth_ensemble():
    return [smooth_member(i) for i in range(10)]
