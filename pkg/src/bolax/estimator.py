"""Scikit-learn style facade over the coordinate transform.

The map is stateless (its configuration is the truncation, not anything
learned), so fit only validates; transform and inverse_transform act on
batches of coefficient rows and compose with sklearn pipelines and cloning.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .birkhoff import _forward_batch, birkhoff_inverse
from .potentials import PotentialSpectrum
from .validation import check_complex_matrix


class BirkhoffMap(BaseEstimator, TransformerMixin):
    """Forward/inverse nonlinear Fourier transform as a transformer.

    Parameters
    ----------
    n_modes : int
        Truncation size M of the underlying operator; M//2 coordinates are
        produced per sample.
    inverse_tol : float
        Residual target for inverse_transform's least-squares solver.
    inverse_max_iter : int
        Gauss-Newton iteration cap for inverse_transform.
    """

    def __init__(self, n_modes=128, inverse_tol=1e-10, inverse_max_iter=40):
        self.n_modes = n_modes
        self.inverse_tol = inverse_tol
        self.inverse_max_iter = inverse_max_iter

    def fit(self, X, y=None):
        check_complex_matrix(X)
        if self.n_modes < 2:
            raise ValueError("n_modes must be at least 2")
        self.n_features_in_ = np.asarray(X).shape[-1]
        return self

    def transform(self, X):
        """Rows of u_hat(1..n_max) to rows of zeta_1..zeta_{M//2}."""
        A = check_complex_matrix(X)
        return _forward_batch(A, self.n_modes)[3]

    def inverse_transform(self, Z, n_max=None):
        """Rows of coordinates back to rows of u_hat(1..n_max)."""
        Z = check_complex_matrix(Z, "Z")
        if n_max is None:
            n_max = getattr(self, "n_features_in_", Z.shape[1])
        out = np.empty((Z.shape[0], n_max), dtype=complex)
        for i, row in enumerate(Z):
            res = birkhoff_inverse(row, n_max=n_max, M=self.n_modes,
                                   tol=self.inverse_tol,
                                   max_iter=self.inverse_max_iter)
            out[i] = res.potential.coeffs
        return out

    def transform_potential(self, u: PotentialSpectrum):
        return self.transform(u.coeffs[None, :])[0]
