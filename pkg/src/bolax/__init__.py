"""Spectral theory of the periodic Benjamin-Ono Lax operator at low
regularity: eigenvalues, gaps, norming constants, Birkhoff coordinates and
their inverse, linearized flows, and the escaping-eigenvalue family."""

__version__ = "0.1.0"

from .birkhoff import (BirkhoffCoordinates, InverseResult, birkhoff_forward,
                       birkhoff_inverse, diagonal_identity_residual,
                       differential_at_zero, generating_function_check,
                       norming_constants, second_differential_at_zero)
from .counterexample import (CounterexampleParams, CrossValidation, F_parts, F_total,
                             cross_validate_lambda0, find_mu, norm_and_weak_trend)
from .dyadic import bilinear_constant_probe, dyadic_decompose, random_pair_ensemble
from .estimator import BirkhoffMap
from .flow import (FlowTrajectory, evolve_birkhoff, evolve_birkhoff_trajectory,
                   evolve_direct, evolve_direct_trajectory, frequencies,
                   weak_limit_observable)
from .lax import (LaxMatrix, SpectralData, assemble_lax_matrix, eigendecompose,
                  gaps_and_trace, normalize_phases, resolvent_form)
from .potentials import (HardyFunction, PotentialSpectrum, WeightSpec, epsilon_of,
                         make_potential, toeplitz_apply, weighted_norm)
from .sequences import divergence_witness, obstruction_sequence, q_form, witness_sequence

__all__ = [
    "BirkhoffCoordinates", "BirkhoffMap", "CounterexampleParams", "CrossValidation",
    "FlowTrajectory", "F_parts", "F_total", "HardyFunction", "InverseResult",
    "LaxMatrix", "PotentialSpectrum", "SpectralData", "WeightSpec",
    "assemble_lax_matrix", "bilinear_constant_probe", "birkhoff_forward",
    "birkhoff_inverse", "cross_validate_lambda0", "diagonal_identity_residual",
    "differential_at_zero", "divergence_witness", "dyadic_decompose",
    "eigendecompose", "epsilon_of", "evolve_birkhoff", "evolve_birkhoff_trajectory",
    "evolve_direct", "evolve_direct_trajectory", "find_mu", "frequencies",
    "gaps_and_trace", "generating_function_check", "make_potential",
    "norm_and_weak_trend", "normalize_phases", "norming_constants",
    "obstruction_sequence", "q_form", "random_pair_ensemble", "resolvent_form",
    "second_differential_at_zero", "toeplitz_apply", "weak_limit_observable",
    "weighted_norm", "witness_sequence",
]
