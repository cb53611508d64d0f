"""Barut-Girardello and Klauder-Perelomov coherent states for hypergeometric oscillator models."""

from .errors import (
    DegenerateError,
    DivergenceError,
    DomainError,
    DualCSError,
    MismatchError,
    NonConvergenceError,
    ParameterError,
    QuadratureError,
    SupportError,
    TailNotConvergedError,
    TruncationError,
    UnsupportedClassError,
)
from .fock import HO1D, LadderSet, ModelParams, e_n, e_tilde_n, ladder_set, rho, rho_tilde
from .measure import RadialWeight, WeightClass, resolve_identity, weight_for
from .special_fn import HypergeometricSpec, Radius, classify_convergence, pfq
from .states import CoherentState, Family, bg_state, coherent_state, kp_state
from .statistics import Classification, mandel_q, photon_distribution
from .thermal import GeneralSpectrum, ThermalEnsemble, husimi_q, p_function, thermal_mandel

__version__ = "0.1.0"

__all__ = [
    "CoherentState", "Classification", "DegenerateError", "DivergenceError", "DomainError",
    "DualCSError", "Family", "GeneralSpectrum", "HO1D", "HypergeometricSpec", "LadderSet",
    "MismatchError", "ModelParams", "NonConvergenceError", "ParameterError", "QuadratureError",
    "RadialWeight", "Radius", "SupportError", "TailNotConvergedError", "ThermalEnsemble",
    "TruncationError", "UnsupportedClassError", "WeightClass", "bg_state", "classify_convergence",
    "coherent_state", "e_n", "e_tilde_n", "husimi_q", "kp_state", "ladder_set", "mandel_q",
    "p_function", "pfq", "photon_distribution", "resolve_identity", "rho", "rho_tilde",
    "thermal_mandel", "weight_for",
]
