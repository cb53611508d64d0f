"""Photon-number statistics of pure coherent states.

Moments come from two independent sources: the coefficient vector of the
state (direct summation or matrix sandwiches) and the normalization series
acted on termwise by the Euler operator ``x d/dx``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateError
from .fock import e_n, e_tilde_n, ladder_set
from .special_fn import series_sums
from .states import CoherentState, Family

POISSONIAN_TOL = 1e-9


class Classification(str, enum.Enum):
    SUB_POISSONIAN = "sub-poissonian"
    POISSONIAN = "poissonian"
    SUPER_POISSONIAN = "super-poissonian"


def classify(q: float, tol: float = POISSONIAN_TOL) -> Classification:
    if abs(q) < tol:
        return Classification.POISSONIAN
    return Classification.SUB_POISSONIAN if q < 0 else Classification.SUPER_POISSONIAN


@dataclass(frozen=True)
class PhotonStatistics:
    distribution: np.ndarray
    mean: float
    second_moment: float
    mandel_q: float
    classification: Classification
    degenerate: bool = False

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2


class Routes(NamedTuple):
    """The same expectation value obtained along two independent routes."""

    direct: float
    euler: float

    def rel_diff(self) -> float:
        scale = max(abs(self.direct), abs(self.euler))
        return 0.0 if scale == 0 else abs(self.direct - self.euler) / scale


def photon_distribution(state: CoherentState) -> PhotonStatistics:
    """``P_n = |c_n|**2`` with its first two moments and the Mandel parameter.

    At ``z = 0`` the Mandel parameter is undefined; it is reported as NaN
    with ``degenerate=True`` and the Poissonian-limit classification.
    """
    p = state.probabilities
    n = np.arange(state.N, dtype=float)
    mean = float(np.dot(n, p))
    second = float(np.dot(n * n, p))
    if mean == 0.0:
        return PhotonStatistics(p, mean, second, math.nan, Classification.POISSONIAN, degenerate=True)
    q = (second - mean * mean) / mean - 1.0
    return PhotonStatistics(p, mean, second, q, classify(q))


def _series(state: CoherentState):
    return state.model.series_spec(state.family.value)


def expectation_n_power(state: CoherentState, s: int) -> Routes:
    """``<N**s>`` by direct summation over ``P_n`` and by ``(x d/dx)**s N(x) / N(x)``."""
    if s < 0:
        raise ValueError("s must be a nonnegative integer")
    n = np.arange(state.N, dtype=float)
    direct = float(np.dot(n**s, state.probabilities))
    x = state.x
    if x == 0:
        return Routes(direct, 1.0 if s == 0 else 0.0)
    norm, moment = series_sums(_series(state), x, (lambda k: 1.0, lambda k: float(k) ** s))
    return Routes(direct, moment / norm)


def mandel_q(state: CoherentState) -> float:
    """``Q = x [N''/N' - N'/N]`` with termwise derivatives of the normalization series."""
    x = state.x
    if x == 0:
        raise DegenerateError("Mandel parameter undefined at z = 0 (<N> = 0)")
    # x N' = sum n t_n ; x**2 N'' = sum n (n-1) t_n
    norm, d1, d2 = series_sums(
        _series(state), x, (lambda k: 1.0, lambda k: float(k), lambda k: float(k) * (k - 1))
    )
    return d2 / d1 - d1 / norm


def mandel_q_moments(state: CoherentState) -> float:
    """Mandel parameter from the directly summed first two moments."""
    stats = photon_distribution(state)
    if stats.degenerate:
        raise DegenerateError("Mandel parameter undefined at z = 0 (<N> = 0)")
    return stats.mandel_q


def _poly(coeffs: Sequence[float], values: np.ndarray | float):
    # coefficients in ascending powers: c0 + c1 y + c2 y**2 + ...
    out = 0.0 * np.asarray(values, dtype=float)
    for c in reversed(list(coeffs)):
        out = out * values + c
    return out


def expectation_ordered_function(state: CoherentState, coeffs: Sequence[float]) -> Routes:
    """``<f(A+A-)>`` for BG states, ``<f(A~+A~-)>`` for KP states; f given by ascending coefficients.

    Matrix route: f of the ordered product as an N x N matrix, sandwiched in
    the state. Euler route: ``f(e(theta))`` with ``theta`` multiplying term n
    of the normalization series by n.
    """
    bg = state.family is Family.BG
    ladders = ladder_set(state.model, max(state.N, 2))
    product = ladders.a_plus @ ladders.a_minus if bg else ladders.at_plus @ ladders.at_minus
    mat = np.zeros_like(product)
    for c in reversed(list(coeffs)):
        mat = mat @ product + c * np.eye(ladders.N)
    c = np.zeros(ladders.N, dtype=complex)
    c[: state.N] = state.coeffs
    direct = float(np.vdot(c, mat @ c).real)

    eig = e_n if bg else e_tilde_n
    x = state.x
    coeffs = list(coeffs) or [0.0]
    if x == 0:
        return Routes(direct, float(_poly(coeffs, eig(state.model, 0))))
    # the constant term is kept out of the ratio so f = c returns c exactly
    c0, shifted = coeffs[0], [0.0] + coeffs[1:]
    norm, val = series_sums(
        _series(state), x, (lambda k: 1.0, lambda k: float(_poly(shifted, eig(state.model, k))))
    )
    return Routes(direct, c0 + val / norm)


def dual_average(state: CoherentState) -> Routes:
    """``<A~+ A->`` in a BG state, ``<A+ A~->`` in a KP state.

    Both ordered products act as ``N`` on the Fock basis, so the Euler route
    is ``x N'(x) / N(x)`` for the state's own normalization function.
    """
    ladders = ladder_set(state.model, state.N)
    if state.family is Family.BG:
        op = ladders.at_plus @ ladders.a_minus
    else:
        op = ladders.a_plus @ ladders.at_minus
    direct = float(np.vdot(state.coeffs, op @ state.coeffs).real)
    x = state.x
    if x == 0:
        return Routes(direct, 0.0)
    norm, d1 = series_sums(_series(state), x, (lambda k: 1.0, lambda k: float(k)))
    return Routes(direct, d1 / norm)


def compare_to_poisson(stats: PhotonStatistics, tol: float = POISSONIAN_TOL) -> Classification:
    """Classify by comparing the central variance of ``P_n`` with that of Poisson(<N>)."""
    n = np.arange(stats.distribution.size, dtype=float)
    mean = float(np.dot(n, stats.distribution))
    variance = float(np.dot((n - mean) ** 2, stats.distribution))
    if mean == 0:
        return Classification.POISSONIAN
    return classify((variance - mean) / mean, tol)


def poisson_distribution(mean: float, N: int) -> np.ndarray:
    n = np.arange(N, dtype=float)
    if mean == 0:
        out = np.zeros(N)
        out[0] = 1.0
        return out
    return np.exp(n * math.log(mean) - mean - gammaln(n + 1))
