"""Thermal (mixed) states: partition function, occupation moments, Husimi and P functions.

Linear spectra ``E_n = hbar_omega (n + e0)`` give the geometric density
matrix ``p_n = n_bar**n / (n_bar + 1)**(n + 1)`` with the Bose-Einstein mean
``n_bar = 1 / (exp(beta hbar_omega) - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DegenerateError, DivergenceError, DomainError, SupportError, TailNotConvergedError
from .fock import ModelParams
from .measure import QuadratureRule, WeightClass, default_rule, radial_vectors, weight_for
from .states import as_family, coherent_state, log_rho_family, normalization, radius

TAIL_REL_TOL = 1e-12
AUTO_TAIL_TOL = 1e-17
MAX_LEVELS = 1_000_000
RENORMALIZE_TOL = 1e-14


@dataclass(frozen=True)
class ThermalEnsemble:
    """Canonical ensemble over a linear spectrum; ``hbar_omega = 1`` by default."""

    beta: float
    hbar_omega: float = 1.0
    e0: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta!r}")
        if not self.hbar_omega > 0:
            raise DomainError("hbar_omega must be positive")

    @classmethod
    def from_n_bar(cls, n_bar: float, hbar_omega: float = 1.0, e0: float = 0.0) -> "ThermalEnsemble":
        if not n_bar > 0:
            raise DomainError("n_bar must be positive")
        return cls(math.log1p(1.0 / n_bar) / hbar_omega, hbar_omega, e0)

    @property
    def ratio(self) -> float:
        """Boltzmann factor between neighbouring levels, ``n_bar / (n_bar + 1)``."""
        return math.exp(-self.beta * self.hbar_omega)

    @property
    def n_bar(self) -> float:
        # exp(-y) / (1 - exp(-y)) stays finite when beta is huge
        y = self.beta * self.hbar_omega
        return math.exp(-y) / -math.expm1(-y)

    def energies(self, N: int) -> np.ndarray:
        return self.hbar_omega * (np.arange(N) + self.e0)

    def spectrum(self, N: int) -> "GeneralSpectrum":
        return GeneralSpectrum(tuple(self.energies(N)), self.beta)


@dataclass(frozen=True)
class GeneralSpectrum:
    """Explicit finite list of increasing energies at inverse temperature ``beta``."""

    energies: tuple[float, ...]
    beta: float

    def __post_init__(self):
        e = tuple(float(v) for v in self.energies)
        if not e:
            raise DomainError("spectrum must contain at least one level")
        if any(b < a for a, b in zip(e, e[1:])):
            raise DomainError("energies must be increasing")
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        object.__setattr__(self, "energies", e)


Ensemble = Union[ThermalEnsemble, GeneralSpectrum]


def partition_function(ens: Ensemble, N: int | None = None) -> float:
    """Closed form for a linear spectrum; direct (finite) sum for an explicit list."""
    if isinstance(ens, ThermalEnsemble):
        return math.exp(-ens.beta * ens.hbar_omega * ens.e0) / -math.expm1(-ens.beta * ens.hbar_omega)
    e = np.asarray(ens.energies)
    return float(np.sum(np.exp(-ens.beta * e)))


def _linear_levels(ens: ThermalEnsemble, s: int, N: int | None) -> int:
    """Smallest level count whose geometric tail bound on ``sum n**s r**n`` is below tolerance.

    With ``N`` given the bound must drop below ``1e-12`` of the sum before
    ``N``; without it levels are added until the bound is below rounding.
    """
    r = ens.ratio
    tol = AUTO_TAIL_TOL if N is None else TAIL_REL_TOL
    total = None
    n_max = MAX_LEVELS if N is None else N
    acc = 0.0
    log_r = -ens.beta * ens.hbar_omega
    for n in range(n_max + 1):
        term = (n**s if n else (1.0 if s == 0 else 0.0)) * math.exp(n * log_r) if n * log_r > -745 else 0.0
        # tail from n on: terms shrink by q = ((n+1)/n)**s r once q < 1
        if n >= 1:
            q = ((n + 1) / n) ** s * r
            if q < 1 and (term == 0.0 or (acc > 0 and term / (1.0 - q) <= tol * acc)):
                return n
        acc += term
        total = acc
    if N is None:
        raise TailNotConvergedError("thermal sum did not converge within the level cap")
    raise TailNotConvergedError(
        f"tail bound of the thermal sum exceeds {TAIL_REL_TOL:g} of the sum at N={N} (total {total:.3g})"
    )


def geometric_weights(ens: ThermalEnsemble, N: int) -> np.ndarray:
    """Untruncated geometric populations ``(1 - r) r**n`` for ``n < N``, no renormalization."""
    r = ens.ratio
    return (1.0 - r) * np.exp(-ens.beta * ens.hbar_omega * np.arange(N))


def thermal_density_diag(ens: Ensemble, N: int) -> np.ndarray:
    """Diagonal of the equilibrium density matrix on ``|0>..|N-1>``.

    The linear-spectrum geometric distribution is renormalized only when the
    truncated mass misses 1 by more than ``1e-14``.
    """
    if isinstance(ens, ThermalEnsemble):
        p = geometric_weights(ens, N)
        mass = float(p.sum())
        if abs(mass - 1.0) > RENORMALIZE_TOL:
            p = p / mass
        return p
    e = np.asarray(ens.energies[:N])
    w = np.exp(-ens.beta * (e - e[0]))
    return w / w.sum()


def thermal_moment(ens: Ensemble, s: int, N: int | None = None) -> float:
    """``<N**s>_th = Tr(rho N**s)``; raises if the truncated tail bound is above ``1e-12``."""
    if not 0 <= s <= 4:
        raise DomainError(f"moment order must lie in 0..4, got {s}")
    if isinstance(ens, ThermalEnsemble):
        levels = _linear_levels(ens, s, N)
        n = np.arange(levels, dtype=float)
        w = np.exp(-ens.beta * ens.hbar_omega * n)
        return float(np.dot(n**s, w) / np.sum(w))
    e = np.asarray(ens.energies if N is None else ens.energies[:N])
    w = np.exp(-ens.beta * (e - e[0]))
    n = np.arange(e.size, dtype=float)
    return float(np.dot(n**s, w) / np.sum(w))


def thermal_moment_closed_form(ens: ThermalEnsemble, s: int) -> float:
    nb = ens.n_bar
    if s == 0:
        return 1.0
    if s == 1:
        return nb
    if s == 2:
        return nb + 2.0 * nb * nb
    raise DomainError("closed forms are provided for s <= 2")


def thermal_mandel(ens: Ensemble, N: int | None = None) -> float:
    """``Q_th = <N**2>/<N> - <N> - 1``; equals ``n_bar`` for linear spectra."""
    mean = thermal_moment(ens, 1, N)
    if mean <= np.finfo(float).tiny:
        raise DegenerateError("thermal Mandel parameter undefined: <N>_th vanishes (zero-temperature limit)")
    second = thermal_moment(ens, 2, N)
    return second / mean - mean - 1.0


class HusimiRoutes(NamedTuple):
    direct: float
    kernel: float


def husimi_q(model: ModelParams, family, z: complex, ens: ThermalEnsemble, N: int | None = None) -> HusimiRoutes:
    """``<z|rho|z>`` as ``sum p_n |c_n|**2`` and as ``N(lam x) / ((n_bar+1) N(x))``, ``lam = n_bar/(n_bar+1)``."""
    fam = as_family(family)
    state = coherent_state(model, fam, z, N, near_boundary=True)
    # the state's own truncation tail is below 1e-16, so no renormalization here
    p = geometric_weights(ens, state.N)
    direct = float(np.dot(p, state.probabilities))
    x = abs(z) ** 2
    lam = ens.ratio
    dom = radius(model, fam)
    if not dom.contains(lam * x):
        raise DivergenceError("rescaled argument outside the normalization radius")
    kernel = normalization(model, fam, lam * x) / ((ens.n_bar + 1.0) * state.norm_value)
    return HusimiRoutes(direct, float(kernel))


def _log_p_function(weight, x: float, n_bar: float) -> float:
    scale = (n_bar + 1.0) / n_bar
    if not weight.in_support(x) and x != 0:
        raise SupportError(f"x={x!r} outside the weight support {weight.support}")
    if not weight.in_support(scale * x) and x != 0:
        raise SupportError(
            f"rescaled argument {scale * x:.17g} leaves the weight support {weight.support}"
        )
    if x == 0:
        # W(scale x) / W(x) -> 1, except Bessel with b < 1 where W ~ x**(b-1)
        if weight.kind is WeightClass.BESSEL_K and weight.param < 1.0:
            return -math.log(n_bar) + (weight.param - 1.0) * math.log(scale)
        return -math.log(n_bar)
    return -math.log(n_bar) + weight.log_shape(scale * x) - weight.log_shape(x)


def p_function(model: ModelParams, family, x: float, n_bar: float) -> float:
    """P-quasi-distribution ``W(x (n_bar+1)/n_bar) / (n_bar W(x))`` for the closed-form weight classes."""
    if not n_bar > 0:
        raise DomainError("n_bar must be positive")
    weight = weight_for(model, family)
    return math.exp(_log_p_function(weight, float(x), n_bar))


def _p_nodes(model: ModelParams, family, n_bar: float, rule: QuadratureRule | None):
    """Nodes and weights for ``int g(x) h(x) P(x) dx``.

    ``h(x) P(x) = h(s x) / n_bar`` with ``s = (n_bar + 1) / n_bar``; putting
    ``y = s x`` lets the weight's own rule see ``h(y)`` over its full support.
    """
    weight = weight_for(model, family)
    rule = rule or default_rule(weight)
    scale = (n_bar + 1.0) / n_bar
    wk = rule.weights * rule.reduced_weight(weight, rule.nodes) / (n_bar * scale)
    return rule.nodes / scale, wk


def reconstruct_density(
    model: ModelParams,
    family,
    n_bar: float,
    N: int,
    rule: QuadratureRule | None = None,
    n_phi: int | None = None,
) -> np.ndarray:
    """Density matrix ``int dmu P(|z|**2) |z><z|`` on ``|0>..|N-1>``.

    Radial integral by the weight's quadrature rule; angular integral on a
    uniform grid of ``n_phi`` points (exact for ``|n - m| < n_phi``).
    """
    x, wk = _p_nodes(model, family, n_bar, rule)
    radial = radial_vectors(model, family, x, N)
    n_phi = n_phi or 2 * N + 1
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    n = np.arange(N)
    phases = np.exp(1j * np.outer(phi, n))
    rho = np.zeros((N, N), dtype=complex)
    for j in range(n_phi):
        amp = radial * phases[j][None, :]
        rho += np.einsum("k,kn,km->nm", wk, amp, amp.conj()) / n_phi
    return rho


def general_p_moment_problem(model: ModelParams, family, spectrum: Ensemble, n: int) -> float:
    """Target moment ``exp(-beta E_n) rho_fam(n) / C`` of the reduced weight ``Z * P * G``."""
    weight = weight_for(model, family)
    if isinstance(spectrum, ThermalEnsemble):
        e_n_val = spectrum.hbar_omega * (n + spectrum.e0)
        beta = spectrum.beta
    else:
        e_n_val = spectrum.energies[n]
        beta = spectrum.beta
    return math.exp(-beta * e_n_val + log_rho_family(model, family, n)) / weight.constant


def p_moment_quadrature(model: ModelParams, family, ens: ThermalEnsemble, n: int, rule: QuadratureRule | None = None) -> float:
    """``int x**n Z P(x) G(x) dx`` with ``G = h / C``, by the weight's quadrature rule."""
    weight = weight_for(model, family)
    x, wk = _p_nodes(model, family, ens.n_bar, rule)
    z_part = partition_function(ens)
    with np.errstate(divide="ignore"):
        xn = np.exp(n * np.log(x))
    return float(np.dot(wk, xn)) * z_part / weight.constant
