"""Scalar special functions used by the coherent-state constructions.

Pochhammer symbols, Gamma ratios, generalized hypergeometric series
evaluated by term recurrence, the modified Bessel function K_nu from its
integral representation, and the convergence classification of
``sum x**n / rho(n)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DivergenceError, DomainError, NonConvergenceError, QuadratureError

DEFAULT_REL_TOL = 1e-16
DEFAULT_MAX_TERMS = 100_000


def _as_params(values: Sequence[float], name: str) -> tuple[float, ...]:
    params = tuple(float(v) for v in values)
    for v in params:
        if not math.isfinite(v) or v <= 0.0:
            raise DomainError(f"every entry of {name} must be a finite positive real, got {v!r}")
    return params


@dataclass(frozen=True)
class HypergeometricSpec:
    """Upper parameters ``a`` (length p) and lower parameters ``b`` (length q)."""

    a: tuple[float, ...] = field(default=())
    b: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "a", _as_params(self.a, "a"))
        object.__setattr__(self, "b", _as_params(self.b, "b"))

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    @property
    def eta(self) -> float:
        """Parameter excess ``sum(a) - sum(b)`` governing the unit circle."""
        return math.fsum(self.a) - math.fsum(self.b)

    def swapped(self) -> "HypergeometricSpec":
        return HypergeometricSpec(self.b, self.a)


class Radius(enum.Enum):
    INFINITE = "infinite"
    UNIT = "unit"
    ZERO = "zero"

    @property
    def value_float(self) -> float:
        return {"infinite": math.inf, "unit": 1.0, "zero": 0.0}[self.value]


@dataclass(frozen=True)
class ConvergenceDomain:
    radius: Radius
    moment_problem: str | None = None
    boundary_note: str | None = None

    @property
    def radius_value(self) -> float:
        return self.radius.value_float

    def contains(self, x: complex) -> bool:
        """True when ``|x|`` is strictly inside the disc of convergence."""
        if x == 0:
            return True
        return abs(x) < self.radius_value


def classify_convergence(spec: HypergeometricSpec) -> ConvergenceDomain:
    """Cauchy-Hadamard radius of ``sum x**n / rho(n)`` with ``rho(n) = n! (b)_n / (a)_n``.

    The coefficient ratio behaves like ``n**(p - q - 1)``, so the radius is
    infinite for ``p < q + 1``, one for ``p == q + 1`` and zero otherwise.
    """
    p, q = spec.p, spec.q
    if p < q + 1:
        return ConvergenceDomain(Radius.INFINITE, "Stieltjes", None)
    if p == q + 1:
        eta = spec.eta
        note = (
            f"eta = sum(a) - sum(b) = {eta:.17g}; at x = 1 the series converges iff eta < 0, "
            "elsewhere on |x| = 1 iff eta < 1"
        )
        return ConvergenceDomain(Radius.UNIT, "Hausdorff", note)
    return ConvergenceDomain(Radius.ZERO, None, "series diverges for every x != 0")


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)`` by direct product."""
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    result = 1.0
    for k in range(int(n)):
        result *= a + k
    return result


def log_pochhammer(a: float, n) -> np.ndarray | float:
    """``log (a)_n`` for ``a > 0``; ``n`` may be an integer array."""
    if a <= 0:
        raise DomainError("log_pochhammer requires a > 0")
    n = np.asarray(n, dtype=float)
    out = gammaln(a + n) - gammaln(a)
    return float(out) if out.ndim == 0 else out


def log_gamma_ratio(b: Sequence[float], a: Sequence[float]) -> float:
    """``log( prod Gamma(b_j) / prod Gamma(a_i) )`` for positive arguments."""
    for v in (*b, *a):
        if v <= 0:
            raise DomainError(f"gamma_ratio arguments must be positive, got {v!r}")
    return math.fsum(math.lgamma(v) for v in b) - math.fsum(math.lgamma(v) for v in a)


def gamma_ratio(b: Sequence[float], a: Sequence[float]) -> float:
    return math.exp(log_gamma_ratio(b, a))


def _check_domain(spec: HypergeometricSpec, x: complex) -> None:
    if x == 0:
        return
    dom = classify_convergence(spec)
    r = abs(x)
    if dom.radius is Radius.INFINITE:
        return
    if dom.radius is Radius.ZERO:
        raise DivergenceError(f"p={spec.p} > q+1={spec.q + 1}: series diverges for x={x!r}")
    if r < 1.0:
        return
    if r > 1.0:
        raise DivergenceError(f"|x|={r!r} outside the unit disc of convergence")
    # on the unit circle
    if x == 1:
        if spec.eta < 0:
            return
        raise DivergenceError(f"x = 1 with eta = {spec.eta!r} >= 0: series diverges")
    if spec.eta < 1:
        return
    raise DivergenceError(f"|x| = 1 with eta = {spec.eta!r} >= 1: series diverges")


def series_sums(
    spec: HypergeometricSpec,
    x: complex,
    weights: Sequence[Callable[[int], float]] = (lambda n: 1.0,),
    rel_tol: float = DEFAULT_REL_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> list:
    """Weighted sums ``sum_n w(n) x**n / rho(n)`` for several weights at once.

    Terms come from the recurrence
    ``t_{n+1} = t_n * x * prod(a_i + n) / ((n + 1) prod(b_j + n))``.
    Summation stops once every weighted term has stayed below
    ``rel_tol * |partial sum|`` for three consecutive indices while the
    terms are shrinking.
    """
    if rel_tol <= 0:
        raise DomainError("rel_tol must be positive")
    _check_domain(spec, x)
    sums = [w(0) * (1.0 + 0.0 * x) for w in weights]
    if x == 0:
        return sums
    a, b = spec.a, spec.b
    term = 1.0 + 0.0 * x
    quiet = 0
    for n in range(max_terms):
        ratio = x
        for ai in a:
            ratio *= ai + n
        den = n + 1.0
        for bj in b:
            den *= bj + n
        ratio /= den
        term *= ratio
        m = n + 1
        small = abs(ratio) < 1.0
        for i, w in enumerate(weights):
            contrib = w(m) * term
            sums[i] += contrib
            if abs(contrib) > rel_tol * abs(sums[i]) and sums[i] != 0:
                small = False
        if term == 0:
            return sums
        quiet = quiet + 1 if small else 0
        if quiet >= 3:
            return sums
    raise NonConvergenceError(f"series did not converge within {max_terms} terms (x={x!r})")


def pfq(
    spec: HypergeometricSpec,
    x: complex,
    rel_tol: float = DEFAULT_REL_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
):
    """Generalized hypergeometric series ``pFq(a; b; x) = sum x**n / rho(n)``.

    Real ``x`` gives a float; complex ``x`` is summed by the same recurrence.
    """
    if x == 0:
        return 1.0
    return series_sums(spec, x, rel_tol=rel_tol, max_terms=max_terms)[0]


def pfq_euler(spec: HypergeometricSpec, x: float, s: int, **kw) -> float:
    """``(x d/dx)**s pFq`` evaluated termwise: term n picks up ``n**s``."""
    if s < 0:
        raise DomainError("s must be nonnegative")
    return series_sums(spec, x, (lambda n: float(n) ** s,), **kw)[0]


def pfq_derivative(spec: HypergeometricSpec, x: float, k: int, **kw) -> float:
    """k-th derivative of pFq at x, differentiated term by term."""
    if k < 0:
        raise DomainError("k must be nonnegative")

    def falling(n: int) -> float:
        out = 1.0
        for j in range(k):
            out *= n - j
        return out

    if x == 0:
        # only the x**k term survives: k! / rho(k)
        log_rho_k = math.lgamma(k + 1) + sum(math.lgamma(bj + k) - math.lgamma(bj) for bj in spec.b) - sum(
            math.lgamma(ai + k) - math.lgamma(ai) for ai in spec.a
        )
        return math.factorial(k) * math.exp(-log_rho_k)
    return series_sums(spec, x, (falling,), **kw)[0] / x**k


def _log_cosh(y: float) -> float:
    y = abs(y)
    return y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0)


def bessel_k_scaled(nu: float, x: float) -> float:
    """``exp(x) * K_nu(x)`` from ``int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt``."""
    if not x > 0:
        raise DomainError(f"bessel_k requires x > 0, got {x!r}")
    nu = abs(float(nu))

    def log_f(t: float) -> float:
        return -x * (math.cosh(t) - 1.0) + _log_cosh(nu * t)

    t_peak = math.asinh(nu / x) if nu > 0 else 0.0
    log_peak = max(0.0, log_f(t_peak))
    upper = t_peak + 1.0
    while log_f(upper) > log_peak - 80.0:
        upper *= 1.5

    def f(t: float) -> float:
        return math.exp(log_f(t) - log_peak)

    points = [t_peak] if 0.0 < t_peak < upper else None
    val, err, *info = integrate.quad(
        f, 0.0, upper, points=points, epsabs=0.0, epsrel=1e-13, limit=400, full_output=1
    )
    if err > 1e-10 * abs(val):
        raise QuadratureError(f"K_{nu}({x}) quadrature error estimate {err:.3g} too large")
    return val * math.exp(log_peak)


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind ``K_nu(x)`` for ``x > 0``."""
    return bessel_k_scaled(nu, x) * math.exp(-x)


def log_bessel_k(nu: float, x: float) -> float:
    return math.log(bessel_k_scaled(nu, x)) - x
