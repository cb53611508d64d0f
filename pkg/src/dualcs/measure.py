"""Radial weight functions realizing the resolution of the identity.

After the angular integration the completeness relation reduces to the
moment problem ``int x**n h(x) dx = rho_fam(n)``. Three model classes have a
closed-form Meijer-G solution:

* ``(p, q) = (0, 0)``: ``h(x) = exp(-x)`` on ``(0, inf)``
* ``(p, q) = (0, 1)``: ``h(x) = 2 x**((b-1)/2) K_{b-1}(2 sqrt(x)) / Gamma(b)`` on ``(0, inf)``
* ``(p, q) = (1, 0)``: ``h(x) = (a - 1) (1 - x)**(a-2)`` on ``(0, 1)``, ``a > 1``

For the KP family the same classes apply to the model with ``a`` and ``b``
exchanged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.special import roots_laguerre, roots_legendre

from .errors import ParameterError, QuadratureError, UnsupportedClassError
from .fock import ModelParams
from .special_fn import HypergeometricSpec, bessel_k_scaled, log_bessel_k, pfq
from .states import Family, as_family, log_rho_family

MAX_LAGUERRE_NODES = 360


class WeightClass(str, enum.Enum):
    EXPONENTIAL = "exponential"
    BESSEL_K = "bessel-k"
    BETA = "beta"


@dataclass(frozen=True)
class RadialWeight:
    """Normalized weight ``h(x) = C * G(x)`` with G the reduced Meijer-G function.

    ``constant`` is fixed by the zeroth moment; ``gamma_constant`` is the
    closed-form Gamma-ratio prefactor, kept for comparison.
    """

    kind: WeightClass
    param: float | None
    support: tuple[float, float]
    constant: float = field(default=1.0)
    gamma_constant: float = field(default=1.0)

    def log_shape(self, x: float) -> float:
        """``log G(x)`` for the unnormalized Meijer-G weight; ``-inf`` off support."""
        if not self.support[0] < x < self.support[1]:
            return -math.inf
        if self.kind is WeightClass.EXPONENTIAL:
            return -x
        if self.kind is WeightClass.BESSEL_K:
            nu = self.param - 1.0
            return math.log(2.0) + 0.5 * nu * math.log(x) + log_bessel_k(nu, 2.0 * math.sqrt(x))
        # G^{1,0}_{1,1}(x | a-1; 0) = (1 - x)**(a-2) / Gamma(a-1)
        a = self.param
        return (a - 2.0) * math.log1p(-x) - math.lgamma(a - 1.0)

    def log_value(self, x: float) -> float:
        return math.log(self.constant) + self.log_shape(x)

    def __call__(self, x: float) -> float:
        return math.exp(self.log_value(x))

    def in_support(self, x: float) -> bool:
        return self.support[0] < x < self.support[1]


def weight_class(model: ModelParams, family) -> tuple[WeightClass, float | None]:
    """Closed-form class of the weight for ``model`` and ``family``."""
    fam = as_family(family)
    eff = model if fam is Family.BG else model.dual()
    pq = (eff.p, eff.q)
    if pq == (0, 0):
        return WeightClass.EXPONENTIAL, None
    if pq == (0, 1):
        return WeightClass.BESSEL_K, eff.b[0]
    if pq == (1, 0):
        return WeightClass.BETA, eff.a[0]
    raise UnsupportedClassError(
        f"no closed-form weight for (p, q) = {pq} ({fam.value.upper()} side); "
        "supported: (0,0), (0,1), (1,0)"
    )


def _shape_integral(w: RadialWeight, power: int = 0) -> float:
    return moment_integral(w, power, normalized=False)


def weight_for(model: ModelParams, family) -> RadialWeight:
    """Weight whose moments reproduce ``rho_fam(n)``; normalization fixed by ``int h = 1``."""
    kind, param = weight_class(model, family)
    if kind is WeightClass.EXPONENTIAL:
        return RadialWeight(kind, None, (0.0, math.inf), 1.0, 1.0)
    if kind is WeightClass.BESSEL_K:
        gamma_c = math.exp(-math.lgamma(param))
        raw = RadialWeight(kind, param, (0.0, math.inf), 1.0, gamma_c)
    else:
        if param <= 1.0:
            raise ParameterError(f"Beta-class weight needs a > 1 (endpoint non-integrable), got a={param!r}")
        gamma_c = math.exp(math.lgamma(param))
        raw = RadialWeight(kind, param, (0.0, 1.0), 1.0, gamma_c)
    c = 1.0 / _shape_integral(raw)
    return RadialWeight(kind, param, raw.support, c, gamma_c)


def _log_integrand_peak(log_f, lo: float, hi: float) -> tuple[float, float]:
    """Coarse grid scan refined by a bounded scalar search."""
    if math.isinf(hi):
        grid = np.geomspace(1e-4, 1e6, 61)
    else:
        grid = lo + (hi - lo) * np.linspace(0.0, 1.0, 63)[1:-1]
    vals = np.array([log_f(t) for t in grid])
    k = int(np.argmax(vals))
    left = grid[k - 1] if k > 0 else lo
    right = grid[k + 1] if k + 1 < grid.size else (hi if not math.isinf(hi) else 10.0 * grid[k])
    res = optimize.minimize_scalar(lambda t: -log_f(t), bounds=(left, right), method="bounded")
    if res.success and -res.fun > vals[k]:
        return float(res.x), float(-res.fun)
    return float(grid[k]), float(vals[k])


def moment_integral(w: RadialWeight, power: float, normalized: bool = True) -> float:
    """``int x**power h(x) dx`` by adaptive quadrature with the peak scaled out."""
    lo, hi = w.support

    def log_f(x: float) -> float:
        if x <= 0:
            return -math.inf
        return power * math.log(x) + w.log_shape(x)

    x_peak, log_peak = _log_integrand_peak(log_f, lo, hi)
    if math.isinf(hi):
        upper = max(2.0 * x_peak, 1.0)
        while log_f(upper) > log_peak - 80.0:
            upper *= 1.5
    else:
        upper = hi

    def f(x: float) -> float:
        lf = log_f(x)
        return 0.0 if lf == -math.inf else math.exp(lf - log_peak)

    points = [x_peak] if lo < x_peak < upper else None
    val, err = integrate.quad(f, lo, upper, points=points, epsabs=0.0, epsrel=1e-12, limit=400)
    if not err <= 1e-9 * abs(val):
        raise QuadratureError(f"moment {power} of {w.kind.value}: error estimate {err:.3g}")
    scale = w.constant if normalized else 1.0
    return val * math.exp(log_peak) * scale


def verify_moments(weight: RadialWeight, model: ModelParams, family, n_max: int) -> float:
    """Max relative error of ``int x**(s-1) h(x) dx`` against ``rho_fam(s-1)``, ``s = 1..n_max+1``."""
    worst = 0.0
    for n in range(n_max + 1):
        got = moment_integral(weight, n)
        want = math.exp(log_rho_family(model, family, n))
        worst = max(worst, abs(got / want - 1.0))
    return worst


class RuleKind(str, enum.Enum):
    GAUSS_LAGUERRE = "gauss-laguerre"
    GAUSS_LAGUERRE_SQRT = "gauss-laguerre-sqrt"
    GAUSS_LEGENDRE = "gauss-legendre"


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights with ``sum w_k f(x_k) ~ int f(x) kernel(x) dx``.

    Kernels: ``exp(-x)`` on ``(0, inf)`` (Gauss-Laguerre),
    ``exp(-2 sqrt(x))`` on ``(0, inf)`` (Gauss-Laguerre in ``t = 2 sqrt(x)``),
    and ``1`` on ``(0, 1)`` (shifted Gauss-Legendre).
    """

    kind: RuleKind
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    def log_kernel(self, x: float) -> float:
        if self.kind is RuleKind.GAUSS_LAGUERRE:
            return -x
        if self.kind is RuleKind.GAUSS_LAGUERRE_SQRT:
            return -2.0 * math.sqrt(x)
        return 0.0

    def reduced_weight(self, w: RadialWeight, x: np.ndarray, scale: float = 1.0) -> np.ndarray:
        """``h(scale * x) / kernel(x)`` at the nodes, formed in log space."""
        out = np.empty(x.size)
        for i, xi in enumerate(x):
            out[i] = _log_reduced(w, self, xi, scale)
        return np.exp(out)


def _log_reduced(w: RadialWeight, rule: QuadratureRule, x: float, scale: float) -> float:
    y = scale * x
    if not w.in_support(y):
        return -math.inf
    if w.kind is WeightClass.BESSEL_K and rule.kind is RuleKind.GAUSS_LAGUERRE_SQRT:
        # cancel exp(-2 sqrt(y)) analytically against the kernel
        nu = w.param - 1.0
        t = 2.0 * math.sqrt(y)
        return (
            math.log(w.constant) + math.log(2.0) + 0.5 * nu * math.log(y)
            + math.log(bessel_k_scaled(nu, t)) - t + 2.0 * math.sqrt(x)
        )
    return w.log_value(y) - rule.log_kernel(x)


def quadrature_rule(kind, n_nodes: int) -> QuadratureRule:
    kind = RuleKind(getattr(kind, "value", kind))
    if n_nodes < 1:
        raise ValueError("need at least one node")
    if kind is RuleKind.GAUSS_LEGENDRE:
        t, wt = roots_legendre(n_nodes)
        return QuadratureRule(kind, 0.5 * (t + 1.0), 0.5 * wt)
    if n_nodes > MAX_LAGUERRE_NODES:
        raise ValueError(f"Gauss-Laguerre limited to {MAX_LAGUERRE_NODES} nodes in double precision")
    with np.errstate(over="ignore", invalid="ignore"):
        t, wt = roots_laguerre(n_nodes)
    if kind is RuleKind.GAUSS_LAGUERRE:
        return QuadratureRule(kind, t, wt)
    # x = (t/2)**2, dx = (t/2) dt
    return QuadratureRule(kind, 0.25 * t * t, 0.5 * t * wt)


def default_rule(weight: RadialWeight, n_nodes: int = 200) -> QuadratureRule:
    kind = {
        WeightClass.EXPONENTIAL: RuleKind.GAUSS_LAGUERRE,
        WeightClass.BESSEL_K: RuleKind.GAUSS_LAGUERRE_SQRT,
        WeightClass.BETA: RuleKind.GAUSS_LEGENDRE,
    }[weight.kind]
    return quadrature_rule(kind, n_nodes)


def radial_vectors(model: ModelParams, family, x: np.ndarray, N: int) -> np.ndarray:
    """Rows ``v(x_k)[n] = x_k**(n/2) / sqrt(rho_fam(n))``, computed in log space."""
    n = np.arange(N)
    lr = log_rho_family(model, family, n)
    with np.errstate(divide="ignore"):
        logx = np.log(x)[:, None]
    return np.exp(0.5 * (n[None, :] * logx - lr[None, :]))


def resolve_identity(model: ModelParams, family, N: int, rule: QuadratureRule | None = None) -> float:
    """``max |M - I|`` for ``M = sum_k w_k h(x_k) v(x_k) v(x_k)^T``.

    The angular integral has been done analytically, so M is diagonal.
    """
    weight = weight_for(model, family)
    rule = rule or default_rule(weight)
    wk = rule.weights * rule.reduced_weight(weight, rule.nodes)
    v = radial_vectors(model, family, rule.nodes, N)
    diag = np.einsum("k,kn->n", wk, v * v)
    return float(np.max(np.abs(diag - 1.0)))


def identity_diagonal(model: ModelParams, family, N: int, rule: QuadratureRule | None = None) -> np.ndarray:
    weight = weight_for(model, family)
    rule = rule or default_rule(weight)
    wk = rule.weights * rule.reduced_weight(weight, rule.nodes)
    v = radial_vectors(model, family, rule.nodes, N)
    return np.einsum("k,kn->n", wk, v * v)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    expected: float
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance


def bessel_i0_kernel_integral(t: float) -> float:
    """``int_0^inf exp(-x) I_0(2 sqrt(t x)) dx`` with ``I_0(2 sqrt(y)) = 0F1(; 1; y)``."""
    kernel = HypergeometricSpec((), (1.0,))

    def log_f(x: float) -> float:
        return -x + math.log(pfq(kernel, t * x))

    if t == 0:
        return integrate.quad(lambda x: math.exp(-x), 0.0, math.inf, epsabs=0, epsrel=1e-13)[0]
    # integrand peaks near x = t
    x_peak = max(t, 1e-3)
    log_peak = log_f(x_peak)
    upper = 2.0 * x_peak + 10.0
    while log_f(upper) > log_peak - 80.0:
        upper *= 1.5
    val, err = integrate.quad(
        lambda x: math.exp(log_f(x) - log_peak), 0.0, upper, points=[x_peak], epsabs=0, epsrel=1e-13, limit=400
    )
    return val * math.exp(log_peak)


def meijer_mellin_bessel(b: float, s: float) -> float:
    """``int_0^inf x**(s-1) G^{2,0}_{0,2}(x | 0, b-1) dx`` by quadrature."""
    raw = RadialWeight(WeightClass.BESSEL_K, b, (0.0, math.inf), 1.0, 1.0)
    return moment_integral(raw, s - 1.0, normalized=False)


def scalar_integral_checks(b: float = 2.0, tol: float = 1e-8) -> list[CheckResult]:
    """Kernel integral ``= e**t`` at the HO-1D reduction, and the Mellin transform of G^{2,0}_{0,2}."""
    out = []
    for t in (0.0, 0.5, 1.0, 2.0, 5.0):
        got = bessel_i0_kernel_integral(t)
        want = math.exp(t)
        out.append(CheckResult(f"exp-I0 kernel t={t:g}", got, want, abs(got / want - 1.0), tol))
    for s in range(1, 11):
        got = meijer_mellin_bessel(b, s)
        want = math.exp(math.lgamma(s) + math.lgamma(b - 1.0 + s))
        out.append(CheckResult(f"Mellin G20_02 b={b:g} s={s}", got, want, abs(got / want - 1.0), tol))
    return out
