"""Truncated Fock space for the dual ladder-operator pairs.

The structure function ``e(n) = n prod(b_j - 1 + n) / prod(a_i - 1 + n)`` and
its dual ``e~(n)`` (``a`` and ``b`` exchanged) define two pairs of shift
operators on ``|0>, ..., |N-1>``. Matrix convention: ``M[m, n] = <m|M|n>``,
so annihilators sit on the superdiagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ParameterError
from .special_fn import HypergeometricSpec


@dataclass(frozen=True)
class ModelParams:
    """Parameter lists ``a`` (length p) and ``b`` (length q) of a nonlinear oscillator."""

    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("a", "b"):
            vals = tuple(float(v) for v in getattr(self, name))
            for v in vals:
                if not math.isfinite(v) or v <= 0:
                    raise ParameterError(f"model parameter {name} must be positive, got {v!r}")
            object.__setattr__(self, name, vals)

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    def dual(self) -> "ModelParams":
        """The tilde map: exchange ``a`` and ``b``."""
        return ModelParams(self.b, self.a)

    def series_spec(self, family: str = "bg") -> HypergeometricSpec:
        """Parameters of the normalization series: pFq(a; b) for BG, qFp(b; a) for KP."""
        family = str(getattr(family, "value", family)).lower()
        if family == "bg":
            return HypergeometricSpec(self.a, self.b)
        if family == "kp":
            return HypergeometricSpec(self.b, self.a)
        raise DomainError(f"unknown family {family!r}")


HO1D = ModelParams()


def _ratio_factor(num: Sequence[float], den: Sequence[float], n: int) -> float:
    out = 1.0
    for v in num:
        out *= v - 1.0 + n
    for v in den:
        d = v - 1.0 + n
        if d == 0:
            raise DomainError(f"structure function singular at n={n}")
        out /= d
    return out


def e_n(model: ModelParams, n: int) -> float:
    """Ladder eigenvalue ``e(n)``; ``e(0) = 0``."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return 0.0
    return n * _ratio_factor(model.b, model.a, n)


def e_tilde_n(model: ModelParams, n: int) -> float:
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return 0.0
    return n * _ratio_factor(model.a, model.b, n)


def log_rho(model: ModelParams, n) -> np.ndarray | float:
    """``log rho(n) = log n! + sum log (b_j)_n - sum log (a_i)_n``."""
    n = np.asarray(n, dtype=float)
    out = gammaln(n + 1.0)
    for bj in model.b:
        out = out + gammaln(bj + n) - gammaln(bj)
    for ai in model.a:
        out = out - gammaln(ai + n) + gammaln(ai)
    return float(out) if out.ndim == 0 else out


def log_rho_tilde(model: ModelParams, n) -> np.ndarray | float:
    return log_rho(model.dual(), n)


def rho(model: ModelParams, n: int) -> float:
    return math.exp(log_rho(model, n))


def rho_tilde(model: ModelParams, n: int) -> float:
    return math.exp(log_rho_tilde(model, n))


@dataclass(frozen=True)
class StructureFunctionTable:
    """``e, e~, log rho, log rho~`` tabulated for ``n = 0..N``."""

    model: ModelParams
    e: np.ndarray
    e_tilde: np.ndarray
    log_rho: np.ndarray
    log_rho_tilde: np.ndarray

    @classmethod
    def build(cls, model: ModelParams, N: int) -> "StructureFunctionTable":
        n = np.arange(N + 1)
        e = np.array([e_n(model, k) for k in n])
        et = np.array([e_tilde_n(model, k) for k in n])
        return cls(model, e, et, log_rho(model, n), log_rho_tilde(model, n))

    @property
    def rho(self) -> np.ndarray:
        return np.exp(self.log_rho)

    @property
    def rho_tilde(self) -> np.ndarray:
        return np.exp(self.log_rho_tilde)


@dataclass(frozen=True)
class LadderSet:
    """Dense N x N matrices of ``A-, A+, A~-, A~+`` and the number operator."""

    model: ModelParams
    N: int
    a_minus: np.ndarray
    a_plus: np.ndarray
    at_minus: np.ndarray
    at_plus: np.ndarray
    number: np.ndarray

    def __post_init__(self):
        for m in (self.a_minus, self.a_plus, self.at_minus, self.at_plus, self.number):
            m.setflags(write=False)

    def lowering(self, tilde: bool = False) -> np.ndarray:
        return self.at_minus if tilde else self.a_minus

    def raising(self, tilde: bool = False) -> np.ndarray:
        return self.at_plus if tilde else self.a_plus


def ladder_set(model: ModelParams, N: int) -> LadderSet:
    if N < 2:
        raise DomainError("truncation N must be at least 2")
    n = np.arange(1, N)
    sq_e = np.sqrt([e_n(model, k) for k in n])
    sq_et = np.sqrt([e_tilde_n(model, k) for k in n])
    a_minus = np.diag(sq_e, 1)
    at_minus = np.diag(sq_et, 1)
    return LadderSet(
        model=model,
        N=N,
        a_minus=a_minus,
        a_plus=a_minus.T.copy(),
        at_minus=at_minus,
        at_plus=at_minus.T.copy(),
        number=np.diag(np.arange(N, dtype=float)),
    )


def basis_vector(N: int, n: int) -> np.ndarray:
    v = np.zeros(N)
    v[n] = 1.0
    return v


def fock_from_vacuum(ladders: LadderSet, n: int, tilde: bool = False) -> np.ndarray:
    """``(A+)**n |0> / sqrt(rho(n))``, or the dual pair when ``tilde`` is set."""
    if not 0 <= n < ladders.N:
        raise IndexError(f"n={n} outside truncated space of dimension {ladders.N}")
    raise_op = ladders.raising(tilde)
    v = basis_vector(ladders.N, 0)
    for _ in range(n):
        v = raise_op @ v
    lr = log_rho_tilde(ladders.model, n) if tilde else log_rho(ladders.model, n)
    return v * math.exp(-0.5 * lr)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def vacuum_projector(N: int) -> np.ndarray:
    p0 = np.zeros((N, N))
    p0[0, 0] = 1.0
    return p0


def _projector_series(raise_op: np.ndarray, lower_op: np.ndarray, log_denominators: np.ndarray) -> np.ndarray:
    """``sum_k (R)**k |0><0| (L)**k / exp(log_denominators[k])`` with running rescaling."""
    N = raise_op.shape[0]
    total = np.zeros((N, N))
    up = basis_vector(N, 0)
    down = basis_vector(N, 0)
    log_up = log_down = 0.0
    for k in range(N):
        if k:
            up = raise_op @ up
            down = down @ lower_op
            nu, nd = np.linalg.norm(up), np.linalg.norm(down)
            if nu == 0 or nd == 0:
                break
            up, down = up / nu, down / nd
            log_up += math.log(nu)
            log_down += math.log(nd)
        total += np.outer(up, down) * math.exp(log_up + log_down - log_denominators[k])
    return total


def mixed_vacuum_expansion(ladders: LadderSet) -> np.ndarray:
    """``sum_n (A+)**n |0><0| (A~-)**n / n!``; equals the identity."""
    log_fact = gammaln(np.arange(ladders.N) + 1.0)
    return _projector_series(ladders.a_plus, ladders.at_minus, log_fact)


def completeness_sum(ladders: LadderSet, tilde: bool = False) -> np.ndarray:
    """``sum_n (A+)**n |0><0| (A-)**n / rho(n)`` (tilde pair on request)."""
    n = np.arange(ladders.N)
    lr = log_rho_tilde(ladders.model, n) if tilde else log_rho(ladders.model, n)
    return _projector_series(ladders.raising(tilde), ladders.lowering(tilde), lr)
