"""Barut-Girardello and Klauder-Perelomov coherent states on a truncated Fock space."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError, MismatchError, TruncationError
from .fock import ModelParams, ladder_set, log_rho, log_rho_tilde
from .special_fn import ConvergenceDomain, Radius, classify_convergence, pfq

TAIL_TOL = 1e-16
N_CAP = 2048
UNIT_RADIUS_LIMIT = 0.95


class Family(str, enum.Enum):
    BG = "bg"
    KP = "kp"

    @property
    def other(self) -> "Family":
        return Family.KP if self is Family.BG else Family.BG


def as_family(family) -> Family:
    try:
        return Family(str(getattr(family, "value", family)).lower())
    except ValueError:
        raise DomainError(f"unknown family {family!r}") from None


def log_rho_family(model: ModelParams, family, n):
    """``rho_BG = rho`` and ``rho_KP = rho~ = (n!)**2 / rho``."""
    return log_rho(model, n) if as_family(family) is Family.BG else log_rho_tilde(model, n)


def radius(model: ModelParams, family) -> ConvergenceDomain:
    """Convergence domain of the normalization series; KP swaps the roles of p and q."""
    return classify_convergence(model.series_spec(as_family(family).value))


def normalization(model: ModelParams, family, x: complex):
    """``N_BG(x) = pFq(a; b; x)`` or ``N_KP(x) = qFp(b; a; x)``."""
    return pfq(model.series_spec(as_family(family).value), x)


@dataclass(frozen=True, eq=False)
class CoherentState:
    family: Family
    model: ModelParams
    z: complex
    N: int
    coeffs: np.ndarray
    norm_value: float
    tail: float = 0.0

    def __post_init__(self):
        self.coeffs.setflags(write=False)

    @property
    def x(self) -> float:
        """The radial variable ``|z|**2``."""
        return abs(self.z) ** 2

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def same_space(self, other: "CoherentState") -> bool:
        return self.model == other.model and self.N == other.N


def _check_label(model: ModelParams, family: Family, z: complex, near_boundary: bool) -> ConvergenceDomain:
    dom = radius(model, family)
    r = abs(z)
    if z == 0:
        return dom
    if not r < dom.radius_value:
        raise DivergenceError(
            f"|z|={r:.17g} not inside the {family.value.upper()} radius ({dom.radius.value})"
        )
    if dom.radius is Radius.UNIT and r > UNIT_RADIUS_LIMIT and not near_boundary:
        raise DivergenceError(
            f"|z|={r:.17g} exceeds {UNIT_RADIUS_LIMIT} for a unit-radius family; pass near_boundary=True"
        )
    return dom


def _tail_ratio(model: ModelParams, family: Family, x: float, n: int, log_norm: float) -> float:
    """``x**n / rho_fam(n) / N(x)``: size of the first omitted series term."""
    if x == 0:
        return 0.0
    return math.exp(n * math.log(x) - log_rho_family(model, family, n) - log_norm)


def choose_truncation(model: ModelParams, family, z: complex, tol: float = TAIL_TOL, cap: int = N_CAP) -> int:
    """Smallest N with ``|z|**(2N) / rho_fam(N) < tol * N(|z|**2)``."""
    family = as_family(family)
    x = abs(z) ** 2
    if x == 0:
        return 2
    log_norm = math.log(normalization(model, family, x))
    # once terms are decreasing, the first small term certifies the tail
    for n in range(2, cap + 1):
        if _tail_ratio(model, family, x, n, log_norm) < tol:
            nxt = _tail_ratio(model, family, x, n + 1, log_norm)
            if nxt <= _tail_ratio(model, family, x, n, log_norm):
                return n
    raise TruncationError(f"tail target {tol:g} not reached below N={cap} for |z|={abs(z):.6g}")


def _resolve_N(model, family, z, N):
    if N is None:
        return choose_truncation(model, family, z)
    if N < 2:
        raise DomainError("truncation N must be at least 2")
    return int(N)


def _series_state(model: ModelParams, family: Family, z: complex, N: int | None, near_boundary: bool) -> CoherentState:
    z = complex(z)
    _check_label(model, family, z, near_boundary)
    N = _resolve_N(model, family, z, N)
    x = abs(z) ** 2
    norm = normalization(model, family, x)
    n = np.arange(N)
    coeffs = np.zeros(N, dtype=complex)
    if z == 0:
        coeffs[0] = 1.0
        return CoherentState(family, model, z, N, coeffs, 1.0, 0.0)
    log_mod = n * math.log(abs(z)) - 0.5 * log_rho_family(model, family, n) - 0.5 * math.log(norm)
    phase = np.exp(1j * n * cmath.phase(z))
    coeffs = np.exp(log_mod) * phase
    tail = _tail_ratio(model, family, x, N, math.log(norm))
    return CoherentState(family, model, z, N, coeffs, float(norm), tail)


def bg_state(model: ModelParams, z: complex, N: int | None = None, *, near_boundary: bool = False) -> CoherentState:
    """Eigenvector of ``A-`` with eigenvalue z, normalized by ``pFq(a; b; |z|**2)``."""
    return _series_state(model, Family.BG, z, N, near_boundary)


def kp_state(model: ModelParams, z: complex, N: int | None = None, *, near_boundary: bool = False) -> CoherentState:
    """Eigenvector of ``A~-``, normalized by ``qFp(b; a; |z|**2)``."""
    return _series_state(model, Family.KP, z, N, near_boundary)


def coherent_state(model: ModelParams, family, z: complex, N: int | None = None, **kw) -> CoherentState:
    family = as_family(family)
    return _series_state(model, family, z, N, kw.get("near_boundary", False))


def _displaced_vacuum(model: ModelParams, family: Family, z: complex, N, near_boundary: bool) -> CoherentState:
    # exp(z R)|0> with R nilpotent: the power series stops after N terms
    z = complex(z)
    _check_label(model, family, z, near_boundary)
    N = _resolve_N(model, family, z, N)
    ladders = ladder_set(model, max(N, 2))
    raise_op = ladders.at_plus if family is Family.BG else ladders.a_plus
    term = np.zeros(ladders.N, dtype=complex)
    term[0] = 1.0
    vec = term.copy()
    for k in range(1, ladders.N):
        term = (z / k) * (raise_op @ term)
        vec += term
    vec = vec[:N]
    norm_sq = float(np.vdot(vec, vec).real)
    coeffs = vec / math.sqrt(norm_sq)
    return CoherentState(family, model, z, N, coeffs, norm_sq, 0.0)


def bg_via_displacement(model: ModelParams, z: complex, N: int | None = None, *, near_boundary: bool = False) -> CoherentState:
    """``exp(z A~+)|0>`` normalized; coincides with :func:`bg_state`."""
    return _displaced_vacuum(model, Family.BG, z, N, near_boundary)


def kp_via_displacement(model: ModelParams, z: complex, N: int | None = None, *, near_boundary: bool = False) -> CoherentState:
    """``exp(z A+)|0>`` normalized; coincides with :func:`kp_state`."""
    return _displaced_vacuum(model, Family.KP, z, N, near_boundary)


def _check_pair(s1: CoherentState, s2: CoherentState) -> None:
    if s1.family is not s2.family:
        raise MismatchError(f"families differ: {s1.family.value} vs {s2.family.value}")
    if s1.model != s2.model:
        raise MismatchError("states belong to different models")
    if s1.N != s2.N:
        raise MismatchError(f"truncations differ: {s1.N} vs {s2.N}")


def overlap(s1: CoherentState, s2: CoherentState) -> complex:
    """``<z1|z2>`` from the coefficient vectors."""
    _check_pair(s1, s2)
    return complex(np.vdot(s1.coeffs, s2.coeffs))


def overlap_kernel(s1: CoherentState, s2: CoherentState) -> complex:
    """``N(conj(z1) z2) / sqrt(N(|z1|**2) N(|z2|**2))`` via the series kernel."""
    _check_pair(s1, s2)
    spec = s1.model.series_spec(s1.family.value)
    return complex(pfq(spec, s1.z.conjugate() * s2.z)) / math.sqrt(s1.norm_value * s2.norm_value)


class Direction(str, enum.Enum):
    BG_TO_KP = "bg->kp"
    KP_TO_BG = "kp->bg"


def jump_operator(model: ModelParams, z: complex, N: int, direction=Direction.BG_TO_KP) -> np.ndarray:
    """Diagonal of ``J(|z|**2)`` (or its inverse), mapping one family onto the other."""
    direction = Direction(getattr(direction, "value", direction))
    x = abs(z) ** 2
    for fam in Family:
        _check_label(model, fam, complex(z), near_boundary=True)
    n = np.arange(N)
    log_diag = 0.5 * (math.log(normalization(model, Family.BG, x)) - math.log(normalization(model, Family.KP, x)))
    log_diag = log_diag + 0.5 * (log_rho(model, n) - log_rho_tilde(model, n))
    if direction is Direction.KP_TO_BG:
        log_diag = -log_diag
    return np.exp(log_diag)


def jump_apply(model: ModelParams, z: complex, N: int | None = None, direction=Direction.BG_TO_KP) -> CoherentState:
    """Apply J (or its inverse) to the source-family state; returns the target-family state."""
    direction = Direction(getattr(direction, "value", direction))
    source, target = (Family.BG, Family.KP) if direction is Direction.BG_TO_KP else (Family.KP, Family.BG)
    if N is None:
        N = max(choose_truncation(model, source, z), choose_truncation(model, target, z))
    src = coherent_state(model, source, z, N, near_boundary=True)
    diag = jump_operator(model, z, N, direction)
    target_norm = normalization(model, target, abs(z) ** 2)
    return CoherentState(target, model, complex(z), N, diag * src.coeffs, float(target_norm), src.tail)


def jump_block_matrix(model: ModelParams, z: complex, N: int) -> np.ndarray:
    """``diag(J, J**-1)`` acting on the stacked pair ``(|z>_BG, |z>_KP)``."""
    j = jump_operator(model, z, N, Direction.BG_TO_KP)
    out = np.zeros((2 * N, 2 * N))
    out[:N, :N] = np.diag(j)
    out[N:, N:] = np.diag(1.0 / j)
    return out


def pauli_x_action(pair: tuple[CoherentState, CoherentState]) -> tuple[CoherentState, CoherentState]:
    """Swap the components of a (BG, KP) pair: the NOT gate on the dual doublet."""
    first, second = pair
    if first.family is second.family:
        raise MismatchError("pair must hold one state of each family")
    if first.model != second.model or first.N != second.N or first.z != second.z:
        raise MismatchError("pair states must share model, z and truncation")
    return second, first


def stacked(pair: tuple[CoherentState, CoherentState]) -> np.ndarray:
    return np.concatenate([pair[0].coeffs, pair[1].coeffs])
