"""
Bell-CHSH operator, the correlators ``I = <s_z ⊗ s_z>`` and
``F = <s_x ⊗ s_x>`` of the two-mode squeezed vacuum, and the maximal
violation ``2 sqrt(I^2 + F^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.optimize import minimize

from .fock import (
    FockOperator,
    ModeCutoff,
    TwoModeState,
    auto_cutoff,
    product_expectation,
    tensor,
)
from .pseudospin import (
    FULL,
    Direction,
    SpinTriple,
    make_pseudospin,
    parse_level,
    spin_projection,
)
from .squeeze import (
    apply_pair_creation_exponential,
    check_zeta,
    conjugate_observable,
    squeeze_unitary,
    tmsv_amplitudes,
)

__all__ = [
    "TSIRELSON",
    "BellAngles",
    "CorrelatorPair",
    "BellValue",
    "bell_operator",
    "bell_expectation",
    "correlators_state_picture",
    "correlators_observable_picture",
    "closed_form_correlators",
    "closed_form_biqv_mp",
    "maximal_bell_value",
    "chsh_value",
    "optimize_chsh_angles",
    "nodege_expression",
    "biqv_curve",
]

TSIRELSON = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class BellAngles:
    u: Direction
    v: Direction
    u_prime: Direction
    v_prime: Direction

    @classmethod
    def chsh(cls, theta_v: float) -> "BellAngles":
        """All azimuths zero, ``theta_u = 0``, ``theta_u' = pi/2``, ``theta_v' = -theta_v``."""
        return cls(Direction(0.0), Direction(theta_v), Direction(math.pi / 2), Direction(-theta_v))

    @classmethod
    def from_thetas(cls, thetas: Sequence[float]) -> "BellAngles":
        tu, tv, tup, tvp = thetas
        return cls(Direction(tu), Direction(tv), Direction(tup), Direction(tvp))


@dataclass(frozen=True)
class CorrelatorPair:
    i_corr: float
    f_corr: float

    def __iter__(self):
        yield self.i_corr
        yield self.f_corr


@dataclass(frozen=True)
class BellValue:
    value: float

    @property
    def ratio_to_tsirelson(self) -> float:
        return self.value / TSIRELSON


def _terms(angles: BellAngles, t1: SpinTriple, t2: SpinTriple):
    pu, pup = spin_projection(angles.u, t1), spin_projection(angles.u_prime, t1)
    pv, pvp = spin_projection(angles.v, t2), spin_projection(angles.v_prime, t2)
    return [(pu, pv, 1.0), (pu, pvp, 1.0), (pup, pv, 1.0), (pup, pvp, -1.0)]


def bell_operator(angles: BellAngles, triple1: SpinTriple, triple2: SpinTriple) -> FockOperator:
    """``(u·s1)(v·s2) + (u·s1)(v'·s2) + (u'·s1)(v·s2) - (u'·s1)(v'·s2)``."""
    terms = _terms(angles, triple1, triple2)
    x, y, sign = terms[0]
    out = tensor(x, y) * sign
    for x, y, sign in terms[1:]:
        out = out + tensor(x, y) * sign
    return out


def bell_expectation(
    state: TwoModeState, angles: BellAngles, triple1: SpinTriple, triple2: SpinTriple
) -> float:
    """``<state|B|state>`` evaluated term by term, without the two-mode matrix."""
    total = sum(sign * product_expectation(state, x, y) for x, y, sign in _terms(angles, triple1, triple2))
    return float(np.real(total))


def _resolve_cutoff(zeta: float, cutoff: ModeCutoff | None) -> ModeCutoff:
    return auto_cutoff(zeta) if cutoff is None else cutoff


def correlators_state_picture(
    zeta: float, level=FULL, cutoff: ModeCutoff | None = None
) -> CorrelatorPair:
    """``(<zeta|s_z⊗s_z|zeta>, <zeta|s_x⊗s_x|zeta>)`` with level-truncated pseudospins."""
    zeta = check_zeta(zeta)
    cutoff = _resolve_cutoff(zeta, cutoff)
    triple = make_pseudospin(level, cutoff)
    state = tmsv_amplitudes(zeta, cutoff)
    i_corr = product_expectation(state, triple.sz, triple.sz).real
    f_corr = product_expectation(state, triple.sx, triple.sx).real
    return CorrelatorPair(float(i_corr), float(f_corr))


def correlators_observable_picture(
    zeta: float,
    level=FULL,
    cutoff: ModeCutoff | None = None,
    route: str = "exponential",
) -> CorrelatorPair:
    """
    Vacuum expectations of the conjugated products ``S† (s⊗s) S``.

    ``route="exponential"`` conjugates with the matrix exponential of the
    squeeze generator. ``route="normal_ordered"`` uses
    ``S|00> = exp(K a†b†)|00> / cosh(zeta)``.
    """
    zeta = check_zeta(zeta)
    cutoff = _resolve_cutoff(zeta, cutoff)
    triple = make_pseudospin(level, cutoff)
    vacuum = TwoModeState.basis(cutoff)
    if route == "exponential":
        s = squeeze_unitary(zeta, cutoff)
        i_op = conjugate_observable(tensor(triple.sz, triple.sz), zeta, unitary=s)
        f_op = conjugate_observable(tensor(triple.sx, triple.sx), zeta, unitary=s)
        i_corr = i_op.matrix[0, 0].real
        f_corr = f_op.matrix[0, 0].real
    elif route == "normal_ordered":
        dressed = apply_pair_creation_exponential(math.tanh(zeta), vacuum)
        norm = math.cosh(zeta) ** 2
        i_corr = product_expectation(dressed, triple.sz, triple.sz).real / norm
        f_corr = product_expectation(dressed, triple.sx, triple.sx).real / norm
    else:
        raise ValueError(f"unknown route {route!r}")
    return CorrelatorPair(float(i_corr), float(f_corr))


def _level_deficit(k: float, level) -> float:
    """``K^(4 (level + 1))``: the part of the FULL correlators a finite level misses."""
    if level == FULL or k == 0.0:
        return 0.0
    return math.exp(4 * (level + 1) * math.log(k))


def closed_form_correlators(zeta: float, level=FULL) -> CorrelatorPair:
    """
    ``I_i = 1 - K^(4(i+1))`` and ``F_i = tanh(2 zeta) (1 - K^(4(i+1)))``;
    :data:`FULL` gives ``(1, tanh(2 zeta))``.
    """
    zeta = check_zeta(zeta)
    level = parse_level(level)
    kept = 1.0 - _level_deficit(math.tanh(zeta), level)
    return CorrelatorPair(kept, math.tanh(2 * zeta) * kept)


def closed_form_biqv_mp(zeta, level=FULL, dps: int = 60) -> mpmath.mpf:
    """Closed-form maximal Bell value in `dps`-digit arithmetic."""
    level = parse_level(level)
    with mpmath.workdps(dps):
        z = mpmath.mpf(zeta)
        k = mpmath.tanh(z)
        kept = mpmath.mpf(1) if level == FULL else 1 - k ** (4 * (level + 1))
        return 2 * kept * mpmath.sqrt(1 + mpmath.tanh(2 * z) ** 2)


def chsh_value(pair: CorrelatorPair, theta_v) -> float | np.ndarray:
    """``2 cos(theta_v) I + 2 sin(theta_v) F``."""
    return 2.0 * np.cos(theta_v) * pair.i_corr + 2.0 * np.sin(theta_v) * pair.f_corr


def maximal_bell_value(pair: CorrelatorPair) -> tuple[BellValue, float]:
    """
    ``2 sqrt(I^2 + F^2)`` at ``theta_v = atan2(F, I)``.

    For ``(I, F) = (0, 0)`` the angle is undefined and returned as NaN.
    """
    i_corr, f_corr = pair
    if i_corr == 0.0 and f_corr == 0.0:
        return BellValue(0.0), math.nan
    return BellValue(2.0 * math.hypot(i_corr, f_corr)), math.atan2(f_corr, i_corr)


def optimize_chsh_angles(pair: CorrelatorPair, starts: int = 8, seed: int = 0):
    """
    Maximize the CHSH value over the four polar angles (azimuths zero).

    With ``<s_z⊗s_x> = <s_x⊗s_z> = 0`` each term is
    ``cos a cos b I + sin a sin b F``. Returns ``(value, thetas)``.
    """
    i_corr, f_corr = pair

    def corr(a, b):
        return math.cos(a) * math.cos(b) * i_corr + math.sin(a) * math.sin(b) * f_corr

    def neg(t):
        tu, tv, tup, tvp = t
        return -(corr(tu, tv) + corr(tu, tvp) + corr(tup, tv) - corr(tup, tvp))

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        res = minimize(neg, rng.uniform(-math.pi, math.pi, 4), method="BFGS")
        if best is None or res.fun < best.fun:
            best = res
    return -float(best.fun), tuple(float(t) for t in best.x)


def nodege_expression(zeta: float) -> float:
    """``(1 + 6K^2 + K^4) / cosh^4(zeta)``, equal to ``I_0^2 + F_0^2``."""
    k = math.tanh(check_zeta(zeta))
    return (1 + 6 * k**2 + k**4) / math.cosh(zeta) ** 4


def biqv_curve(
    level,
    zeta_grid: Iterable[float],
    method: str = "closed_form",
    cutoff: ModeCutoff | None = None,
) -> list[BellValue]:
    """
    Maximal Bell value at each grid point.

    ``method="matrix"`` uses :func:`correlators_state_picture`; when
    `cutoff` is None it is chosen once from the largest grid value.
    """
    zetas = [check_zeta(z) for z in zeta_grid]
    if method == "closed_form":
        return [maximal_bell_value(closed_form_correlators(z, level))[0] for z in zetas]
    if method == "matrix":
        if cutoff is None:
            cutoff = auto_cutoff(max(zetas, default=0.0))
        return [maximal_bell_value(correlators_state_picture(z, level, cutoff))[0] for z in zetas]
    raise ValueError(f"unknown method {method!r}")
