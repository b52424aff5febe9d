"""
Parity observables built from even/odd position eigenstates.

``Pi_z`` is the reflection ``q -> -q`` (diagonal ``(-1)^n`` in the Fock
basis) and ``Pi_x`` is multiplication by ``sign(q)``. The x-correlator of
the two-mode squeezed vacuum is available three ways: the closed form
``(2/pi) arctan(sinh 2 zeta)``, a 2-D Gauss-Legendre integral over the
position density, and a Fock-space sum with quadrature matrix elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .bell import CorrelatorPair
from .fock import (
    ConvergenceError,
    FockOperator,
    ModeCutoff,
    auto_cutoff,
    product_expectation,
)
from .squeeze import check_zeta, tmsv_amplitudes

__all__ = [
    "RouteDisagreementError",
    "QuadratureScheme",
    "ParityTriple",
    "hermite_functions",
    "parity_z_operator",
    "sign_position_operator",
    "parity_triple_fock",
    "position_parity_triple",
    "tmsv_position_wavefunction",
    "tmsv_wavefunction_series",
    "parity_f_closed",
    "parity_f_position",
    "parity_f_fock",
    "parity_f_quadrature",
    "parity_correlators",
]


class RouteDisagreementError(ArithmeticError):
    """Two independent evaluations of the same quantity disagree."""


@dataclass(frozen=True)
class QuadratureScheme:
    """Gauss-Legendre rule with `nodes` points on each half-axis ``[0, half_width]``."""

    nodes: int = 128
    half_width: float = 8.0

    def __post_init__(self):
        if self.nodes < 32:
            raise ValueError(f"need at least 32 nodes per half-axis, got {self.nodes}")
        if not self.half_width >= 6.0:
            raise ValueError(f"half_width must be >= 6, got {self.half_width}")

    @classmethod
    def for_zeta(cls, zeta: float, nodes: int = 128) -> "QuadratureScheme":
        # single-mode marginal is exp(-q^2 / cosh 2zeta); keep its tail below ~1e-13
        return cls(nodes, max(8.0, math.sqrt(30.0 * math.cosh(2.0 * check_zeta(zeta)))))

    def refined(self) -> "QuadratureScheme":
        return QuadratureScheme(2 * self.nodes, self.half_width)

    def half_axis(self, half_width: float | None = None, nodes: int | None = None):
        """Nodes and weights on ``[0, L]``."""
        L = self.half_width if half_width is None else half_width
        x, w = np.polynomial.legendre.leggauss(self.nodes if nodes is None else nodes)
        return (x + 1.0) * (L / 2.0), w * (L / 2.0)

    def grid(self):
        """Mirror-symmetric nodes and weights on ``[-L, L]``, split at zero."""
        q, w = self.half_axis()
        return np.concatenate([-q[::-1], q]), np.concatenate([w[::-1], w])


def hermite_functions(n_max: int, q) -> np.ndarray:
    """
    Oscillator eigenfunctions ``psi_n(q)`` for ``n = 0..n_max``, shape
    ``(n_max + 1, len(q))``.

    The three-term recurrence is run on rescaled values with a per-node log
    scale, so large ``n`` and ``|q|`` neither overflow nor underflow early.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    out = np.zeros((n_max + 1, q.size))
    log_scale = -0.5 * q * q - 0.25 * math.log(math.pi)
    prev = np.zeros_like(q)
    cur = np.ones_like(q)
    out[0] = np.exp(log_scale)
    for n in range(1, n_max + 1):
        nxt = math.sqrt(2.0 / n) * q * cur - math.sqrt((n - 1) / n) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if big.any():
            s = np.abs(cur[big])
            cur[big] /= s
            prev[big] /= s
            log_scale[big] += np.log(s)
        with np.errstate(under="ignore"):
            out[n] = cur * np.exp(log_scale)
    return out


def parity_z_operator(cutoff: ModeCutoff) -> FockOperator:
    """Reflection parity, ``(-1)^n`` on ``|n>``."""
    return FockOperator(cutoff, 1, sp.diags((-1.0) ** np.arange(cutoff.dim), 0, format="csr"))


def _sign_elements(n_max: int, half_width: float, nodes: int) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(nodes)
    q = (x + 1.0) * (half_width / 2.0)
    w = w * (half_width / 2.0)
    psi = hermite_functions(n_max, q)
    m = 2.0 * (psi * w) @ psi.T
    n = np.arange(n_max + 1)
    m[(n[:, None] + n[None, :]) % 2 == 0] = 0.0
    return m


@lru_cache(maxsize=8)
def sign_position_operator(
    cutoff: ModeCutoff, scheme: QuadratureScheme | None = None, tol: float = 1e-10
) -> FockOperator:
    """
    ``<m|sign(q)|n> = 2 int_0^inf psi_m psi_n dq`` for ``m + n`` odd, zero otherwise.

    The integration range is widened past the turning point of the highest
    retained state and the node count raised to resolve its oscillations;
    the result must be stable under node doubling to within `tol`.
    """
    scheme = QuadratureScheme() if scheme is None else scheme
    L = max(scheme.half_width, math.sqrt(2 * cutoff.n_max + 1) + 8.0)
    nodes = max(scheme.nodes, 2 * cutoff.dim + 64)
    coarse = _sign_elements(cutoff.n_max, L, nodes)
    fine = _sign_elements(cutoff.n_max, L, 2 * nodes)
    drift = np.abs(fine - coarse).max()
    if drift > tol:
        raise ConvergenceError(f"sign(q) matrix elements moved by {drift:.3g} under node doubling")
    return FockOperator.from_dense(cutoff, fine)


@dataclass(frozen=True, eq=False)
class ParityTriple:
    """Dense ``(Pi_z, Pi_x, Pi_y)`` on some basis, with ``Pi_y = [Pi_z, Pi_x] / 2i``."""

    z: np.ndarray
    x: np.ndarray

    @property
    def y(self) -> np.ndarray:
        return -0.5j * (self.z @ self.x - self.x @ self.z)

    @property
    def plus(self) -> np.ndarray:
        return 0.5 * (self.x + 1j * self.y)

    @property
    def minus(self) -> np.ndarray:
        return 0.5 * (self.x - 1j * self.y)


def parity_triple_fock(cutoff: ModeCutoff, scheme: QuadratureScheme | None = None) -> ParityTriple:
    return ParityTriple(
        parity_z_operator(cutoff).toarray(), sign_position_operator(cutoff, scheme).toarray()
    )


def position_parity_triple(scheme: QuadratureScheme | None = None) -> ParityTriple:
    """
    Parity triple on the quadrature grid, in the orthonormal basis
    ``sqrt(w_j) delta(q - q_j)``: reflection is the index reversal and
    ``sign(q)`` is diagonal.
    """
    scheme = QuadratureScheme() if scheme is None else scheme
    q, _ = scheme.grid()
    n = q.size
    return ParityTriple(np.eye(n)[::-1].astype(complex), np.diag(np.sign(q)).astype(complex))


def tmsv_position_wavefunction(q1, q2, zeta: float):
    """
    ``<q1 q2|zeta>`` as a Gaussian:
    ``exp(-[(q1-q2)^2 e^{2 zeta} + (q1+q2)^2 e^{-2 zeta}] / 4) / sqrt(pi)``.
    """
    zeta = check_zeta(zeta)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    d, s = q1 - q2, q1 + q2
    return np.exp(-(d * d * math.exp(2 * zeta) + s * s * math.exp(-2 * zeta)) / 4.0) / math.sqrt(math.pi)


def tmsv_wavefunction_series(q1, q2, zeta: float, cutoff: ModeCutoff):
    """Truncated ``sum_n tanh^n / cosh psi_n(q1) psi_n(q2)``."""
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    q2 = np.atleast_1d(np.asarray(q2, dtype=float))
    k = math.tanh(check_zeta(zeta))
    c = k ** np.arange(cutoff.dim) / math.cosh(zeta)
    return np.einsum("n,nj,nj->j", c, hermite_functions(cutoff.n_max, q1), hermite_functions(cutoff.n_max, q2))


def parity_f_closed(zeta: float) -> float:
    return 2.0 / math.pi * math.atan(math.sinh(2.0 * check_zeta(zeta)))


def parity_f_position(zeta: float, scheme: QuadratureScheme | None = None) -> float:
    """``int sign(q1) sign(q2) |<q1 q2|zeta>|^2`` on the tensor Gauss-Legendre grid."""
    zeta = check_zeta(zeta)
    scheme = QuadratureScheme.for_zeta(zeta) if scheme is None else scheme
    q, w = scheme.grid()
    psi = tmsv_position_wavefunction(q[:, None], q[None, :], zeta)
    ws = w * np.sign(q)
    return float(ws @ (psi * psi) @ ws)


def parity_f_fock(
    zeta: float, cutoff: ModeCutoff | None = None, scheme: QuadratureScheme | None = None
) -> float:
    """``<zeta|sign(q1) ⊗ sign(q2)|zeta>`` from Fock amplitudes."""
    zeta = check_zeta(zeta)
    cutoff = auto_cutoff(zeta) if cutoff is None else cutoff
    s = sign_position_operator(cutoff, scheme)
    return float(product_expectation(tmsv_amplitudes(zeta, cutoff), s, s).real)


def parity_f_quadrature(
    zeta: float,
    scheme: QuadratureScheme | None = None,
    tol: float = 1e-6,
    cutoff: ModeCutoff | None = None,
) -> float:
    """
    Position-space value of ``<Pi_x ⊗ Pi_x>``, checked against node doubling
    and against the Fock-space route.
    """
    zeta = check_zeta(zeta)
    scheme = QuadratureScheme.for_zeta(zeta) if scheme is None else scheme
    value = parity_f_position(zeta, scheme)
    finer = parity_f_position(zeta, scheme.refined())
    if abs(finer - value) > tol:
        raise ConvergenceError(
            f"position quadrature moved by {abs(finer - value):.3g} under node doubling"
        )
    fock = parity_f_fock(zeta, cutoff)
    if abs(fock - value) > tol:
        raise RouteDisagreementError(
            f"position route {value:.12g} and Fock route {fock:.12g} differ at zeta={zeta}"
        )
    return value


def parity_correlators(
    zeta: float, method: str = "closed_form", cutoff: ModeCutoff | None = None
) -> CorrelatorPair:
    """``(<Pi_z⊗Pi_z>, <Pi_x⊗Pi_x>)`` for the squeezed vacuum."""
    zeta = check_zeta(zeta)
    if method == "closed_form":
        return CorrelatorPair(1.0, parity_f_closed(zeta))
    if method == "matrix":
        cutoff = auto_cutoff(zeta) if cutoff is None else cutoff
        state = tmsv_amplitudes(zeta, cutoff)
        pz = parity_z_operator(cutoff)
        i_corr = product_expectation(state, pz, pz).real
        return CorrelatorPair(float(i_corr), parity_f_fock(zeta, cutoff))
    raise ValueError(f"unknown method {method!r}")
