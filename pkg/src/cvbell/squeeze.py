"""Two-mode squeezed vacuum and the squeeze unitary ``S(zeta) = exp(zeta (a†b† - ab))``."""

from __future__ import annotations

import math

import numpy as np

from .fock import (
    FockOperator,
    ModeCutoff,
    TwoModeState,
    annihilation,
    creation,
    operator_exponential,
    tensor,
)

__all__ = [
    "check_zeta",
    "schmidt_ratio",
    "tmsv_amplitudes",
    "truncation_weight",
    "squeeze_generator",
    "squeeze_unitary",
    "conjugate_observable",
    "apply_pair_creation_exponential",
]


def check_zeta(zeta: float) -> float:
    zeta = float(zeta)
    if not math.isfinite(zeta) or zeta < 0:
        raise ValueError(f"squeezing parameter must be finite and >= 0, got {zeta}")
    return zeta


def schmidt_ratio(zeta: float) -> float:
    """``K = tanh(zeta)``, the ratio of consecutive Schmidt amplitudes."""
    return math.tanh(check_zeta(zeta))


def tmsv_amplitudes(zeta: float, cutoff: ModeCutoff) -> TwoModeState:
    """``sum_n tanh(zeta)^n / cosh(zeta) |n n>`` truncated at the cutoff, unnormalized."""
    k = schmidt_ratio(zeta)
    n = np.arange(cutoff.dim)
    amps = np.zeros((cutoff.dim, cutoff.dim), dtype=complex)
    amps[n, n] = k**n / math.cosh(zeta)
    return TwoModeState(cutoff, amps)


def truncation_weight(zeta: float, cutoff: ModeCutoff) -> float:
    """Probability the truncated TMSV drops: ``tanh(zeta)^(2 (n_max + 1))``."""
    return schmidt_ratio(zeta) ** (2 * (cutoff.n_max + 1))


def squeeze_generator(cutoff: ModeCutoff) -> FockOperator:
    """Anti-Hermitian ``a†b† - ab`` on the truncated two-mode space."""
    a, ad = annihilation(cutoff), creation(cutoff)
    return tensor(ad, ad) - tensor(a, a)


def squeeze_unitary(zeta: float, cutoff: ModeCutoff) -> FockOperator:
    return operator_exponential(squeeze_generator(cutoff), check_zeta(zeta))


def conjugate_observable(
    op: FockOperator, zeta: float, unitary: FockOperator | None = None
) -> FockOperator:
    """
    ``S(zeta)^† op S(zeta)``, whose vacuum expectation equals the TMSV
    expectation of `op`.

    Pass a precomputed `unitary` to reuse it across observables.
    """
    if op.arity != 2:
        raise ValueError("conjugate_observable needs a two-mode operator")
    s = squeeze_unitary(zeta, op.cutoff) if unitary is None else unitary
    return s.adjoint() @ op @ s


def apply_pair_creation_exponential(k: float, state: TwoModeState) -> TwoModeState:
    """
    ``exp(k a†b†)|state>``.

    The truncated ``a†b†`` is nilpotent, so the series is summed exactly
    (at most ``n_max + 1`` terms).
    """
    if not (0.0 <= k < 1.0):
        raise ValueError(f"k must lie in [0, 1), got {k}")
    c = state.amplitudes
    dim = state.cutoff.dim
    n = np.arange(dim - 1)
    weights = np.sqrt(np.outer(n + 1, n + 1))
    result = c.copy()
    term = c.copy()
    for j in range(1, dim):
        shifted = np.zeros_like(term)
        # (a†b†) C: C'[na+1, nb+1] = sqrt((na+1)(nb+1)) C[na, nb]
        shifted[1:, 1:] = weights * term[:-1, :-1] * (k / j)
        term = shifted
        if not term.any():
            break
        result = result + term
    return TwoModeState(state.cutoff, result)
