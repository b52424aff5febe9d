"""
Photon pseudospin operators truncated at a degeneracy level.

Level ``i`` keeps the ladder pairs ``(|2n>, |2n+1>)`` for ``n = 0..i``; the
special level :data:`FULL` keeps every pair the cutoff admits. Outside the
retained pairs the operators act as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import FockOperator, ModeCutoff

__all__ = [
    "FULL",
    "LevelError",
    "Direction",
    "SpinTriple",
    "parse_level",
    "format_level",
    "top_pair",
    "min_cutoff_for_level",
    "make_pseudospin",
    "spin_projection",
    "support_projector",
    "degeneracy_count",
]

FULL = math.inf


class LevelError(ValueError):
    """Degeneracy level does not fit the cutoff."""


def parse_level(text) -> int | float:
    """``"inf"``/``"full"`` -> :data:`FULL`, otherwise a non-negative int."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        if text == FULL:
            return FULL
        if text != int(text) or text < 0:
            raise LevelError(f"invalid degeneracy level {text!r}")
        return int(text)
    s = str(text).strip().lower()
    if s in ("inf", "full", "infinity", "∞"):
        return FULL
    try:
        value = int(s)
    except ValueError:
        raise LevelError(f"invalid degeneracy level {text!r}") from None
    if value < 0:
        raise LevelError(f"degeneracy level must be >= 0, got {value}")
    return value


def format_level(level) -> str:
    return "inf" if level == FULL else str(int(level))


def min_cutoff_for_level(level) -> int:
    if level == FULL:
        return 1
    return 2 * int(level) + 1


def top_pair(level, cutoff: ModeCutoff) -> int:
    """Index ``m`` of the last retained pair ``(|2m>, |2m+1>)``."""
    level = parse_level(level)
    if level == FULL:
        return (cutoff.n_max - 1) // 2
    if 2 * level + 1 > cutoff.n_max:
        raise LevelError(
            f"level {level} needs n_max >= {2 * level + 1}, cutoff is {cutoff.n_max}"
        )
    return level


@dataclass(frozen=True)
class Direction:
    """Unit vector given by polar angle `theta` and azimuth `phi` (radians)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("direction angles must be finite")

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True, eq=False)
class SpinTriple:
    """
    Pseudospin components at one degeneracy level.

    Stores ``s_z`` and the ladder ``s_-``; ``s_+``, ``s_x`` and ``s_y`` are
    derived from them.
    """

    sz: FockOperator
    s_minus: FockOperator
    level: int | float
    cutoff: ModeCutoff

    @property
    def s_plus(self) -> FockOperator:
        return self.s_minus.adjoint()

    @property
    def sx(self) -> FockOperator:
        return self.s_plus + self.s_minus

    @property
    def sy(self) -> FockOperator:
        return -1j * (self.s_plus - self.s_minus)

    @property
    def support(self) -> np.ndarray:
        """Fock states the triple acts on non-trivially."""
        return np.arange(2 * top_pair(self.level, self.cutoff) + 2)


def make_pseudospin(level, cutoff: ModeCutoff) -> SpinTriple:
    level = parse_level(level)
    m = top_pair(level, cutoff)
    dim = cutoff.dim
    even = 2 * np.arange(m + 1)
    odd = even + 1
    diag = np.zeros(dim)
    diag[odd] = 1.0
    diag[even] = -1.0
    sz = sp.diags(diag, 0, format="csr")
    # s_- = sum |2n><2n+1|
    s_minus = sp.csr_matrix((np.ones(m + 1), (even, odd)), shape=(dim, dim))
    return SpinTriple(
        FockOperator(cutoff, 1, sz), FockOperator(cutoff, 1, s_minus), level, cutoff
    )


def spin_projection(direction: Direction, triple: SpinTriple) -> FockOperator:
    """``cos(theta) s_z + sin(theta) (e^{i phi} s_- + e^{-i phi} s_+)``."""
    th, ph = direction.theta, direction.phi
    ladder = triple.s_minus * np.exp(1j * ph) + triple.s_plus * np.exp(-1j * ph)
    return triple.sz * math.cos(th) + ladder * math.sin(th)


def support_projector(triple: SpinTriple) -> FockOperator:
    diag = np.zeros(triple.cutoff.dim)
    diag[triple.support] = 1.0
    return FockOperator(triple.cutoff, 1, sp.diags(diag, 0, format="csr"))


def degeneracy_count(triple: SpinTriple, eigenvalue: int) -> int:
    """Number of independent ``s_z`` eigenvectors with eigenvalue +1 or -1."""
    if eigenvalue not in (1, -1):
        raise ValueError("eigenvalue must be +1 or -1")
    diag = triple.sz.matrix.diagonal().real
    return int(np.count_nonzero(diag == eigenvalue))
