"""
Truncated Fock-space linear algebra.

Single-mode spaces keep the occupation numbers ``0..n_max``. Two-mode spaces
are ordered row-major over ``(n_a, n_b)``, i.e. basis index
``n_a * (n_max + 1) + n_b``, which is exactly the ``numpy.kron`` convention.
Operators are stored as ``scipy.sparse`` CSR matrices; use
:meth:`FockOperator.toarray` for a dense view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = [
    "CutoffMismatchError",
    "ConvergenceError",
    "ModeCutoff",
    "TwoModeState",
    "FockOperator",
    "auto_cutoff",
    "annihilation",
    "creation",
    "number",
    "identity",
    "zero_operator",
    "tensor",
    "expectation",
    "product_expectation",
    "commutator",
    "operator_exponential",
    "expm_dense",
    "EXPM_TOL",
    "TAIL_TOL",
    "MIN_CUTOFF",
]

#: relative size of the last retained Taylor term in :func:`expm_dense`
EXPM_TOL = 1e-13
#: dropped TMSV probability allowed by :func:`auto_cutoff`
TAIL_TOL = 1e-12
MIN_CUTOFF = 16


class CutoffMismatchError(ValueError):
    """Operands live on different truncated spaces."""


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach its tolerance."""


@dataclass(frozen=True)
class ModeCutoff:
    """Highest retained occupation number of a single mode."""

    n_max: int

    def __post_init__(self):
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, (int, np.integer)):
            raise TypeError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def index(self, n_a: int, n_b: int) -> int:
        """Row of ``|n_a, n_b>`` in the two-mode basis."""
        if not (0 <= n_a <= self.n_max and 0 <= n_b <= self.n_max):
            raise IndexError(f"({n_a}, {n_b}) outside cutoff {self.n_max}")
        return n_a * self.dim + n_b


def auto_cutoff(zeta: float, tail: float = TAIL_TOL, floor: int = MIN_CUTOFF) -> ModeCutoff:
    """
    Smallest odd cutoff whose dropped TMSV tail ``tanh(zeta)**(2 (n_max+1))``
    is below `tail`, and never below `floor`.

    Odd cutoffs let the full pseudospin pair every retained state.
    """
    if zeta < 0:
        raise ValueError("zeta must be non-negative")
    k = math.tanh(zeta)
    n_max = floor
    if k > 0:
        # tanh^(2(n+1)) < tail  <=>  n + 1 > log(tail) / (2 log k)
        n_max = max(floor, math.floor(math.log(tail) / (2.0 * math.log(k))))
        while k ** (2 * (n_max + 1)) >= tail:
            n_max += 1
    if n_max % 2 == 0:
        n_max += 1
    return ModeCutoff(n_max)


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """
    Pure two-mode state as an amplitude table ``amplitudes[n_a, n_b]``.

    Truncated states are not renormalized, so :attr:`norm_squared` may be
    slightly below one.
    """

    cutoff: ModeCutoff
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.cutoff.dim, self.cutoff.dim):
            raise ValueError(
                f"amplitude table has shape {amps.shape}, expected "
                f"{(self.cutoff.dim, self.cutoff.dim)}"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, cutoff: ModeCutoff, n_a: int = 0, n_b: int = 0) -> "TwoModeState":
        amps = np.zeros((cutoff.dim, cutoff.dim), dtype=complex)
        cutoff.index(n_a, n_b)
        amps[n_a, n_b] = 1.0
        return cls(cutoff, amps)

    @classmethod
    def from_vector(cls, cutoff: ModeCutoff, vector) -> "TwoModeState":
        return cls(cutoff, np.asarray(vector).reshape(cutoff.dim, cutoff.dim))

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.ravel()

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.vector, self.vector).real)

    def amplitude(self, n_a: int, n_b: int) -> complex:
        return complex(self.amplitudes[n_a, n_b])


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Operator on a one- or two-mode truncated Fock space."""

    cutoff: ModeCutoff
    arity: int
    matrix: sp.csr_matrix

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError(f"arity must be 1 or 2, got {self.arity}")
        mat = sp.csr_matrix(self.matrix, dtype=complex)
        mat.eliminate_zeros()
        if mat.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {mat.shape} does not match dimension {self.dim}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_dense(cls, cutoff: ModeCutoff, array, arity: int = 1) -> "FockOperator":
        return cls(cutoff, arity, sp.csr_matrix(np.asarray(array, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.cutoff.dim**self.arity

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.cutoff, self.arity, self.matrix.conj().T)

    @property
    def H(self) -> "FockOperator":
        return self.adjoint()

    def apply(self, state):
        """Act on a `TwoModeState` (two-mode) or a plain vector."""
        if isinstance(state, TwoModeState):
            self._check_state(state)
            return TwoModeState.from_vector(self.cutoff, self.matrix @ state.vector)
        return self.matrix @ np.asarray(state, dtype=complex)

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max(initial=0.0))

    def hermiticity_error(self) -> float:
        return (self - self.adjoint()).max_abs()

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_error() < tol

    def restrict(self, indices) -> np.ndarray:
        """Dense block of rows and columns `indices`."""
        idx = np.asarray(indices)
        return self.matrix[idx][:, idx].toarray()

    def _check_compatible(self, other: "FockOperator"):
        if not isinstance(other, FockOperator):
            raise TypeError(f"expected FockOperator, got {type(other).__name__}")
        if other.cutoff != self.cutoff:
            raise CutoffMismatchError(f"cutoffs {self.cutoff.n_max} and {other.cutoff.n_max} differ")
        if other.arity != self.arity:
            raise CutoffMismatchError(f"arities {self.arity} and {other.arity} differ")

    def _check_state(self, state: TwoModeState):
        if self.arity != 2:
            raise CutoffMismatchError("state expectation needs a two-mode operator")
        if state.cutoff != self.cutoff:
            raise CutoffMismatchError(
                f"state cutoff {state.cutoff.n_max} differs from operator cutoff {self.cutoff.n_max}"
            )

    def __add__(self, other):
        self._check_compatible(other)
        return FockOperator(self.cutoff, self.arity, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check_compatible(other)
        return FockOperator(self.cutoff, self.arity, self.matrix - other.matrix)

    def __neg__(self):
        return FockOperator(self.cutoff, self.arity, -self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, FockOperator):
            return NotImplemented
        return FockOperator(self.cutoff, self.arity, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / complex(scalar))

    def __matmul__(self, other):
        self._check_compatible(other)
        return FockOperator(self.cutoff, self.arity, self.matrix @ other.matrix)


def _ladder(cutoff: ModeCutoff, offset: int) -> FockOperator:
    data = np.sqrt(np.arange(1, cutoff.dim, dtype=float))
    return FockOperator(cutoff, 1, sp.diags(data, offset, shape=(cutoff.dim, cutoff.dim), format="csr"))


def annihilation(cutoff: ModeCutoff) -> FockOperator:
    """``a|n> = sqrt(n)|n-1>``."""
    return _ladder(cutoff, 1)


def creation(cutoff: ModeCutoff) -> FockOperator:
    """``a^dagger|n> = sqrt(n+1)|n+1>``, with the transition out of ``n_max`` dropped."""
    return _ladder(cutoff, -1)


def number(cutoff: ModeCutoff) -> FockOperator:
    return FockOperator(cutoff, 1, sp.diags(np.arange(cutoff.dim, dtype=float), 0, format="csr"))


def identity(cutoff: ModeCutoff, arity: int = 1) -> FockOperator:
    return FockOperator(cutoff, arity, sp.identity(cutoff.dim**arity, format="csr"))


def zero_operator(cutoff: ModeCutoff, arity: int = 1) -> FockOperator:
    n = cutoff.dim**arity
    return FockOperator(cutoff, arity, sp.csr_matrix((n, n), dtype=complex))


def tensor(x: FockOperator, y: FockOperator) -> FockOperator:
    """Two-mode operator ``x (mode a) ⊗ y (mode b)``."""
    if x.arity != 1 or y.arity != 1:
        raise ValueError("tensor expects two single-mode operators")
    x._check_compatible(y)
    return FockOperator(x.cutoff, 2, sp.kron(x.matrix, y.matrix, format="csr"))


def expectation(state: TwoModeState, op: FockOperator) -> complex:
    """``<state|op|state>`` (no normalization)."""
    op._check_state(state)
    v = state.vector
    return complex(np.vdot(v, op.matrix @ v))


def product_expectation(state: TwoModeState, x: FockOperator, y: FockOperator) -> complex:
    """
    ``<state|x ⊗ y|state>`` without building the two-mode matrix.

    Uses ``sum(conj(C) * (x C y^T))`` over the amplitude table ``C``.
    """
    x._check_compatible(y)
    if x.arity != 1:
        raise ValueError("product_expectation expects single-mode factors")
    if state.cutoff != x.cutoff:
        raise CutoffMismatchError(
            f"state cutoff {state.cutoff.n_max} differs from operator cutoff {x.cutoff.n_max}"
        )
    c = sp.csr_matrix(state.amplitudes)
    xcy = (x.matrix @ c @ y.matrix.T).tocsr()
    return complex(c.conj().multiply(xcy).sum())


def commutator(x: FockOperator, y: FockOperator) -> FockOperator:
    x._check_compatible(y)
    return x @ y - y @ x


def expm_dense(a: np.ndarray, tol: float = EXPM_TOL, max_terms: int = 64) -> np.ndarray:
    """
    Matrix exponential by scaling and squaring with a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 1/2; the
    series stops once the newest term's 1-norm falls below
    ``tol * max(1, ||partial sum||_1)``.  Raises `ConvergenceError` if that
    takes more than `max_terms` terms.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("expm_dense needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    eye = np.eye(n, dtype=complex)
    norm = np.abs(a).sum(axis=0).max(initial=0.0)
    if norm == 0.0:
        return eye
    s = max(0, math.ceil(math.log2(norm / 0.5)))
    b = a / 2.0**s
    result = eye.copy()
    term = eye
    for k in range(1, max_terms + 1):
        term = term @ b / k
        result += term
        if np.abs(term).sum(axis=0).max() <= tol * max(1.0, np.abs(result).sum(axis=0).max()):
            break
    else:
        raise ConvergenceError(f"Taylor series did not reach {tol:g} within {max_terms} terms")
    for _ in range(s):
        result = result @ result
    return result


def operator_exponential(x: FockOperator, scale: float, tol: float = EXPM_TOL) -> FockOperator:
    """
    ``exp(scale * x)``.

    The sparsity graph of `x` is split into connected components (e.g. the
    conserved ``n_a - n_b`` sectors of a pair-creation generator); each block
    is exponentiated densely with :func:`expm_dense` and the result keeps the
    same block structure.
    """
    mat = (x.matrix * complex(scale)).tocsr()
    n = mat.shape[0]
    if mat.nnz and not np.all(np.isfinite(mat.data)):
        raise ValueError("operator has non-finite entries")
    if mat.nnz == 0:
        return identity(x.cutoff, x.arity)
    pattern = abs(mat) + abs(mat).T
    n_comp, labels = connected_components(pattern, directed=False)
    rows, cols, vals = [], [], []
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n_comp + 1))
    for c in range(n_comp):
        idx = order[bounds[c] : bounds[c + 1]]
        if idx.size == 1:
            block = np.exp(np.array([[mat[idx[0], idx[0]]]]))
        else:
            block = expm_dense(mat[idx][:, idx].toarray(), tol=tol)
        r, q = np.nonzero(block)
        rows.append(idx[r])
        cols.append(idx[q])
        vals.append(block[r, q])
    out = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return FockOperator(x.cutoff, x.arity, out)
