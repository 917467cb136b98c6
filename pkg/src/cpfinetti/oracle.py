"""Brute-force dense computations on ``(C^d)^{(x)n}``.

Word ``x_1 ... x_n`` sits at big-endian base-``d`` index (``x_1`` most
significant), matching :func:`cpfinetti.weight_basis.word_index`.  These
routines are slow on purpose: they are the ground truth the compact
weight-basis code is checked against.
"""
from dataclasses import dataclass
import math
import os
import struct

import numpy as np

from .errors import InvalidInputError, ResourceError
from .fock import FockVector, coherent_series, displacement_matrix, padded_dimension
from .quadrature import tree_sum

DEFAULT_BUDGET = 2 ** 22
MATRIX_MAX_MODES = 3
MATRIX_MAX_DIM = 16


def budget() -> int:
    """Amplitude cap, overridable through ``DEFINETTI_BUDGET``."""
    raw = os.environ.get("DEFINETTI_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(n, d, matrix=False):
    size = d ** n
    if size > budget():
        raise ResourceError(f"d^n = {d}^{n} = {size} amplitudes exceeds budget {budget()}")
    if matrix and (n > MATRIX_MAX_MODES or d > MATRIX_MAX_DIM) and size * size > budget():
        raise ResourceError(f"full {size}x{size} matrix not formed for n={n}, d={d}")


@dataclass(frozen=True)
class DenseState:
    n: int
    d: int
    amps: np.ndarray

    def __post_init__(self):
        check_budget(self.n, self.d)
        object.__setattr__(self, "amps", np.asarray(self.amps, dtype=complex))
        if self.amps.shape != (self.d ** self.n,):
            raise InvalidInputError("amps must have length d^n")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((self.d,) * self.n)


@dataclass(frozen=True)
class DenseOperator:
    n: int
    d: int
    mat: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mat", np.asarray(self.mat, dtype=complex))
        size = self.d ** self.n
        if self.mat.shape != (size, size):
            raise InvalidInputError("operator must be d^n x d^n")
        if self.hermitian and np.max(np.abs(self.mat - self.mat.conj().T), initial=0.0) > 1e-12:
            raise InvalidInputError("operator flagged Hermitian is not")

    def apply(self, state: DenseState) -> DenseState:
        return DenseState(self.n, self.d, self.mat @ state.amps)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))


def tensor_power(v: FockVector, n) -> DenseState:
    if int(n) != n or n < 1:
        raise InvalidInputError("n must be a positive integer")
    check_budget(n, v.dim)
    out = np.ones(1, dtype=complex)
    for _ in range(n):
        out = np.kron(out, v.amps)
    return DenseState(n, v.dim, out)


def density(state: DenseState) -> DenseOperator:
    check_budget(state.n, state.d, matrix=True)
    return DenseOperator(state.n, state.d, np.outer(state.amps, state.amps.conj()), True)


def partial_trace(rho: DenseOperator, k) -> DenseOperator:
    """Trace out the last ``n - k`` modes."""
    if not (1 <= k < rho.n):
        raise InvalidInputError(f"need 1 <= k < n, got k={k} n={rho.n}")
    dk, dr = rho.d ** k, rho.d ** (rho.n - k)
    t = rho.mat.reshape(dk, dr, dk, dr)
    return DenseOperator(k, rho.d, np.einsum("arbr->ab", t))


def partial_trace_pure(state: DenseState, k) -> DenseOperator:
    """Reduced state of a pure state without forming the full density matrix."""
    if not (1 <= k < state.n):
        raise InvalidInputError(f"need 1 <= k < n, got k={k} n={state.n}")
    psi = state.amps.reshape(state.d ** k, -1)
    return DenseOperator(k, state.d, psi @ psi.conj().T)


def _node_products(nodes, d, m):
    """Rows ``|alpha_i>^{(x)m}`` truncated to ``d``, shape ``(len(nodes), d^m)``."""
    single = np.stack([coherent_series(complex(a), d) for a in nodes])
    out = np.ones((len(nodes), 1), dtype=complex)
    for _ in range(m):
        out = (out[:, :, None] * single[:, None, :]).reshape(len(nodes), -1)
    return out


class LambdaOperator:
    """``((n-k)/pi) sum_i w_i I_{d^k} (x) (|alpha_i><alpha_i|)^{(x)(n-k)}``.

    Applied to vectors node by node as rank-one contractions on the traced
    modes; the full ``d^n x d^n`` matrix is only formed on request.
    """

    def __init__(self, n, k, d, grid):
        if int(n) != n or n < 1 or not (0 <= k < n):
            raise InvalidInputError(f"need n >= 1 and 0 <= k < n, got n={n} k={k}")
        check_budget(n, d)
        self.n, self.k, self.d, self.grid = n, k, d, grid
        self.m = n - k
        self._B = [_node_products(grid.nodes[s], d, self.m) for s in grid.chunks()]

    def _weights(self):
        return [self.grid.weights[s] for s in self.grid.chunks()]

    def traced_block(self) -> np.ndarray:
        """The ``d^m x d^m`` factor acting on the traced modes."""
        parts = [(self.m / math.pi) * (B.T * w) @ B.conj()
                 for B, w in zip(self._B, self._weights())]
        return tree_sum(parts)

    def apply(self, state: DenseState) -> DenseState:
        """``Lambda |state>``.

        A state given at a larger single-mode dimension than the operator is
        read as a better-resolved input: the result is the exact ``d``-cube
        block of ``Lambda |state>``, free of input truncation once the
        traced modes reach ``window_padding`` levels.
        """
        if state.n != self.n or state.d < self.d:
            raise InvalidInputError("state shape does not match operator")
        d_in = state.d
        T = state.tensor()[(slice(0, self.d),) * self.k]
        V = T.reshape(self.d ** self.k, d_in ** self.m)
        parts = []
        for s, B, w in zip(self.grid.chunks(), self._B, self._weights()):
            B_in = B if d_in == self.d else _node_products(self.grid.nodes[s], d_in, self.m)
            coeff = (V @ B_in.conj().T) * w
            parts.append(coeff @ B)
        out = (self.m / math.pi) * tree_sum(parts)
        return DenseState(self.n, self.d, out.reshape(-1))

    def matrix(self) -> DenseOperator:
        check_budget(self.n, self.d, matrix=True)
        full = np.kron(np.eye(self.d ** self.k), self.traced_block())
        full = 0.5 * (full + full.conj().T)
        return DenseOperator(self.n, self.d, full, True)


def lambda_dense(n, k, d, grid) -> LambdaOperator:
    return LambdaOperator(n, k, d, grid)


def kron_power(mat, m) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for _ in range(m):
        out = np.kron(out, mat)
    return out


def window_padding(n, k, d) -> int:
    """Traced-mode levels that feed the ``d``-cube block of ``Lambda``.

    ``Lambda`` conserves total excitation on the traced modes, so an output
    word inside the cube only couples to inputs with letters below this.
    """
    return (n - k) * (d - 1) + 1


def crop(state: DenseState, d) -> DenseState:
    return DenseState(state.n, d, state.tensor()[(slice(0, d),) * state.n].reshape(-1))


def commutator_padding(n, k, d, alpha) -> int:
    """Padded single-mode dimension for the commutator check.

    Large enough that the traced-mode projector never maps an inner word
    outside the padded cube, plus the displacement margin.
    """
    return padded_dimension(alpha, window_padding(n, k, d))


def commutator_check(n, k, alpha, d, grid, d_pad=None) -> float:
    """``max |Lambda D^{(x)n} - D^{(x)n} Lambda|`` over the ``d``-cube block.

    Products are formed in a padded space so truncation only enters through
    displacement leakage beyond ``d_pad``.  With ``Lambda = I_k (x) M`` the
    commutator is ``D^{(x)k} (x) [M, D^{(x)(n-k)}]`` and its max-norm factors
    into the two Kronecker pieces.
    """
    alpha = complex(alpha)
    if int(n) != n or n < 1 or not (0 <= k < n):
        raise InvalidInputError(f"need n >= 1 and 0 <= k < n, got n={n} k={k}")
    check_budget(n, d)
    if alpha == 0:
        return 0.0
    m = n - k
    if d_pad is None:
        d_pad = commutator_padding(n, k, d, alpha)
    check_budget(m, d_pad)
    if (d_pad * d) ** m > 64 * budget():
        raise ResourceError(f"commutator block {d ** m}x{d_pad ** m} exceeds budget")
    D = displacement_matrix(alpha, d_pad).entries
    inner = np.array([_inner_index(idx, d, d_pad, m) for idx in range(d ** m)])
    parts = []
    for s in grid.chunks():
        B = _node_products(grid.nodes[s], d_pad, m)
        parts.append((m / math.pi) * (B[:, inner].T * grid.weights[s]) @ B.conj())
    rows = tree_sum(parts)
    comm = rows @ kron_power(D[:, :d], m) - kron_power(D[:d, :], m) @ rows.conj().T
    factor = float(np.max(np.abs(D[:d, :d]))) ** k
    return factor * float(np.max(np.abs(comm)))


def _inner_index(idx, d, d_pad, m):
    digits = []
    for _ in range(m):
        idx, r = divmod(idx, d)
        digits.append(r)
    out = 0
    for x in reversed(digits):
        out = out * d_pad + x
    return out


def commutator_bruteforce(n, k, alpha, d, grid, d_pad) -> float:
    """Same quantity as :func:`commutator_check` from full padded matrices."""
    check_budget(n, d_pad, matrix=True)
    lam = LambdaOperator(n, k, d_pad, grid).matrix().mat
    Dn = kron_power(displacement_matrix(alpha, d_pad).entries, n)
    comm = lam @ Dn - Dn @ lam
    inner = np.array([_inner_index(i, d, d_pad, n) for i in range(d ** n)])
    return float(np.max(np.abs(comm[np.ix_(inner, inner)])))


_HEADER = struct.Struct("<4sIII")


def dump(obj, path):
    """Binary dump: header ``(b'CPFD', n, d, kind)`` then little-endian complex64 pairs.

    ``kind`` is 0 for a state vector and 1 for an operator (row-major).
    """
    if isinstance(obj, DenseState):
        kind, data = 0, obj.amps
    elif isinstance(obj, DenseOperator):
        kind, data = 1, obj.mat
    else:
        raise InvalidInputError("can only dump DenseState or DenseOperator")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(b"CPFD", obj.n, obj.d, kind))
        fh.write(np.ascontiguousarray(data, dtype="<c8").tobytes())


def load(path):
    with open(path, "rb") as fh:
        magic, n, d, kind = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != b"CPFD":
            raise InvalidInputError(f"{path} is not a dense dump")
        data = np.frombuffer(fh.read(), dtype="<c8").astype(complex)
    if kind == 0:
        return DenseState(n, d, data)
    size = d ** n
    return DenseOperator(n, d, data.reshape(size, size))
