"""Compact representation of the coherent power span.

The span of ``|gamma>^{(x)n}`` has the orthonormal basis ``|w>_n`` (total
excitation ``w`` spread multinomially over the ``n`` modes), so a state in
it is a coefficient vector ``c_w``.  ``|gamma>^{(x)n}`` itself becomes the
single-mode coherent series at amplitude ``sqrt(n) gamma``.  Everything
here costs a polynomial in ``w_max`` and nothing in ``n``.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import gammainc, gammaln

from . import kernels
from .errors import InvalidInputError, TruncationError
from .fock import _check_alpha, coherent_series

DEFAULT_MAX_TAIL = 1e-9
CHOOSER_TAIL = 1e-10
W_MAX_CAP = 4096


@dataclass(frozen=True)
class SuperpositionProfile:
    """``|Psi> ~ sum_j weight_j |gamma_j>^{(x)n}``."""

    components: tuple

    def __post_init__(self):
        comps = tuple((_check_alpha(g), _check_alpha(w)) for g, w in self.components)
        if not comps:
            raise InvalidInputError("profile needs at least one component")
        if all(w == 0 for _, w in comps):
            raise InvalidInputError("profile has no nonzero weight")
        object.__setattr__(self, "components", comps)

    @property
    def gammas(self):
        return np.array([g for g, _ in self.components])

    @property
    def weights(self):
        return np.array([w for _, w in self.components])

    def merged(self) -> "SuperpositionProfile":
        """Coincident ``gamma`` values combined by summing their weights."""
        acc = {}
        for g, w in self.components:
            acc[g] = acc.get(g, 0) + w
        comps = [(g, w) for g, w in acc.items() if w != 0]
        if not comps:
            raise InvalidInputError("profile weights cancel exactly")
        return SuperpositionProfile(tuple(comps))

    def gram(self, n) -> np.ndarray:
        """Exact overlaps ``<gamma_i|gamma_j>^n``."""
        g = self.gammas
        expo = n * (np.conj(g)[:, None] * g[None, :]
                    - 0.5 * np.abs(g)[:, None] ** 2 - 0.5 * np.abs(g)[None, :] ** 2)
        return np.exp(expo)

    def norm(self, n) -> float:
        w = self.weights
        return math.sqrt(max(float(np.real(np.conj(w) @ self.gram(n) @ w)), 0.0))


@dataclass(frozen=True)
class CoherentPowerState:
    n: int
    w_max: int
    c: np.ndarray
    tail_mass: float = field(default=0.0)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("n must be >= 1")
        object.__setattr__(self, "c", np.array(self.c, dtype=complex))
        if self.c.shape != (self.w_max + 1,):
            raise InvalidInputError("c must have length w_max + 1")
        self.c.setflags(write=False)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.c, self.c).real)


@dataclass(frozen=True)
class WeightDensityOperator:
    k: int
    w_max: int
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", np.array(self.mat, dtype=complex))
        if self.mat.shape != (self.w_max + 1, self.w_max + 1):
            raise InvalidInputError("mat must be (w_max+1) x (w_max+1)")
        self.mat.setflags(write=False)

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.mat - self.mat.conj().T)))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.mat + self.mat.conj().T)
        return float(np.linalg.eigvalsh(h)[0])


def product_coefficients(gamma, n, w_max) -> np.ndarray:
    """Weight coefficients of ``|gamma>^{(x)n}``: the coherent series at ``sqrt(n) gamma``."""
    return coherent_series(math.sqrt(n) * complex(gamma), w_max + 1)


def _tail_bound(profile, n, W, norm):
    # Minkowski bound on the discarded norm, squared.
    lam = n * np.abs(profile.gammas) ** 2
    tails = gammainc(W + 1, lam)
    return (float(np.sum(np.abs(profile.weights) * np.sqrt(tails))) / norm) ** 2


def choose_w_max(profile, n, threshold=CHOOSER_TAIL, cap=W_MAX_CAP) -> int:
    """Smallest ``W`` whose discarded weight mass is provably below ``threshold``."""
    profile = profile.merged()
    norm = profile.norm(n)
    W = 0
    while W < cap and _tail_bound(profile, n, W, norm) > threshold:
        W += 1
    return W


def from_profile(profile, n, w_max=None, max_tail=DEFAULT_MAX_TAIL) -> CoherentPowerState:
    """Normalized weight coefficients of ``sum_j weight_j |gamma_j>^{(x)n}``.

    The norm comes from the exact Gram matrix of the components, so the
    returned ``c`` has squared norm ``1 - tail_mass`` with ``tail_mass`` the
    weight mass above ``w_max``.  Raises :class:`TruncationError` when that
    mass exceeds ``max_tail``.
    """
    if int(n) != n or n < 1:
        raise InvalidInputError("n must be a positive integer")
    profile = profile.merged()
    if w_max is None:
        w_max = choose_w_max(profile, n)
    elif w_max < 0:
        raise InvalidInputError("w_max must be nonnegative")
    norm = profile.norm(n)
    if norm == 0.0:
        raise InvalidInputError("profile state has zero norm")
    c = np.zeros(w_max + 1, dtype=complex)
    for g, wt in profile.components:
        c += wt * product_coefficients(g, n, w_max)
    c /= norm
    tail_mass = max(0.0, 1.0 - float(np.vdot(c, c).real))
    if tail_mass > max_tail:
        raise TruncationError(
            f"weight tail {tail_mass:.3e} above {max_tail:.1e} at w_max={w_max}",
            choose_w_max(profile, n, threshold=max_tail))
    return CoherentPowerState(int(n), int(w_max), c, tail_mass)


def _compositions(w, n, d):
    """Words ``y`` of length ``n`` with ``sum(y) == w`` and every ``y_i < d``."""
    if n == 1:
        if w < d:
            yield (w,)
        return
    for first in range(min(w, d - 1), -1, -1):
        for rest in _compositions(w - first, n - 1, d):
            yield (first,) + rest


def word_index(word, d) -> int:
    """Big-endian base-``d`` index of ``word`` (first mode most significant)."""
    idx = 0
    for x in word:
        idx = idx * d + x
    return idx


def weight_state_cube(n, w, d) -> np.ndarray:
    """Components of ``|w>_n`` on the words with every letter below ``d``.

    Not normalized when ``w >= d``; the missing words leave the cube.
    """
    vec = np.zeros(d ** n, dtype=complex)
    log_pref = 0.5 * (gammaln(w + 1) - w * math.log(n))
    for y in _compositions(w, n, d):
        vec[word_index(y, d)] = math.exp(log_pref - 0.5 * sum(gammaln(np.array(y) + 1)))
    return vec


def weight_state_dense(n, w, d) -> np.ndarray:
    """Dense amplitude vector of ``|w>_n`` in ``(C^d)^{(x)n}``."""
    if n < 1 or w < 0:
        raise InvalidInputError("need n >= 1 and w >= 0")
    if d <= w:
        raise InvalidInputError(f"d={d} cannot hold weight w={w}")
    return weight_state_cube(n, w, d)


def split_amplitude(n, k, w, j) -> float:
    """Coefficient of ``|j>_k |w-j>_{n-k}`` in ``|w>_n``."""
    if not (1 <= k < n) or not (0 <= j <= w):
        raise InvalidInputError(f"need 1 <= k < n and 0 <= j <= w, got n={n} k={k} w={w} j={j}")
    return float(_split_table(n, k, w)[j, w - j])


def _split_table(n, k, w_max) -> np.ndarray:
    """``S[j, m] = split_amplitude(n, k, j+m, j)`` for ``j + m <= w_max``, else 0."""
    j = np.arange(w_max + 1)
    J, M = np.meshgrid(j, j, indexing="ij")
    W = J + M
    p, q = k / n, (n - k) / n
    logs = 0.5 * (gammaln(W + 1) - gammaln(J + 1) - gammaln(M + 1)
                  + J * math.log(p) + M * math.log(q))
    return np.where(W <= w_max, np.exp(logs), 0.0)


def split_matrix(psi: CoherentPowerState, k) -> np.ndarray:
    """``A[j, m]``: amplitude of ``|j>_k |m>_{n-k}`` in ``psi``.

    The reduced state on ``k`` modes is ``A A^dag``.
    """
    if not (1 <= k < psi.n):
        raise InvalidInputError(f"need 1 <= k < n, got k={k} n={psi.n}")
    W = psi.w_max
    S = _split_table(psi.n, k, W)
    idx = np.add.outer(np.arange(W + 1), np.arange(W + 1))
    cext = np.concatenate([psi.c, np.zeros(W + 1, dtype=complex)])
    return S * cext[idx]


def reduced_state(psi: CoherentPowerState, k) -> WeightDensityOperator:
    A = split_matrix(psi, k)
    return WeightDensityOperator(k, psi.w_max, A @ A.conj().T)


def coherent_row(alpha, m, w_max) -> np.ndarray:
    """Overlaps ``<alpha|^{(x)m} |w>_m`` for ``w = 0..w_max``."""
    alpha = _check_alpha(alpha)
    if int(m) != m or m < 1:
        raise InvalidInputError("m must be a positive integer")
    return np.conj(coherent_series(math.sqrt(m) * alpha, w_max + 1))


def coherent_rows(alphas, m, w_max) -> np.ndarray:
    """Stack of :func:`coherent_row` over many amplitudes, shape ``(len(alphas), w_max+1)``."""
    if int(m) != m or m < 1:
        raise InvalidInputError("m must be a positive integer")
    return kernels.coherent_rows(alphas, m, w_max)


def embed_dense(rho: WeightDensityOperator, d) -> np.ndarray:
    """``sum_{jj'} mat[j,j'] |j>_k <j'|_k`` as a ``d^k x d^k`` matrix."""
    V = np.stack([weight_state_cube(rho.k, j, d) for j in range(rho.w_max + 1)], axis=1)
    return V @ rho.mat @ V.conj().T


def dense_vector(psi: CoherentPowerState, d) -> np.ndarray:
    """``sum_w c_w |w>_n`` restricted to the ``d``-cube."""
    out = np.zeros(d ** psi.n, dtype=complex)
    for w, cw in enumerate(psi.c):
        if cw != 0:
            out += cw * weight_state_cube(psi.n, w, d)
    return out


def weighted_subspace_dimension(n, w) -> int:
    """Dimension of the symmetric span of the words of total weight ``w``.

    One direction per permutation orbit, i.e. the number of partitions of
    ``w`` into at most ``n`` parts.  Grows like ``w^(n-1)``, whereas the
    coherent power span keeps a single direction ``|w>_n`` per weight.
    """
    # At most n parts <=> parts of size at most n (conjugate partition).
    p = [1] + [0] * w
    for part in range(1, n + 1):
        for m in range(part, w + 1):
            p[m] += p[m - part]
    return p[w]
