"""Single-mode truncated Fock space.

Basis index ``i`` of a :class:`FockVector` is the number state ``|i>``.
Factorials are always handled through ``gammaln`` so that indices of a few
hundred stay finite.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc, gammaln

from .errors import InvalidInputError

MAX_TRUNCATION = 512


@dataclass(frozen=True)
class FockVector:
    dim: int
    amps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amps", np.array(self.amps, dtype=complex))
        if self.dim < 1 or self.amps.shape != (self.dim,):
            raise InvalidInputError("FockVector needs dim >= 1 and amps of length dim")
        self.amps.setflags(write=False)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


@dataclass(frozen=True)
class ModeOperator:
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.array(self.entries, dtype=complex))
        if self.entries.shape != (self.dim, self.dim):
            raise InvalidInputError("ModeOperator entries must be dim x dim")
        if not np.all(np.isfinite(self.entries)):
            raise InvalidInputError("ModeOperator entries must be finite")
        self.entries.setflags(write=False)

    def __matmul__(self, other):
        if isinstance(other, ModeOperator):
            return ModeOperator(self.dim, self.entries @ other.entries)
        if isinstance(other, FockVector):
            return FockVector(self.dim, self.entries @ other.amps)
        return self.entries @ other


def _check_alpha(alpha) -> complex:
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvalidInputError(f"alpha must be finite, got {alpha!r}")
    return alpha


def _check_dim(d, minimum=1) -> int:
    if int(d) != d or d < minimum:
        raise InvalidInputError(f"truncation must be an integer >= {minimum}, got {d!r}")
    return int(d)


def coherent_series(alpha: complex, length: int) -> np.ndarray:
    """``exp(-|alpha|^2/2) alpha^i / sqrt(i!)`` for ``i < length``.

    Built from log-magnitude and phase so large ``i`` and ``|alpha|`` never
    overflow.  Shared by the weight-basis code, which evaluates the same
    series at ``sqrt(n) * gamma``.
    """
    i = np.arange(length)
    r = abs(alpha)
    out = np.zeros(length, dtype=complex)
    if r == 0.0:
        out[0] = 1.0
        return out
    logmag = -0.5 * r * r + i * math.log(r) - 0.5 * gammaln(i + 1)
    out[:] = np.exp(logmag + 1j * i * math.atan2(alpha.imag, alpha.real))
    return out


def coherent_amplitudes(alpha, d) -> FockVector:
    """Truncated coherent state ``|alpha>`` on ``d`` number states."""
    alpha = _check_alpha(alpha)
    d = _check_dim(d)
    return FockVector(d, coherent_series(alpha, d))


def annihilation(d) -> ModeOperator:
    d = _check_dim(d, minimum=2)
    a = np.zeros((d, d), dtype=complex)
    i = np.arange(1, d)
    a[i - 1, i] = np.sqrt(i)
    return ModeOperator(d, a)


def tail(alpha, d) -> float:
    """Probability mass of ``|alpha>`` on number states ``i >= d``.

    Poisson upper tail, which equals the regularized lower incomplete gamma
    function ``P(d, |alpha|^2)``.
    """
    alpha = _check_alpha(alpha)
    d = _check_dim(d)
    return float(gammainc(d, abs(alpha) ** 2))


def padded_dimension(alpha, d) -> int:
    return d + math.ceil(10 * abs(alpha) ** 2) + 20


def displacement_matrix(alpha, d, d_pad=None) -> ModeOperator:
    """Top-left ``d x d`` block of ``exp(alpha a^dag - conj(alpha) a)``.

    The exponential is taken at ``d_pad`` (default ``padded_dimension``) so
    the cropped block is insensitive to the truncation edge.
    """
    alpha = _check_alpha(alpha)
    d = _check_dim(d)
    if d_pad is None:
        d_pad = padded_dimension(alpha, d)
    elif d_pad < d:
        raise InvalidInputError("d_pad must be at least d")
    a = annihilation(max(d_pad, 2)).entries
    gen = alpha * a.conj().T - alpha.conjugate() * a
    return ModeOperator(d, expm(gen)[:d, :d].copy())


def choose_truncation(alpha_max, threshold=1e-14, cap=MAX_TRUNCATION) -> int:
    """Smallest ``d`` with ``tail(alpha_max, d) <= threshold``, capped at ``cap``."""
    lam = abs(_check_alpha(alpha_max)) ** 2
    d = 1
    while d < cap and gammainc(d, lam) > threshold:
        d += 1
    return d
