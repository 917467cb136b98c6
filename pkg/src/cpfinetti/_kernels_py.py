"""Pure-numpy fallback for :mod:`cpfinetti._kernels`."""
import numpy as np
from scipy.special import gammaln


def coherent_rows(alphas, m, w_max):
    """``conj(exp(-|x|^2/2) x^w / sqrt(w!))`` with ``x = sqrt(m) * alpha``."""
    x = np.asarray(alphas, dtype=complex) * np.sqrt(m)
    w = np.arange(w_max + 1)
    r = np.abs(x)
    safe = np.where(r > 0, r, 1.0)
    logmag = (-0.5 * r ** 2)[:, None] + np.log(safe)[:, None] * w - 0.5 * gammaln(w + 1)
    rows = np.exp(logmag - 1j * np.angle(x)[:, None] * w)
    rows[r == 0, 1:] = 0.0
    rows[r == 0, 0] = 1.0
    return rows
