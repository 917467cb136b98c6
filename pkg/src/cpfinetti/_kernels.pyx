# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled coherent-overlap table.

Each row is filled by a multiplicative recurrence running outwards from the
Poisson peak, so only one ``exp``/``lgamma`` is evaluated per node and no
intermediate value can overflow.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, floor, lgamma, log, sqrt, atan2, cos, sin


def coherent_rows(const double complex[:] alphas, double m, Py_ssize_t w_max):
    """``conj(exp(-|x|^2/2) x^w / sqrt(w!))`` with ``x = sqrt(m) * alpha``."""
    cdef Py_ssize_t n_nodes = alphas.shape[0]
    out_arr = np.zeros((n_nodes, w_max + 1), dtype=np.complex128)
    cdef double complex[:, :] out = out_arr
    cdef double sm = sqrt(m)
    cdef Py_ssize_t i, w, peak
    cdef double complex x, val
    cdef double r, phi, logmag
    for i in range(n_nodes):
        x = alphas[i] * sm
        r = sqrt(x.real * x.real + x.imag * x.imag)
        if r == 0.0:
            out[i, 0] = 1.0
            continue
        x = x.real - 1j * x.imag
        peak = <Py_ssize_t> floor(r * r)
        if peak > w_max:
            peak = w_max
        phi = -atan2(alphas[i].imag, alphas[i].real) * peak
        logmag = -0.5 * r * r + peak * log(r) - 0.5 * lgamma(peak + 1.0)
        val = exp(logmag) * (cos(phi) + 1j * sin(phi))
        out[i, peak] = val
        for w in range(peak + 1, w_max + 1):
            val = val * x / sqrt(<double> w)
            out[i, w] = val
        val = out[i, peak]
        for w in range(peak, 0, -1):
            val = val * sqrt(<double> w) / x
            out[i, w - 1] = val
    return out_arr
