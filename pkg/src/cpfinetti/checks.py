"""Cross-route checks between the dense oracle and the weight-basis code."""
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaincc

from .fock import coherent_amplitudes
from .oracle import (DenseState, check_budget, commutator_check, crop, density,
                     lambda_dense, partial_trace, tensor_power, window_padding)
from .quadrature import DEFAULT_TARGET_TAIL, cartesian_grid
from .weight_basis import (SuperpositionProfile, dense_vector, embed_dense, from_profile,
                           reduced_state, weight_state_dense)

IDENTITY_STEP = 0.25


def identity_grid(n, k, d, alphas=(), step=IDENTITY_STEP, target_tail=DEFAULT_TARGET_TAIL):
    """Origin-centered grid wide enough for every matrix element of the ``d``-cube block.

    Monomials up to total traced weight ``(n-k)(d-1)`` (plus a margin)
    against ``exp(-(n-k)|beta|^2)`` must have negligible mass outside the
    disk; the largest ``|alpha|`` in play is added on top.
    """
    m = n - k
    top = m * (d - 1) + 10
    x = brentq(lambda x: gammaincc(top + 1, x) - target_tail, 0.0, 10.0 * (top + 50))
    radius = math.sqrt(x / m) + max((abs(complex(a)) for a in alphas), default=0.0)
    return cartesian_grid(0, radius, step)


def identity_residuals(n, k, d, alphas, grid):
    """Residuals of the resolution-of-identity checks on the ``d``-cube.

    ``coherent`` evaluates ``Lambda |alpha>^{(x)n}`` exactly on the cube
    (inputs resolved to ``window_padding`` levels); ``coherent_truncated``
    feeds the ``d``-truncated vector instead and so also carries input
    truncation.  ``commutator`` is the max-norm of ``[Lambda, D^{(x)n}]``.
    """
    check_budget(n, d)
    lam = lambda_dense(n, k, d, grid)
    vac = tensor_power(coherent_amplitudes(0, d), n)
    out = {
        "vacuum": float(np.linalg.norm(lam.apply(vac).amps - vac.amps)),
        "coherent": [],
        "coherent_truncated": [],
        "commutator": [],
    }
    d_in = window_padding(n, k, d)
    for a in alphas:
        wide = tensor_power(coherent_amplitudes(a, d_in), n)
        out["coherent"].append(float(np.linalg.norm(lam.apply(wide).amps - crop(wide, d).amps)))
        short = tensor_power(coherent_amplitudes(a, d), n)
        out["coherent_truncated"].append(float(np.linalg.norm(lam.apply(short).amps - short.amps)))
        out["commutator"].append(commutator_check(n, k, a, d, grid))
    return out


def dense_profile_state(profile, n, d):
    """``sum_j weight_j |gamma_j>^{(x)n}`` on the ``d``-cube, divided by the exact norm."""
    profile = profile.merged()
    vec = sum(w * tensor_power(coherent_amplitudes(g, d), n).amps for g, w in profile.components)
    return vec / profile.norm(n)


def oracle_equivalence(profile, n, k, d, w_max):
    """Max entry gap between dense and weight-basis reduced states.

    The dense route builds the state from tensor powers, keeps its
    components along ``|w>_n`` for ``w <= w_max`` (dense multinomial
    vectors) and traces out modes with the full density matrix.
    """
    check_budget(n, d, matrix=True)
    full = dense_profile_state(profile, n, d)
    V = np.stack([weight_state_dense(n, w, d) for w in range(w_max + 1)], axis=1)
    projected = V @ (V.conj().T @ full)
    dense = partial_trace(density(DenseState(n, d, projected)), k).mat
    psi = from_profile(profile, n, w_max, max_tail=1.0)
    compact = embed_dense(reduced_state(psi, k), d)
    return float(np.max(np.abs(dense - compact)))


def span_overlap(gamma, n, d, w_max=None):
    """Fidelity between the cube-restricted ``|gamma>^{(x)n}`` and its weight-basis rebuild.

    The rebuild ``sum_w c_w |w>_n`` is restricted to the same cube, so the
    comparison sees every weight the cube can hold.
    """
    dense = tensor_power(coherent_amplitudes(gamma, d), n).amps
    psi = from_profile(SuperpositionProfile(((gamma, 1),)), n, w_max)
    rebuilt = dense_vector(psi, d)
    ov = np.vdot(dense, rebuilt)
    return float(abs(ov) ** 2 / (np.vdot(dense, dense).real * np.vdot(rebuilt, rebuilt).real))
