import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from conftest import even_cat, product
from cpfinetti.definetti import (DeFinettiMeasure, conditional_state, measure_nu, mixture_state,
                                 node_sums, nuclear_norm, pad, trace_norm, verify_bound)
from cpfinetti.errors import InvalidInputError
from cpfinetti.fock import coherent_amplitudes
from cpfinetti.oracle import tensor_power
from cpfinetti.quadrature import profile_adapted_grid
from cpfinetti.weight_basis import SuperpositionProfile, from_profile, reduced_state


def product_delta(n, k):
    """Full-convention distance for ``|beta>^{(x)n}``: the mixture is a displaced thermal state."""
    return k * (3 * n - k) / (n * (n + k))


def check_decomposition(rep):
    assert rep.delta_full <= rep.zeta + rep.eta + rep.theta + 1e-9
    assert abs(rep.zeta - rep.eta) <= 1e-12
    assert rep.delta_half == rep.delta_full / 2


def test_vacuum_conditional_state():
    n, k, alpha = 5, 2, 0.3 - 0.4j
    psi = from_profile(product(0), n, 6)
    v = conditional_state(psi, k, alpha)
    assert abs(v[0] - math.sqrt((n - k) / math.pi) * math.exp(-(n - k) * abs(alpha) ** 2 / 2)) < 1e-15
    assert np.all(v[1:] == 0)


@pytest.mark.parametrize("alpha", [0.0, 0.4 + 0.3j, -0.8j])
def test_conditional_state_matches_dense_contraction(alpha):
    n, k, d = 3, 1, 22
    p = SuperpositionProfile(((0.6, 1.0), (-0.3 + 0.5j, 0.7j)))
    dense = sum(w * tensor_power(coherent_amplitudes(g, d), n).amps for g, w in p.components)
    dense = dense.reshape(d, d * d) / p.norm(n)
    bra = tensor_power(coherent_amplitudes(alpha, d), n - k).amps.conj()
    ref = math.sqrt((n - k) / math.pi) * dense @ bra
    psi = from_profile(p, n, d - 1)
    assert np.max(np.abs(conditional_state(psi, k, alpha) - ref)) < 1e-12


def test_product_conditional_closed_form():
    n, k, beta, alpha = 3, 1, 0.5 + 0.2j, -0.1 + 0.3j
    psi = from_profile(product(beta), n, 30)
    v = conditional_state(psi, k, alpha)
    rho = np.outer(v, v.conj())
    b = coherent_amplitudes(beta, 31).amps
    ref = (n - k) / math.pi * math.exp(-(n - k) * abs(alpha - beta) ** 2) * np.outer(b, b.conj())
    assert np.max(np.abs(rho - ref)) < 1e-13


def test_measure_closed_form_and_mass():
    n, k, beta = 8, 1, 0.5
    # Amplitude-level comparison: the weight tail has to be negligible, not just 1e-10.
    psi = from_profile(product(beta), n, 60)
    grid = profile_adapted_grid(product(beta), n, k)
    mu = measure_nu(psi, k, grid)
    ref = (n - k) / math.pi * np.exp(-n * np.abs(grid.nodes - beta) ** 2)
    assert np.max(np.abs(mu.nu - ref)) < 1e-12
    assert abs(mu.total_mass - (n - k) / n) < 1e-9


def test_mixture_trace_equals_mass():
    psi = from_profile(even_cat(0.8), 6)
    grid = profile_adapted_grid(even_cat(0.8), 6, 2)
    mu = measure_nu(psi, 2, grid)
    mix = mixture_state(mu, 2, 60)
    assert abs(mix.trace - mu.total_mass) < 1e-10
    assert mix.min_eigenvalue() > -1e-12


def test_measure_rejects_negative_density():
    grid = profile_adapted_grid(product(0), 4, 1)
    with pytest.raises(InvalidInputError):
        DeFinettiMeasure(grid, -np.ones(len(grid)), 0.0)
    tiny = DeFinettiMeasure(grid, np.full(len(grid), -1e-13), 0.0)
    assert np.all(tiny.nu == 0)


@pytest.mark.parametrize("n", [8, 16])
def test_completeness(n):
    psi = from_profile(even_cat(), n)
    grid = profile_adapted_grid(even_cat(), n, 1).halved()
    sums = node_sums(pad(psi, psi.w_max + 20), 1, grid)
    rho = reduced_state(pad(psi, psi.w_max + 20), 1).mat
    assert trace_norm(0.5 * (sums.completeness + sums.completeness.conj().T) - rho) < 1e-6


def test_trace_norm_known_values(rng):
    assert trace_norm(np.diag([0.5, -0.25, 0.0])) == pytest.approx(0.75)
    x = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = x + x.conj().T
    assert trace_norm(h) == pytest.approx(np.sum(np.abs(np.linalg.eigvalsh(h))), rel=1e-12)
    assert nuclear_norm(h) == pytest.approx(trace_norm(h), rel=1e-12)
    with pytest.raises(InvalidInputError):
        trace_norm(x)
    with pytest.raises(InvalidInputError):
        trace_norm(np.ones((2, 3)))


@pytest.mark.parametrize("n,k", [(4, 1), (8, 1), (8, 3), (16, 2)])
def test_product_state_distance_closed_form(n, k):
    beta = 0.5 - 0.25j
    psi = from_profile(product(beta), n)
    rep = verify_bound(psi, k, profile_adapted_grid(product(beta), n, k))
    assert rep.delta_full == pytest.approx(product_delta(n, k), abs=1e-8)
    assert rep.total_mass == pytest.approx((n - k) / n, abs=1e-9)
    assert rep.zeta == pytest.approx(k / n, abs=1e-9)
    assert rep.theta == pytest.approx(k / n, abs=1e-9)
    assert rep.within_conservative_bound and rep.half_within_paper_bound
    check_decomposition(rep)


@given(st.lists(st.tuples(st.complex_numbers(max_magnitude=1.0, allow_nan=False,
                                             allow_infinity=False),
                          st.complex_numbers(min_magnitude=0.1, max_magnitude=1.0,
                                             allow_nan=False, allow_infinity=False)),
                min_size=1, max_size=3),
       st.integers(3, 12))
@settings(max_examples=12, deadline=None)
def test_bound_and_decomposition_on_random_profiles(comps, n):
    profile = SuperpositionProfile(tuple(comps))
    try:
        psi = from_profile(profile, n)
    except InvalidInputError:
        return
    k = 1 + n // 4
    rep = verify_bound(psi, k, profile_adapted_grid(profile, n, k))
    check_decomposition(rep)
    assert rep.within_conservative_bound
    assert rep.mass_error < 1e-8
    assert rep.total_mass <= 1 + 1e-9


def test_node_sums_bit_identical_across_workers():
    psi = from_profile(even_cat(), 16)
    grid = profile_adapted_grid(even_cat(), 16, 1).halved()
    assert len(grid.chunks()) > 2
    a = node_sums(psi, 1, grid, workers=1)
    b = node_sums(psi, 1, grid, workers=4)
    for x, y in zip(a._fields(), b._fields()):
        assert np.array_equal(x, y)


def test_bound_report_fields():
    psi = from_profile(even_cat(), 8)
    rep = verify_bound(psi, 1, profile_adapted_grid(even_cat(), 8, 1))
    d = rep.as_dict()
    assert d["bound_paper"] == 1.5 / 8 and d["bound_conservative"] == 3 / 8
    assert d["grid_step"] > 0 and d["nodes"] > 0 and d["w_max"] >= psi.w_max
    assert min(rep.zeta, rep.eta, rep.theta, rep.delta_full, rep.quad_error) >= -1e-12
    assert not rep.quad_warning


def test_bad_k():
    psi = from_profile(even_cat(), 4)
    with pytest.raises(InvalidInputError):
        conditional_state(psi, 4, 0.1)
    with pytest.raises(InvalidInputError):
        verify_bound(psi, 0, profile_adapted_grid(even_cat(), 4, 1))
