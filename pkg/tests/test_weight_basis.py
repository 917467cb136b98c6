from itertools import product as words
import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from conftest import even_cat
from cpfinetti.errors import InvalidInputError, TruncationError
from cpfinetti.fock import coherent_amplitudes
from cpfinetti.oracle import partial_trace_pure, tensor_power
from cpfinetti.weight_basis import (CHOOSER_TAIL, CoherentPowerState, SuperpositionProfile,
                                    _tail_bound, choose_w_max, coherent_row, embed_dense,
                                    from_profile, product_coefficients, reduced_state,
                                    split_amplitude, split_matrix, weight_state_dense,
                                    weighted_subspace_dimension, word_index)

small = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def profiles(draw, max_components=3):
    count = draw(st.integers(1, max_components))
    comps = tuple((draw(small), draw(small.filter(lambda z: abs(z) > 0.05)))
                  for _ in range(count))
    return SuperpositionProfile(comps)


def multinomial_vector(n, w, d):
    """``|w>_n`` by enumerating every word of the cube."""
    vec = np.zeros(d ** n, dtype=complex)
    for y in words(range(d), repeat=n):
        if sum(y) == w:
            coeff = math.factorial(w) / math.prod(math.factorial(i) for i in y) / n ** w
            vec[word_index(y, d)] = math.sqrt(coeff)
    return vec


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_weight_state_matches_enumeration(n):
    for w in range(5):
        assert np.allclose(weight_state_dense(n, w, w + 1), multinomial_vector(n, w, w + 1),
                           atol=1e-15)


def test_weight_states_orthonormal():
    V = np.stack([weight_state_dense(3, w, 8) for w in range(8)], axis=1)
    assert np.max(np.abs(V.conj().T @ V - np.eye(8))) < 1e-13


def test_weight_state_needs_room():
    with pytest.raises(InvalidInputError):
        weight_state_dense(2, 3, 3)


@given(small, st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_product_coefficients_are_projections(gamma, n):
    d = 14
    dense = tensor_power(coherent_amplitudes(gamma, d), n).amps
    c = product_coefficients(gamma, n, d - 1)
    proj = [np.vdot(weight_state_dense(n, w, d), dense) for w in range(d)]
    assert np.allclose(c, proj, atol=1e-13)


@given(st.integers(2, 9), st.integers(0, 30))
def test_split_amplitudes_square_sum_to_one(n, w):
    k = 1 + w % (n - 1)
    total = sum(split_amplitude(n, k, w, j) ** 2 for j in range(w + 1))
    assert abs(total - 1) < 1e-12


def test_split_amplitude_matches_dense_contraction():
    n, k, d = 3, 1, 7
    for w in range(d):
        full = weight_state_dense(n, w, d).reshape(d ** k, -1)
        for j in range(w + 1):
            left = weight_state_dense(k, j, d)
            right = weight_state_dense(n - k, w - j, d)
            assert abs(left.conj() @ full @ right.conj() - split_amplitude(n, k, w, j)) < 1e-14


def test_reduced_state_of_product_is_product():
    beta, n, k, W = 0.6 - 0.2j, 5, 2, 40
    psi = from_profile(SuperpositionProfile(((beta, 1),)), n, W)
    ck = product_coefficients(beta, k, W)
    rho = reduced_state(psi, k).mat
    assert np.max(np.abs(rho - np.outer(ck, ck.conj()))) < 1e-12


@given(profiles(), st.integers(2, 6))
@settings(max_examples=30, deadline=None)
def test_reduced_state_is_a_density(profile, n):
    psi = from_profile(profile, n)
    for k in range(1, n):
        rho = reduced_state(psi, k)
        assert rho.hermiticity_error() < 1e-13
        assert rho.min_eigenvalue() > -1e-12
        assert abs(rho.trace - psi.norm_sq) < 1e-12
        assert rho.trace <= 1 + 1e-12


@given(profiles(), st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_profile_normalization(profile, n):
    psi = from_profile(profile, n)
    assert abs(psi.norm_sq + psi.tail_mass - 1) < 1e-12
    assert psi.tail_mass <= 1e-9


@given(profiles(), st.integers(1, 8))
@settings(max_examples=30, deadline=None)
def test_w_max_chooser_controls_tail(profile, n):
    W = choose_w_max(profile, n)
    psi = from_profile(profile, n, W)
    assert psi.tail_mass <= CHOOSER_TAIL * (1 + 1e-6) + 1e-15
    merged = profile.merged()
    assert _tail_bound(merged, n, W, merged.norm(n)) <= CHOOSER_TAIL
    if W > 0:
        assert _tail_bound(merged, n, W - 1, merged.norm(n)) > CHOOSER_TAIL


def test_coincident_components_merge():
    p = SuperpositionProfile(((0.5, 1.0), (0.5, 2.0), (-0.5, 1.0)))
    merged = p.merged()
    assert len(merged.components) == 2
    a = from_profile(p, 4).c
    b = from_profile(SuperpositionProfile(((0.5, 3.0), (-0.5, 1.0))), 4).c
    assert np.allclose(a, b, atol=1e-15)


def test_gram_norm_matches_dense():
    p = even_cat(0.7)
    n, d = 2, 30
    dense = sum(w * tensor_power(coherent_amplitudes(g, d), n).amps for g, w in p.components)
    assert abs(p.norm(n) - np.linalg.norm(dense)) < 1e-12


def test_truncation_error_suggests_w_max():
    with pytest.raises(TruncationError) as info:
        from_profile(even_cat(1.5), 16, 10)
    suggested = info.value.suggested_w_max
    assert suggested > 10
    from_profile(even_cat(1.5), 16, suggested)


def test_zero_norm_profile_rejected():
    with pytest.raises(InvalidInputError):
        from_profile(SuperpositionProfile(((0.3, 1.0), (0.3, -1.0))), 3)


def test_coherent_row_matches_dense():
    alpha, m, W = 0.4 + 0.9j, 2, 9
    d = W + 1
    bra = tensor_power(coherent_amplitudes(alpha, d), m).amps
    row = coherent_row(alpha, m, W)
    dense = [np.vdot(bra, weight_state_dense(m, w, d)) for w in range(d)]
    assert np.allclose(row, dense, atol=1e-14)


def test_embed_dense_matches_partial_trace():
    gamma, n, k, d = 0.5 + 0.1j, 3, 1, 18
    psi = from_profile(SuperpositionProfile(((gamma, 1),)), n, d - 1)
    dense = partial_trace_pure(tensor_power(coherent_amplitudes(gamma, d), n), k).mat
    assert np.max(np.abs(embed_dense(reduced_state(psi, k), d) - dense)) < 1e-11


def test_split_matrix_rejects_bad_k():
    psi = from_profile(even_cat(), 3)
    for k in (0, 3):
        with pytest.raises(InvalidInputError):
            split_matrix(psi, k)


def test_state_rejects_wrong_length():
    with pytest.raises(InvalidInputError):
        CoherentPowerState(3, 4, np.zeros(3), 0.0)


def brute_orbit_count(n, w):
    return len({tuple(sorted(y)) for y in words(range(w + 1), repeat=n) if sum(y) == w})


@pytest.mark.parametrize("n,w", [(1, 5), (2, 6), (3, 6), (4, 5), (5, 4)])
def test_weighted_subspace_dimension(n, w):
    assert weighted_subspace_dimension(n, w) == brute_orbit_count(n, w)
