import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from conftest import even_cat
from cpfinetti.errors import InvalidInputError
from cpfinetti.quadrature import (CHUNK, GridMeta, PhaseSpaceGrid, cartesian_grid, disk_grid,
                                  profile_adapted_grid, richardson_report, tree_sum)


def kink(m):
    """``|Re alpha| exp(-m |alpha|^2)``: the derivative jump keeps the midpoint rule second order."""
    return lambda grid: grid.integrate(np.abs(grid.nodes.real) * np.exp(-m * np.abs(grid.nodes) ** 2))


@given(st.floats(0.5, 8.0), st.complex_numbers(max_magnitude=2.0, allow_nan=False,
                                                allow_infinity=False))
@settings(max_examples=25, deadline=None)
def test_gaussian_integral(a, c):
    grid = disk_grid([c], a, 1e-12)
    vals = np.exp(-a * np.abs(grid.nodes - c) ** 2)
    assert abs(grid.integrate(vals) - math.pi / a) < 1e-9


def test_halving_quarters_the_error():
    m = 2.0
    exact = math.sqrt(math.pi) * m ** -1.5
    errors = [abs(kink(m)(cartesian_grid(0, 6.0, h)) - exact) for h in (0.4, 0.2, 0.1, 0.05)]
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    assert all(3.5 < r < 4.5 for r in ratios), ratios


def test_richardson_estimate_tracks_error():
    m = 2.0
    exact = math.sqrt(math.pi) * m ** -1.5
    fine, est = richardson_report(kink(m), cartesian_grid(0, 6.0, 0.1))
    err = abs(fine - exact)
    assert 0.5 * err < est < 2 * err


def test_halved_grid_nests_nodes():
    grid = disk_grid([0.3 + 0.1j, -0.7], 4.0)
    fine = grid.halved()
    assert fine.step == grid.step / 2
    assert fine.meta.radius == grid.meta.radius
    coarse = {(round(z.real, 9), round(z.imag, 9)) for z in grid.nodes}
    refined = {(round(z.real, 9), round(z.imag, 9)) for z in fine.nodes}
    assert coarse <= refined


def test_overlapping_disks_count_cells_once():
    grid = disk_grid([0.0, 0.5], 4.0, 1e-10)
    keys = [(round(z.real / grid.step), round(z.imag / grid.step)) for z in grid.nodes]
    assert len(set(keys)) == len(keys)
    single = disk_grid([0.0], 4.0, 1e-10, grid.step)
    assert len(single) < len(grid) < 2 * len(single)


def test_profile_grid_covers_every_component():
    p = even_cat(1.0)
    grid = profile_adapted_grid(p, 8, 1)
    for g in p.gammas:
        assert np.min(np.abs(grid.nodes - g)) <= grid.step
    assert grid.meta.centers == (1 + 0j, -1 + 0j)


def test_tree_sum_order_is_fixed():
    rng = np.random.default_rng(0)
    parts = list(rng.normal(size=(37, 5)) * 10.0 ** rng.integers(-8, 8, size=(37, 1)))
    a = tree_sum(parts)
    b = tree_sum([p.copy() for p in parts])
    assert np.array_equal(a, b)
    assert np.allclose(a, np.sum(parts, axis=0), rtol=1e-12)
    with pytest.raises(InvalidInputError):
        tree_sum([])


def test_chunks_cover_nodes():
    grid = cartesian_grid(0, 5.0, 0.05)
    assert len(grid) > CHUNK
    covered = np.concatenate([np.arange(len(grid))[s] for s in grid.chunks()])
    assert np.array_equal(covered, np.arange(len(grid)))


def test_validation():
    with pytest.raises(InvalidInputError):
        cartesian_grid(0, 1.0, 2.0)
    with pytest.raises(InvalidInputError):
        cartesian_grid(0, 1.0, 0.0)
    with pytest.raises(InvalidInputError):
        disk_grid([0], 4.0, step=1.0)
    with pytest.raises(InvalidInputError):
        disk_grid([0], -1.0)
    with pytest.raises(InvalidInputError):
        profile_adapted_grid(even_cat(), 3, 3)
    meta = GridMeta("cartesian", 1.0, 1.0, (0j,))
    with pytest.raises(InvalidInputError):
        PhaseSpaceGrid(np.array([0j]), np.array([0.0]), meta)
