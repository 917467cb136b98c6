"""Midpoint-rule integration over the complex plane.

Grids are square lattices of step ``h`` clipped to a union of disks.  All
disks of one grid share a lattice anchored at the first center, so
overlapping disks cover each cell exactly once and halving the step nests
the old nodes inside the new ones.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidInputError

DEFAULT_TARGET_TAIL = 1e-10
STEPS_PER_RADIUS = 20
CHUNK = 2048


@dataclass(frozen=True)
class GridMeta:
    scheme: str
    step: float
    radius: float
    centers: tuple


@dataclass(frozen=True)
class PhaseSpaceGrid:
    nodes: np.ndarray
    weights: np.ndarray
    meta: GridMeta

    def __post_init__(self):
        for name in ("nodes", "weights"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.nodes.size < 1 or self.nodes.shape != self.weights.shape:
            raise InvalidInputError("grid needs at least one node and one weight per node")
        if not np.all(self.weights > 0):
            raise InvalidInputError("grid weights must be positive")

    def __len__(self):
        return self.nodes.size

    @property
    def area(self) -> float:
        return float(self.step ** 2 * self.nodes.size)

    @property
    def step(self) -> float:
        return self.meta.step

    def halved(self) -> "PhaseSpaceGrid":
        """Same region at half the step."""
        return _disk_union(self.meta.centers, self.meta.radius, self.meta.step / 2,
                           self.meta.scheme)

    def integrate(self, values) -> np.ndarray:
        """``sum_i weight_i * values[i]`` with a fixed chunked reduction order."""
        values = np.asarray(values)
        parts = [np.tensordot(self.weights[s:s + CHUNK], values[s:s + CHUNK], axes=1)
                 for s in range(0, values.shape[0], CHUNK)]
        return tree_sum(parts)

    def chunks(self):
        """Fixed-size node slices; reductions over them go through :func:`tree_sum`."""
        return [slice(s, s + CHUNK) for s in range(0, self.nodes.size, CHUNK)]


def tree_sum(parts):
    """Pairwise reduction in a fixed order, independent of how parts were produced."""
    parts = list(parts)
    if not parts:
        raise InvalidInputError("nothing to sum")
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _disk_union(centers, radius, h, scheme):
    centers = tuple(complex(c) for c in centers)
    anchor = centers[0]
    seen = {}
    limit = radius * (1 - 1e-12)
    for c in centers:
        off = c - anchor
        i0, i1 = math.ceil((off.real - radius) / h), math.floor((off.real + radius) / h)
        j0, j1 = math.ceil((off.imag - radius) / h), math.floor((off.imag + radius) / h)
        I, J = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
        pts = anchor + h * (I + 1j * J)
        keep = np.abs(pts - c) < limit
        for i, j in zip(I[keep].tolist(), J[keep].tolist()):
            seen.setdefault((i, j), None)
    if not seen:
        raise InvalidInputError("grid has no nodes; radius too small for the step")
    ij = np.array(list(seen), dtype=float)
    nodes = anchor + h * (ij[:, 0] + 1j * ij[:, 1])
    weights = np.full(nodes.size, h * h)
    return PhaseSpaceGrid(nodes, weights, GridMeta(scheme, h, radius, centers))


def cartesian_grid(center, radius, step) -> PhaseSpaceGrid:
    """Midpoint cells of side ``step`` centered on ``center + step*(i + 1j*j)``.

    Cells whose center lies outside the open disk of ``radius`` are dropped.
    """
    if not (radius > 0 and step > 0):
        raise InvalidInputError("radius and step must be positive")
    if step > radius:
        raise InvalidInputError("step must not exceed radius")
    return _disk_union([center], radius, step, "cartesian")


def disk_grid(centers, exponent, target_tail=DEFAULT_TARGET_TAIL, step=None) -> PhaseSpaceGrid:
    """Union of disks sized for integrands decaying like ``exp(-exponent |alpha - c|^2)``.

    Radius ``sqrt(ln(1/target_tail)/exponent) + 2h`` with ``h`` defaulting
    to a twentieth of the bare radius.
    """
    if exponent <= 0 or not (0 < target_tail < 1):
        raise InvalidInputError("need exponent > 0 and 0 < target_tail < 1")
    r0 = math.sqrt(math.log(1 / target_tail) / exponent)
    h_max = r0 / (STEPS_PER_RADIUS - 2)
    if step is None:
        step = r0 / STEPS_PER_RADIUS
    elif not (0 < step <= h_max):
        raise InvalidInputError(f"step must lie in (0, {h_max:.4g}] for this width")
    return _disk_union(list(centers), r0 + 2 * step, step, "disk-union")


def profile_adapted_grid(profile, n, k, target_tail=DEFAULT_TARGET_TAIL, step=None) -> PhaseSpaceGrid:
    """Disks around every component amplitude, width set by ``n - k`` traced modes."""
    if not (1 <= k < n):
        raise InvalidInputError(f"need 1 <= k < n, got n={n} k={k}")
    return disk_grid(profile.gammas.tolist(), n - k, target_tail, step)


def richardson_report(functional, grid):
    """Value at ``h/2`` and the second-order error estimate ``|I_{h/2} - I_h| / 3``.

    ``functional`` maps a grid to a number or array; arrays get an
    elementwise estimate.
    """
    coarse = np.asarray(functional(grid))
    fine = np.asarray(functional(grid.halved()))
    return fine, np.abs(fine - coarse) / 3
