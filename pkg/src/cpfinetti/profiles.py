"""Profile files and the sampled two-peak superposition.

Profile JSON::

    {"components": [{"gamma": [re, im], "weight": [re, im]}, ...],
     "n": 16, "k": 1, "w_max": 40,
     "grid": {"step": 0.05, "target_tail": 1e-10}}

``w_max`` and ``grid`` are optional.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import InvalidInputError
from .weight_basis import SuperpositionProfile


@dataclass(frozen=True)
class ProfileSpec:
    profile: SuperpositionProfile
    n: int
    k: int
    w_max: int = None
    grid: dict = field(default_factory=dict)


def _pair(value, what):
    if not (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise InvalidInputError(f"{what} must be a [re, im] pair of numbers, got {value!r}")
    return complex(value[0], value[1])


def parse_profile(data) -> ProfileSpec:
    if not isinstance(data, dict):
        raise InvalidInputError("profile must be a JSON object")
    comps = data.get("components")
    if not isinstance(comps, list) or not comps:
        raise InvalidInputError("profile needs a nonempty 'components' list")
    parsed = []
    for i, comp in enumerate(comps):
        if not isinstance(comp, dict) or set(comp) != {"gamma", "weight"}:
            raise InvalidInputError(f"component {i} must have exactly 'gamma' and 'weight'")
        parsed.append((_pair(comp["gamma"], f"component {i} gamma"),
                       _pair(comp["weight"], f"component {i} weight")))
    n, k = data.get("n"), data.get("k")
    if not (isinstance(n, int) and isinstance(k, int)) or not (1 <= k < n):
        raise InvalidInputError(f"need integers 1 <= k < n, got n={n!r} k={k!r}")
    w_max = data.get("w_max")
    if w_max is not None and not (isinstance(w_max, int) and w_max >= 0):
        raise InvalidInputError("w_max must be a nonnegative integer")
    grid = data.get("grid", {})
    if not isinstance(grid, dict) or set(grid) - {"step", "target_tail"}:
        raise InvalidInputError("grid may only set 'step' and 'target_tail'")
    for key, val in grid.items():
        if not isinstance(val, (int, float)) or val <= 0:
            raise InvalidInputError(f"grid {key} must be a positive number")
    return ProfileSpec(SuperpositionProfile(tuple(parsed)), n, k, w_max, dict(grid))


def load_profile(path) -> ProfileSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read profile {path}: {exc}") from exc
    return parse_profile(data)


def profile_to_dict(spec: ProfileSpec) -> dict:
    out = {
        "components": [{"gamma": [g.real, g.imag], "weight": [w.real, w.imag]}
                       for g, w in spec.profile.components],
        "n": spec.n,
        "k": spec.k,
    }
    if spec.w_max is not None:
        out["w_max"] = spec.w_max
    if spec.grid:
        out["grid"] = dict(spec.grid)
    return out


def two_peak_profile(center1, center2, sigma, samples, half_width=3.0) -> SuperpositionProfile:
    """Midpoint samples of two Gaussian bumps on the line through both centers.

    Each peak gets ``samples`` nodes spread over ``+-half_width * sigma``
    with weight ``exp(-t^2 / (2 sigma^2)) * spacing``.  One sample per peak
    is the discrete two-component superposition.
    """
    center1, center2 = complex(center1), complex(center2)
    if not (sigma > 0 and math.isfinite(sigma)):
        raise InvalidInputError("sigma must be positive")
    if int(samples) != samples or samples < 1:
        raise InvalidInputError("samples must be a positive integer")
    if center1 == center2:
        raise InvalidInputError("the two centers must differ")
    direction = (center2 - center1) / abs(center2 - center1)
    spacing = 2 * half_width * sigma / samples
    ts = -half_width * sigma + (np.arange(samples) + 0.5) * spacing
    comps = []
    for center in (center1, center2):
        for t in ts:
            comps.append((center + t * direction, math.exp(-t * t / (2 * sigma * sigma)) * spacing))
    return SuperpositionProfile(tuple(comps))
