"""
Sampling sets on the periodic unit interval.

Validates nonuniform sample sets (points in [0,1), complex values, positive
weights) and builds the density-compensating weights used by the fits.
All norms downstream are weighted by these weights.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from config import WEIGHTS_UNIFORM, WEIGHTS_VORONOI
from modules.errors import (
    DegenerateSet,
    DimensionMismatch,
    InvalidNoiseLevel,
    NonMonotonePoints,
    NonPositiveWeight,
    OutOfDomain,
    ValidationError,
)
from modules.log_setup import get_logger

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("sampling")

# ==================================================
# TYPES
# ==================================================


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SampleSet1D:
    """Validated samples: strictly increasing points in [0,1), values, weights > 0."""

    points: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def max_degree(self) -> int:
        """Largest M with 2M+1 <= r."""
        return (self.count - 1) // 2

    def with_values(self, values) -> "SampleSet1D":
        return validate(self.points, values, self.weights)


@dataclass(frozen=True)
class NoiseSpec:
    """Relative noise fraction epsilon in the weighted norm, 0 <= epsilon < 1."""

    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not np.isfinite(eps) or eps < 0.0 or eps >= 1.0:
            raise InvalidNoiseLevel(f"epsilon must lie in [0, 1), got {self.epsilon}")
        object.__setattr__(self, "epsilon", eps)


# ==================================================
# WEIGHTS
# ==================================================

def check_points(points: np.ndarray) -> None:
    if points.ndim != 1 or len(points) == 0:
        raise DegenerateSet("sampling set must contain at least one point")
    if not np.all(np.isfinite(points)) or np.any(points < 0.0) or np.any(points >= 1.0):
        bad = points[~(np.isfinite(points) & (points >= 0.0) & (points < 1.0))]
        raise OutOfDomain(f"sampling points must lie in [0, 1); offending values: {bad[:5].tolist()}")
    gaps = np.diff(points)
    if np.any(gaps <= 0.0):
        idx = int(np.argmax(gaps <= 0.0))
        raise NonMonotonePoints(
            f"sampling points must be strictly increasing "
            f"(x[{idx}]={points[idx]!r} >= x[{idx + 1}]={points[idx + 1]!r})"
        )


def voronoi_weights(points) -> np.ndarray:
    """w_j = (x_{j+1} - x_{j-1}) / 2 with periodic neighbours; sums to 1."""
    x = np.asarray(points, dtype=float)
    if x.ndim != 1 or len(x) == 0:
        raise DegenerateSet("cannot build Voronoi weights for an empty set")
    if len(x) == 1:
        return np.ones(1)

    prev = np.empty_like(x)
    prev[1:] = x[:-1]
    prev[0] = x[-1] - 1.0

    nxt = np.empty_like(x)
    nxt[:-1] = x[1:]
    nxt[-1] = x[0] + 1.0

    return (nxt - prev) / 2.0


def uniform_weights(points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if x.ndim != 1 or len(x) == 0:
        raise DegenerateSet("cannot build weights for an empty set")
    return np.full(len(x), 1.0 / len(x))


WEIGHT_BUILDERS = {
    WEIGHTS_VORONOI: voronoi_weights,
    WEIGHTS_UNIFORM: uniform_weights,
}


def mesh_norm(points) -> float:
    """Largest periodic gap between consecutive points (wrap gap included)."""
    x = np.asarray(points, dtype=float)
    if len(x) == 1:
        return 1.0
    gaps = np.diff(x)
    wrap = x[0] + 1.0 - x[-1]
    return float(max(gaps.max(), wrap))


# ==================================================
# VALIDATION
# ==================================================

def validate(points, values, weights=None, weights_mode: str = WEIGHTS_VORONOI) -> SampleSet1D:
    """Check a raw sample set and fill in weights when none are given."""
    x = np.array(points, dtype=float).ravel()
    s = np.array(values, dtype=complex).ravel()

    if len(x) == 0:
        raise DegenerateSet("sampling set must contain at least one point")
    if len(s) != len(x):
        raise DimensionMismatch(f"{len(x)} points but {len(s)} values")

    check_points(x)

    if weights is None:
        try:
            builder = WEIGHT_BUILDERS[weights_mode]
        except KeyError:
            raise ValidationError(
                f"unknown weights mode {weights_mode!r}; expected one of {sorted(WEIGHT_BUILDERS)}"
            ) from None
        w = builder(x)
    else:
        w = np.array(weights, dtype=float).ravel()
        if len(w) != len(x):
            raise DimensionMismatch(f"{len(x)} points but {len(w)} weights")

    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        idx = int(np.argmax(~(np.isfinite(w) & (w > 0.0))))
        raise NonPositiveWeight(f"weight {idx} is not positive ({w[idx]!r})")

    if not np.all(np.isfinite(s)):
        raise ValidationError("sample values must be finite")

    return SampleSet1D(points=_frozen(x), values=_frozen(s), weights=_frozen(w))


def sort_samples(points, *columns):
    """Sort points ascending and carry any row-aligned columns along."""
    x = np.asarray(points, dtype=float)
    order = np.argsort(x, kind="stable")
    return (x[order],) + tuple(np.asarray(c)[order] for c in columns)


def normalize_points(points) -> tuple:
    """Affine map of arbitrary real points onto [0, 1).

    The span [min, max] goes to [0, (r-1)/r], i.e. the period is the span
    plus one mean gap. Returns (normalized, offset, period) so that
    x = offset + normalized * period.
    """
    x = np.asarray(points, dtype=float)
    if len(x) == 0:
        raise DegenerateSet("cannot normalize an empty set")
    if not np.all(np.isfinite(x)):
        raise OutOfDomain("cannot normalize non-finite points")
    lo, hi = float(x.min()), float(x.max())
    r = len(x)
    if r == 1 or hi == lo:
        return np.zeros_like(x), lo, 1.0
    period = (hi - lo) * r / (r - 1)
    normalized = (x - lo) / period
    # guard the top point against rounding up to 1.0
    normalized = np.minimum(normalized, np.nextafter(1.0, 0.0))
    logger.debug(f"normalized {r} points: offset={lo}, period={period}")
    return normalized, lo, period
