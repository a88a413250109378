"""
Closed planar curve recovery.

Boundary points (x_j, y_j), ordered along the contour, become the complex
signal s_j = x_j + i y_j on the chord-length parameter u_j in [0, 1). The
curve is then a 1-periodic trigonometric polynomial fitted by the
Levinson engine; evaluating it on a regular grid traces the recovered
closed contour.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from config import DEFAULT_GRID_SIZE
from modules.errors import DegenerateSet, OutOfDomain, ValidationError, ZeroChord
from modules.levinson import FitResult, fit
from modules.log_setup import get_logger
from modules.sampling import validate

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("curve")

MIN_BOUNDARY_POINTS = 3

# ==================================================
# TYPES
# ==================================================


@dataclass(frozen=True)
class BoundaryPoints:
    """Ordered contour points as an (r, 2) array."""

    xy: np.ndarray

    def __post_init__(self):
        xy = np.array(self.xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValidationError(f"boundary points must have shape (r, 2), got {xy.shape}")
        if len(xy) < MIN_BOUNDARY_POINTS:
            raise DegenerateSet(f"a closed contour needs at least {MIN_BOUNDARY_POINTS} points, got {len(xy)}")
        if not np.all(np.isfinite(xy)):
            raise OutOfDomain("boundary coordinates must be finite")
        xy.setflags(write=False)
        object.__setattr__(self, "xy", xy)

    @classmethod
    def from_xy(cls, x, y) -> "BoundaryPoints":
        """Build from coordinate columns; an explicit copy of the first point at the end is dropped."""
        xy = np.column_stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
        if len(xy) > MIN_BOUNDARY_POINTS and np.array_equal(xy[0], xy[-1]):
            logger.debug("dropping closing duplicate of the first boundary point")
            xy = xy[:-1]
        return cls(xy)

    @property
    def count(self) -> int:
        return len(self.xy)

    @property
    def signal(self) -> np.ndarray:
        return self.xy[:, 0] + 1j * self.xy[:, 1]


@dataclass(frozen=True)
class CurveParam:
    """Normalized chord-length parameters u (u_0 = 0) and total length L, closure included."""

    u: np.ndarray
    length: float


@dataclass(frozen=True)
class CurveFit:
    param: CurveParam
    fit: FitResult

    @property
    def center(self) -> complex:
        return self.fit.coefficient(0)

    def contour(self, n: int = DEFAULT_GRID_SIZE) -> np.ndarray:
        """(n, 2) array of x, y on the closed contour at u = j/n."""
        values = self.fit.evaluate_on_grid(n)
        return np.column_stack([values.real, values.imag])


# ==================================================
# CHORD METRICS
# ==================================================

def euclidean_chords(steps: np.ndarray) -> np.ndarray:
    return np.hypot(steps[:, 0], steps[:, 1])


CHORD_METRICS = {
    "euclidean": euclidean_chords,
}

# ==================================================
# PARAMETERIZATION
# ==================================================


def _resolve_metric(metric: Union[str, Callable]) -> Callable:
    if callable(metric):
        return metric
    try:
        return CHORD_METRICS[metric]
    except KeyError:
        raise ValidationError(
            f"unknown chord metric {metric!r}; expected one of {sorted(CHORD_METRICS)} or a callable"
        ) from None


def parameterize(points: BoundaryPoints, metric: Union[str, Callable] = "euclidean") -> CurveParam:
    """u_0 = 0, u_j = u_{j-1} + d_j, then u /= (u_last + closing chord)."""
    chord = _resolve_metric(metric)
    xy = points.xy
    steps = np.diff(np.vstack([xy, xy[:1]]), axis=0)
    d = np.asarray(chord(steps), dtype=float)

    if np.any(d <= 0.0):
        idx = int(np.argmax(d <= 0.0))
        nxt = (idx + 1) % len(xy)
        raise ZeroChord(f"points {idx} and {nxt} coincide at {xy[idx].tolist()}")

    u = np.concatenate(([0.0], np.cumsum(d[:-1])))
    length = float(u[-1] + d[-1])
    u = u / length
    return CurveParam(u=u, length=length)


def fit_curve(points: BoundaryPoints, noise, max_degree: int = None,
              metric: Union[str, Callable] = "euclidean") -> CurveFit:
    """Fit the closed contour through `points` with Voronoi weights on u."""
    param = parameterize(points, metric)
    samples = validate(param.u, points.signal)
    result = fit(samples, noise, max_degree)
    logger.info(
        f"contour of {points.count} points (length {param.length:.6g}) fitted at degree {result.degree}"
    )
    return CurveFit(param=param, fit=result)
