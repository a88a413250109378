"""
Line-type 2-D sequence recovery.

Data live on a few lines tau_j (for example frame times of an image
sequence); along each line the samples are nonuniform in u. Every line is
fitted on its own, the fits are resampled on a shared regular u-grid, and
each grid column is then fitted across the lines. The sampling geometry
across lines is the same for every column, so one Toeplitz system and one
Gohberg-Semencul factor serve all columns.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from config import MIN_LINE_DEGREE, get_thread_count
from modules.errors import (
    DegenerateSet,
    DegreeTooLarge,
    DimensionMismatch,
    OutOfDomain,
    TrigFitError,
    ValidationError,
)
from modules.levinson import FitResult, fit
from modules.log_setup import get_logger
from modules.oracle import build_dense_system, condition_bound_line, spectrum
from modules.sampling import SampleSet1D, check_points, mesh_norm, validate
from modules.toeplitz import ToeplitzSystem, gs_apply, gs_factorize

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("sequence2d")

# ==================================================
# TYPES
# ==================================================


@dataclass(frozen=True)
class LineSampleGrid:
    """Samples along lines tau_j plus the lines where recovery is wanted."""

    line_positions: np.ndarray
    per_line_samples: Tuple[SampleSet1D, ...]
    target_lines: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        positions = np.array(self.line_positions, dtype=float).ravel()
        check_points(positions)
        lines = tuple(self.per_line_samples)
        if len(lines) != len(positions):
            raise DimensionMismatch(f"{len(positions)} line positions but {len(lines)} line sample sets")
        targets = np.array(self.target_lines, dtype=float).ravel()
        if not np.all(np.isfinite(targets)) or np.any((targets < 0.0) | (targets >= 1.0)):
            raise OutOfDomain("target lines must lie in [0, 1)")
        positions.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "line_positions", positions)
        object.__setattr__(self, "per_line_samples", lines)
        object.__setattr__(self, "target_lines", targets)

    @property
    def line_count(self) -> int:
        return len(self.line_positions)


@dataclass(frozen=True)
class LineFits:
    """Per-line fits of the usable lines and the dropped lines with reasons."""

    positions: np.ndarray
    fits: Tuple[FitResult, ...]
    dropped: Tuple[Tuple[float, str], ...] = ()

    @property
    def degrees(self) -> list:
        return [f.degree for f in self.fits]

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.fits else 0


@dataclass(frozen=True)
class SequenceResult:
    """`recovered[t]` holds p(target_t, j/n) for j = 0..n-1."""

    line_fits: LineFits
    cross_degree: int
    grid_size: int
    target_lines: np.ndarray
    cross_coefficients: np.ndarray
    recovered: np.ndarray

    def contour(self, index: int) -> np.ndarray:
        values = self.recovered[index]
        return np.column_stack([values.real, values.imag])


@dataclass(frozen=True)
class FrameCheck:
    """Sampled-energy ratios of random polynomials against the dense frame bounds."""

    lower: float
    upper: float
    ratios: np.ndarray
    analytic_bound: Optional[float]

    @property
    def within(self) -> bool:
        slack = 1e-10
        return bool(np.all(self.ratios >= self.lower * (1 - slack)) and np.all(self.ratios <= self.upper * (1 + slack)))


# ==================================================
# PER-LINE FITS
# ==================================================

def _fit_one(samples: SampleSet1D, noise, max_degree):
    if samples.count < 2 * MIN_LINE_DEGREE + 1:
        return DegreeTooLarge(
            f"line has {samples.count} samples, at least {2 * MIN_LINE_DEGREE + 1} are needed"
        )
    try:
        limit = samples.max_degree if max_degree is None else min(max_degree, samples.max_degree)
        return fit(samples, noise, limit)
    except TrigFitError as exc:
        return exc


def fit_lines(grid: LineSampleGrid, noise, max_degree: int = None, n_jobs: int = None) -> LineFits:
    """Independent 1-D fits; failing lines are dropped with a warning."""
    n_jobs = n_jobs or get_thread_count()
    outcomes = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_fit_one)(samples, noise, max_degree) for samples in grid.per_line_samples
    )

    positions, fits, dropped = [], [], []
    for tau, outcome in zip(grid.line_positions, outcomes):
        if isinstance(outcome, FitResult):
            positions.append(float(tau))
            fits.append(outcome)
        else:
            logger.warning(f"dropping line tau={tau:.6g}: {outcome}")
            dropped.append((float(tau), str(outcome)))

    logger.info(f"fitted {len(fits)} of {grid.line_count} lines (degrees {[f.degree for f in fits]})")
    return LineFits(positions=np.array(positions), fits=tuple(fits), dropped=tuple(dropped))


# ==================================================
# CROSS-LINE RECOVERY
# ==================================================

def default_grid_size(max_line_degree: int) -> int:
    """Next power of two >= 4 * degree + 1."""
    return 1 << (4 * max_line_degree).bit_length()


def default_cross_degree(line_count: int, max_line_degree: int) -> int:
    return min((line_count - 1) // 2, max_line_degree)


def _solve_columns(factor, rhs: np.ndarray, n_jobs: int) -> np.ndarray:
    if n_jobs <= 1 or rhs.shape[1] < 2:
        return gs_apply(factor, rhs)
    chunks = np.array_split(np.arange(rhs.shape[1]), min(n_jobs, rhs.shape[1]))
    parts = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(gs_apply)(factor, rhs[:, chunk]) for chunk in chunks
    )
    return np.concatenate(parts, axis=1)


def recover_cross(grid: LineSampleGrid, line_fits: LineFits, cross_degree: int = None,
                  grid_size: int = None, n_jobs: int = None) -> SequenceResult:
    """Fit every u-grid column across the lines and evaluate at the target lines."""
    usable = len(line_fits.fits)
    if usable == 0:
        raise DegenerateSet("no usable lines left for cross recovery")

    n = grid_size or default_grid_size(line_fits.max_degree)
    m_t = default_cross_degree(usable, line_fits.max_degree) if cross_degree is None else int(cross_degree)
    if m_t < 0 or 2 * m_t + 1 > usable:
        raise DegreeTooLarge(f"cross degree {m_t} needs {2 * m_t + 1} usable lines, only {usable} available")

    # one row per usable line: its fit on the shared u-grid
    line_values = np.vstack([f.evaluate_on_grid(n) for f in line_fits.fits])

    cross = validate(line_fits.positions, np.zeros(usable))
    system = ToeplitzSystem(cross)
    factor = gs_factorize(system, m_t)

    k = np.arange(-m_t, m_t + 1)
    embed = np.exp(2j * np.pi * np.outer(k, cross.points)) * cross.weights
    rhs = embed @ line_values

    solution = _solve_columns(factor, rhs, n_jobs or get_thread_count())
    coefficients = solution[::-1]

    targets = grid.target_lines
    recovered = np.exp(2j * np.pi * np.outer(targets, k)) @ coefficients
    logger.info(
        f"recovered {len(targets)} target lines from {usable} lines "
        f"(cross degree {m_t}, grid {n})"
    )
    return SequenceResult(
        line_fits=line_fits,
        cross_degree=m_t,
        grid_size=n,
        target_lines=targets,
        cross_coefficients=coefficients,
        recovered=recovered,
    )


def recover_sequence(grid: LineSampleGrid, noise, cross_degree: int = None, grid_size: int = None,
                     max_degree: int = None, n_jobs: int = None) -> SequenceResult:
    line_fits = fit_lines(grid, noise, max_degree, n_jobs)
    return recover_cross(grid, line_fits, cross_degree, grid_size, n_jobs)


# ==================================================
# FRAME BOUNDS
# ==================================================

def voronoi_line_weights(grid: LineSampleGrid) -> np.ndarray:
    return validate(grid.line_positions, np.zeros(grid.line_count)).weights


def sampled_energy(grid: LineSampleGrid, coefficient_matrix) -> float:
    """sum_j w_j sum_k w_jk |p(tau_j, u_jk)|^2 for p = sum c[a, b] e^{2 pi i (a tau + b u)}."""
    c = np.asarray(coefficient_matrix, dtype=complex)
    degree = (c.shape[0] - 1) // 2
    freq = np.arange(-degree, degree + 1)
    line_weights = voronoi_line_weights(grid)
    total = 0.0
    for tau, w_line, samples in zip(grid.line_positions, line_weights, grid.per_line_samples):
        # q(u) = p(tau, u) has coefficients sum_a c[a, b] e^{2 pi i a tau}
        q = np.exp(2j * np.pi * freq * tau) @ c
        values = np.exp(2j * np.pi * np.outer(samples.points, freq)) @ q
        total += w_line * float(np.sum(samples.weights * np.abs(values) ** 2))
    return total


def frame_bounds_check(grid: LineSampleGrid, degree: int, trials: int = 100, rng=None) -> FrameCheck:
    """Energy ratios of random p in P^2_M against (A1 A2, B1 B2) from dense spectra."""
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}")
    rng = rng if rng is not None else np.random.default_rng()
    cross = validate(grid.line_positions, np.zeros(grid.line_count))
    a1, b1, _ = spectrum(build_dense_system(cross, degree))

    line_spectra = [spectrum(build_dense_system(s, degree)) for s in grid.per_line_samples]
    a2 = min(lam_min for lam_min, _, _ in line_spectra)
    b2 = max(lam_max for _, lam_max, _ in line_spectra)

    n = 2 * degree + 1
    ratios = np.empty(trials)
    for i in range(trials):
        c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        ratios[i] = sampled_energy(grid, c) / float(np.sum(np.abs(c) ** 2))

    delta1 = mesh_norm(grid.line_positions)
    delta2 = max(mesh_norm(s.points) for s in grid.per_line_samples)
    check = FrameCheck(
        lower=a1 * a2,
        upper=b1 * b2,
        ratios=ratios,
        analytic_bound=condition_bound_line(delta1, delta2, degree),
    )
    logger.info(
        f"frame check at degree {degree}: ratios in [{ratios.min():.6g}, {ratios.max():.6g}] "
        f"vs [{check.lower:.6g}, {check.upper:.6g}]"
    )
    return check
