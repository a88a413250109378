"""
Dense reference implementations.

Slow and obviously correct: explicit weighted Vandermonde matrices, dense
least-squares and normal-equation solves, Gram spectra, analytic condition
bounds and the Frobenius preconditioning objective. Used by the test suite
and by the `diag` subcommand; refuses degrees above ORACLE_MAX_DEGREE.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigvalsh, lstsq, lu_factor, lu_solve

from config import ORACLE_MAX_DEGREE
from modules.errors import DegreeTooLarge, DimensionMismatch, RankDeficient
from modules.levinson import evaluate
from modules.log_setup import get_logger
from modules.sampling import SampleSet1D, validate
from modules.toeplitz import ToeplitzSystem

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("oracle")

# ==================================================
# DENSE SYSTEM
# ==================================================


@dataclass(frozen=True)
class DenseSystem:
    """Unweighted Vandermonde V[j, k] = exp(2 pi i k x_j), k = -M..M, plus the weights."""

    vandermonde: np.ndarray
    weight_diag: np.ndarray
    degree: int

    @property
    def size(self) -> int:
        return 2 * self.degree + 1


def _check_degree(count: int, degree: int) -> None:
    if degree > ORACLE_MAX_DEGREE:
        raise DegreeTooLarge(f"dense oracle is limited to degree {ORACLE_MAX_DEGREE}, got {degree}")
    if 2 * degree + 1 > count:
        raise DegreeTooLarge(f"degree {degree} needs {2 * degree + 1} samples, only {count} given")


def build_dense_system(samples: SampleSet1D, degree: int) -> DenseSystem:
    _check_degree(samples.count, degree)
    k = np.arange(-degree, degree + 1)
    vandermonde = np.exp(2j * np.pi * np.outer(samples.points, k))
    return DenseSystem(vandermonde=vandermonde, weight_diag=samples.weights.copy(), degree=degree)


def gram(system: DenseSystem) -> np.ndarray:
    """V* W V; its transpose is the Toeplitz matrix [t_{k-l}]."""
    v = system.vandermonde
    return v.conj().T @ (system.weight_diag[:, None] * v)


def _as_values(system: DenseSystem, values) -> np.ndarray:
    s = np.asarray(values, dtype=complex)
    if s.shape != (system.vandermonde.shape[0],):
        raise DimensionMismatch(f"expected {system.vandermonde.shape[0]} values, got {s.shape}")
    return s


def dense_lsq(system: DenseSystem, values) -> np.ndarray:
    """argmin sum_j |p(x_j) - s_j|^2 w_j; coefficients a_{-M}..a_M."""
    s = _as_values(system, values)
    root_w = np.sqrt(system.weight_diag)
    coefficients, _, rank, _ = lstsq(
        root_w[:, None] * system.vandermonde, root_w * s, lapack_driver="gelsy"
    )
    if rank < system.size:
        raise RankDeficient(f"weighted Vandermonde has rank {rank} < {system.size}")
    return coefficients


def dense_normal_solve(system: DenseSystem, values) -> np.ndarray:
    """Pivoted LU on V* W V c = V* W s."""
    s = _as_values(system, values)
    g = gram(system)
    lu, piv = lu_factor(g, check_finite=True)
    if np.any(np.abs(np.diag(lu)) == 0.0):
        raise RankDeficient("normal equations are singular")
    return lu_solve((lu, piv), system.vandermonde.conj().T @ (system.weight_diag * s))


def spectrum(system: DenseSystem) -> Tuple[float, float, float]:
    """(lambda_min, lambda_max, cond) of the weighted Gram matrix."""
    eigenvalues = eigvalsh(gram(system))
    lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
    cond = lam_max / lam_min if lam_min > 0.0 else float("inf")
    logger.debug(f"degree {system.degree}: lambda in [{lam_min:.6e}, {lam_max:.6e}], cond {cond:.6e}")
    return lam_min, lam_max, cond


def weighted_residual_sq(samples: SampleSet1D, coefficients) -> float:
    """sum_j |p(x_j) - s_j|^2 w_j by direct evaluation."""
    misfit = evaluate(coefficients, samples.points) - samples.values
    return float(np.sum(np.abs(misfit) ** 2 * samples.weights))


# ==================================================
# ANALYTIC BOUNDS
# ==================================================

# Form of the value returned by condition_bound_1d, quoted in reports.
CONDITION_BOUND_FORM = "((1 + 2M gamma) / (1 - 2M gamma))^2, gamma = mesh norm"


def frame_bounds_1d(gamma: float, degree: int) -> Optional[Tuple[float, float]]:
    """(A, B) = ((1 - 2M gamma)^2, (1 + 2M gamma)^2) for Voronoi weights, None when gamma >= 1/(2M)."""
    if degree == 0:
        return 1.0, 1.0
    spread = 2.0 * degree * gamma
    if spread >= 1.0:
        return None
    return (1.0 - spread) ** 2, (1.0 + spread) ** 2


def condition_bound_1d(gamma: float, degree: int) -> Optional[float]:
    bounds = frame_bounds_1d(gamma, degree)
    if bounds is None:
        return None
    lower, upper = bounds
    return upper / lower


def condition_bound_line(delta1: float, delta2: float, degree: int) -> Optional[float]:
    """Product of the per-coordinate bounds for line-type sampling."""
    first = condition_bound_1d(delta1, degree)
    second = condition_bound_1d(delta2, degree)
    if first is None or second is None:
        return None
    return first * second


def frobenius_objective(points, weights, degree: int) -> float:
    """||I - T_M||_F for the given weights.

    Uses the Toeplitz structure: the diagonal k of T_M repeats t_k
    (2M+1-|k|) times.
    """
    x = np.asarray(points, dtype=float)
    _check_degree(len(x), degree)
    samples = validate(x, np.zeros(len(x)), weights)
    t = ToeplitzSystem(samples).moments(2 * degree + 1)
    n = 2 * degree + 1
    total = n * abs(1.0 - t[0]) ** 2
    if degree > 0:
        k = np.arange(1, n)
        total += 2.0 * np.sum((n - k) * np.abs(t[1:]) ** 2)
    return float(np.sqrt(total))
