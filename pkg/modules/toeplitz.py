"""
Toeplitz normal equations for weighted trigonometric least squares.

Moments t_k = sum_j w_j exp(2 pi i k x_j) and right-hand sides
b_k = sum_j s_j w_j exp(2 pi i k x_j) are computed by direct summation and
cached as the degree grows. The nested system at degree M has entries
T[k, l] = t_{k-l}, k, l = -M..M; only t_k for k >= 0 is stored and
t_{-k} = conj(t_k).

The Gohberg-Semencul factor turns one Levinson solve into a reusable
inverse: T^{-1} b = (L* (L b) - U (U* b)) / z_0, each triangular Toeplitz
product applied through a circulant embedding and the FFT.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import toeplitz as dense_toeplitz

from modules.errors import Breakdown, DimensionMismatch, SingularSystem, ZeroPivot
from modules.log_setup import get_logger
from modules.sampling import SampleSet1D

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("toeplitz")

TWO_PI_I = 2j * np.pi

# ==================================================
# OPERATION COUNTER
# ==================================================


@dataclass
class OpCounter:
    """Arithmetic counter: `summation` for moment/rhs sums, `recursion` for Levinson updates."""

    summation: int = 0
    recursion: int = 0

    @property
    def total(self) -> int:
        return self.summation + self.recursion


# ==================================================
# MOMENTS
# ==================================================

def moment(samples: SampleSet1D, k: int) -> complex:
    """t_k = sum_j w_j exp(2 pi i k x_j)."""
    return complex(np.sum(samples.weights * np.exp(TWO_PI_I * k * samples.points)))


def rhs_entry(samples: SampleSet1D, k: int) -> complex:
    """b_k = sum_j s_j w_j exp(2 pi i k x_j)."""
    return complex(np.sum(samples.values * samples.weights * np.exp(TWO_PI_I * k * samples.points)))


class ToeplitzSystem:
    """Moment sequence and right-hand sides of the nested normal equations.

    Moments are appended in order by a single writer as levels grow; each
    entry is a fresh O(r) trigonometric sum (no phasor recurrences).
    """

    def __init__(self, samples: SampleSet1D, counter: Optional[OpCounter] = None):
        self.samples = samples
        self.counter = counter if counter is not None else OpCounter()
        self._points = samples.points
        self._weights = samples.weights
        self._weighted_values = samples.values * samples.weights
        self._moments = [complex(np.sum(self._weights))]
        self._rhs = {}
        self.counter.summation += samples.count
        self.sigma = float(np.sum(np.abs(samples.values) ** 2 * samples.weights))

    @property
    def count(self) -> int:
        return self.samples.count

    @property
    def max_level(self) -> int:
        """Largest degree M with 2M+1 <= r."""
        return (self.count - 1) // 2

    @property
    def t0(self) -> float:
        return self._moments[0].real

    @property
    def cached_moments(self) -> int:
        return len(self._moments)

    def moment(self, k: int) -> complex:
        if k < 0:
            return self.moment(-k).conjugate()
        while len(self._moments) <= k:
            m = len(self._moments)
            self._moments.append(complex(np.sum(self._weights * np.exp(TWO_PI_I * m * self._points))))
            self.counter.summation += self.count
        return self._moments[k]

    def rhs_entry(self, k: int) -> complex:
        if k not in self._rhs:
            self._rhs[k] = complex(np.sum(self._weighted_values * np.exp(TWO_PI_I * k * self._points)))
            self.counter.summation += self.count
        return self._rhs[k]

    def moments(self, n: int) -> np.ndarray:
        """t_0 .. t_{n-1}."""
        return np.array([self.moment(k) for k in range(n)], dtype=complex)

    def matrix(self, degree: int) -> np.ndarray:
        """Dense (2M+1) x (2M+1) matrix with entries t_{k-l}."""
        t = self.moments(2 * degree + 1)
        return dense_toeplitz(t, np.conj(t))

    def rhs_vector(self, degree: int) -> np.ndarray:
        """[b_{-M}, ..., b_M]."""
        return np.array([self.rhs_entry(k) for k in range(-degree, degree + 1)], dtype=complex)


# ==================================================
# GOHBERG-SEMENCUL
# ==================================================


@dataclass(frozen=True)
class GsFactor:
    """First column z of T_M^{-1}; immutable and shareable across workers."""

    z: np.ndarray
    degree: int
    nfft: int = field(default=0)

    @property
    def size(self) -> int:
        return 2 * self.degree + 1


def circulant_size(n: int) -> int:
    """Smallest power of two >= 2n."""
    return 1 << max(2 * n - 1, 1).bit_length()


def _lower_toeplitz_apply(column: np.ndarray, v: np.ndarray, nfft: int) -> np.ndarray:
    """L(column) @ v for a lower-triangular Toeplitz matrix, v of shape (n,) or (n, m)."""
    n = len(column)
    col_hat = np.fft.fft(column, n=nfft)
    if v.ndim == 2:
        col_hat = col_hat[:, None]
    v_hat = np.fft.fft(v, n=nfft, axis=0)
    return np.fft.ifft(col_hat * v_hat, axis=0)[:n]


def gs_factorize(system: ToeplitzSystem, degree: int, levinson_engine: Callable = None) -> GsFactor:
    """Solve T_M z = e_1 with the Levinson engine and keep z."""
    if levinson_engine is None:
        from modules.levinson import solve_toeplitz as levinson_engine

    n = 2 * degree + 1
    unit = np.zeros(n, dtype=complex)
    unit[0] = 1.0
    try:
        z = levinson_engine(system, degree, unit)
    except Breakdown as exc:
        raise SingularSystem(f"cannot factorize T_{degree}: {exc}") from exc

    z = np.asarray(z, dtype=complex)
    if not z[0].real > 0.0:
        raise SingularSystem(f"z_0 = {z[0]!r} is not positive; T_{degree} is not positive definite")
    # z_0 = e_1^* T^{-1} e_1 is real for Hermitian T
    z[0] = z[0].real
    z.setflags(write=False)
    logger.debug(f"Gohberg-Semencul factor built for degree {degree} (z_0={z[0].real:.6e})")
    return GsFactor(z=z, degree=degree, nfft=circulant_size(n))


def gs_apply(factor: GsFactor, b) -> np.ndarray:
    """T_M^{-1} b for a vector or an (2M+1) x m block of right-hand sides.

    L is lower-triangular Toeplitz with first column z; U is upper-triangular
    Toeplitz with last column [z_1, ..., z_{2M}, 0] read top to bottom.
    """
    z = factor.z
    n = len(z)
    b = np.asarray(b, dtype=complex)
    if b.ndim not in (1, 2) or b.shape[0] != n:
        raise DimensionMismatch(f"right-hand side has shape {b.shape}, expected ({n},) or ({n}, m)")
    z0 = z[0].real
    if z0 == 0.0:
        raise ZeroPivot("z_0 = 0; the Gohberg-Semencul form does not exist")

    nfft = factor.nfft or circulant_size(n)
    # U = J L(u) J, U* = L(conj u) with u = [0, z_{n-1}, ..., z_1]
    u = np.zeros(n, dtype=complex)
    u[1:] = z[:0:-1]

    # L* w = J L(conj z) J w
    lb = _lower_toeplitz_apply(z, b, nfft)
    first = _lower_toeplitz_apply(np.conj(z), lb[::-1], nfft)[::-1]

    ub = _lower_toeplitz_apply(np.conj(u), b, nfft)
    second = _lower_toeplitz_apply(u, ub[::-1], nfft)[::-1]

    return (first - second) / z0
