"""Shared generators for the test suite."""

import numpy as np

from modules.levinson import evaluate
from modules.sampling import validate


def jittered_points(r: int, rng, jitter: float = 0.5) -> np.ndarray:
    """Cell midpoints (j + 1/2)/r moved by at most jitter/(2r); mesh norm <= (1 + jitter)/r."""
    offsets = jitter * (rng.random(r) - 0.5)
    return (np.arange(r) + 0.5 + offsets) / r


def uniform_points(r: int) -> np.ndarray:
    return np.arange(r) / r


def random_coefficients(degree: int, rng) -> np.ndarray:
    """a_{-N}..a_N with |a_k| <= 1."""
    n = 2 * degree + 1
    return np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def polynomial_samples(points, coefficients, weights=None):
    x = np.asarray(points, dtype=float)
    return validate(x, evaluate(coefficients, x), weights)


def pad_coefficients(coefficients, degree: int) -> np.ndarray:
    a = np.asarray(coefficients, dtype=complex)
    extra = degree - (len(a) - 1) // 2
    return np.pad(a, (extra, extra))


def weighted_norm_sq(values, weights) -> float:
    return float(np.sum(np.abs(values) ** 2 * weights))
