"""
Levinson-Galerkin engine.

Solves the nested Hermitian Toeplitz normal equations T_M c = b one degree at
a time. Each degree M -> M+1 is two border steps: an odd step that appends
the unknown for frequency M+1 below the current solution, and an even step
that prepends the unknown for frequency -(M+1) on top. Both reuse the
Yule-Walker solution y (T_l y = -[t_1, ..., t_l]) and its pivot beta.

After every completed degree the weighted relative residual is available in
O(M) from sigma - Re<b, c>, so the discrepancy test costs nothing extra.
The first degree whose residual drops below epsilon is returned.

Orientation: the recursion vector c is indexed -M..M and satisfies
sum_l t_{k-l} c_l = b_k. The fitted polynomial is p(x) = sum_k a_k e^{2 pi i k x}
with a_k = c_{-k}, so every public coefficient vector is the reversed c.
"""

from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from config import BREAKDOWN_ALPHA_TOL, BREAKDOWN_BETA_TOL, ROUNDOFF_FLOOR
from modules.errors import (
    Breakdown,
    DegreeTooLarge,
    DimensionMismatch,
    GridTooSmall,
    ValidationError,
    ZeroData,
)
from modules.log_setup import get_logger
from modules.sampling import NoiseSpec, SampleSet1D
from modules.toeplitz import OpCounter, ToeplitzSystem

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("levinson")

# ==================================================
# TYPES
# ==================================================


@dataclass(frozen=True)
class LevinsonState:
    """Recursion carry for the system of dimension `level`.

    `moments` holds t_0..t_level. `yw` is None once the state is terminal
    (the last admissible degree was completed without advancing y).
    """

    level: int
    moments: np.ndarray
    yw: Optional[np.ndarray]
    sol: np.ndarray
    rhs: np.ndarray
    beta: float
    alpha: complex
    sigma: float
    eps_l: float

    @property
    def degree(self) -> int:
        return (self.level - 1) // 2

    @property
    def complete(self) -> bool:
        return self.level % 2 == 1

    @property
    def terminal(self) -> bool:
        return self.yw is None

    @property
    def coefficients(self) -> np.ndarray:
        return self.sol[::-1].copy()


@dataclass(frozen=True)
class FitResult:
    """Minimal-degree fit: coefficients a_{-N}..a_N of p and the residual trail.

    `residual_history` holds (degree, relative squared residual) per
    completed degree; `achieved_eps` is the square root of the last entry.
    """

    degree: int
    coefficients: np.ndarray
    achieved_eps: float
    converged: bool
    residual_history: Tuple[Tuple[int, float], ...]

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0j
        return complex(self.coefficients[k + self.degree])

    def evaluate(self, x) -> np.ndarray:
        return evaluate(self.coefficients, x)

    def evaluate_on_grid(self, n: int) -> np.ndarray:
        return evaluate_on_grid(self.coefficients, n)

    def to_dict(self) -> dict:
        return {
            "degree": int(self.degree),
            "converged": bool(self.converged),
            "achieved_eps": float(self.achieved_eps),
            "coefficients": [
                {"k": int(k), "re": float(c.real), "im": float(c.imag)}
                for k, c in zip(self.frequencies, self.coefficients)
            ],
            "residual_history": [[int(level), float(eps)] for level, eps in self.residual_history],
        }


# ==================================================
# RECURSION STEPS
# ==================================================

def _check_pivot(state: LevinsonState) -> None:
    t0 = state.moments[0].real
    if state.beta <= BREAKDOWN_BETA_TOL * t0 or abs(state.alpha) >= 1.0 - BREAKDOWN_ALPHA_TOL:
        raise Breakdown(state.level, state.beta, state.alpha)


def _relative_residual(sigma: float, sol: np.ndarray, rhs: np.ndarray) -> float:
    if sigma == 0.0:
        return 0.0
    return abs(sigma - np.vdot(sol, rhs).real) / sigma


def _advance_yw(moments, yw, beta, t_next, counter: Optional[OpCounter]):
    """y -> y' for one more dimension; returns (moments', y', beta', alpha)."""
    n = len(yw)
    moments = np.append(moments, t_next)
    # r* y = sum_j t_{n-j} y_j
    alpha = -(t_next + np.dot(moments[n:0:-1], yw)) / beta
    yw = np.append(yw + alpha * np.conj(yw[::-1]), alpha)
    beta = (1.0 - abs(alpha) ** 2) * beta
    if counter is not None:
        counter.recursion += 2 * n
    return moments, yw, float(beta), complex(alpha)


def initial_state(system: ToeplitzSystem, b0: complex = None) -> LevinsonState:
    """Degree 0: c = [b_0 / t_0] and y = [-t_1 / t_0]."""
    t0 = system.t0
    if b0 is None:
        b0 = system.rhs_entry(0)
    sol = np.array([b0 / t0], dtype=complex)
    rhs = np.array([b0], dtype=complex)
    # beta_0 = t_0 before the first Yule-Walker step
    moments, yw, beta, alpha = _advance_yw(
        np.array([complex(t0)]), np.zeros(0, dtype=complex), t0, system.moment(1), system.counter
    )
    return LevinsonState(
        level=1,
        moments=moments,
        yw=yw,
        sol=sol,
        rhs=rhs,
        beta=beta,
        alpha=alpha,
        sigma=system.sigma,
        eps_l=_relative_residual(system.sigma, sol, rhs),
    )


def step_odd(state: LevinsonState, t_next: complex, b_next: complex,
             counter: Optional[OpCounter] = None) -> LevinsonState:
    """Border below with b_{M+1}, then advance y with t_{level+1}."""
    if not state.complete:
        raise ValidationError(f"odd step needs an odd level, got {state.level}")
    if state.terminal:
        raise ValidationError(f"state at level {state.level} is terminal and cannot be extended")
    _check_pivot(state)

    n = state.level
    sol, yw = state.sol, state.yw
    mu = (b_next - np.dot(state.moments[n:0:-1], sol)) / state.beta
    sol = np.append(sol + mu * np.conj(yw[::-1]), mu)
    rhs = np.append(state.rhs, b_next)
    if counter is not None:
        counter.recursion += 2 * n

    moments, yw, beta, alpha = _advance_yw(state.moments, yw, state.beta, t_next, counter)
    return replace(
        state, level=n + 1, moments=moments, yw=yw, sol=sol, rhs=rhs, beta=beta, alpha=alpha
    )


def step_even(state: LevinsonState, b_next: complex, t_next: complex = None,
              counter: Optional[OpCounter] = None) -> LevinsonState:
    """Border on top with b_{-(M+1)}; completes degree M+1.

    Without `t_next` the Yule-Walker solution is not advanced and the
    returned state is terminal.
    """
    if state.complete:
        raise ValidationError(f"even step needs an even level, got {state.level}")
    _check_pivot(state)

    n = state.level
    sol, yw = state.sol, state.yw
    # q* x = sum_i conj(t_{i+1}) x_i
    mu = (b_next - np.vdot(state.moments[1:n + 1], sol)) / state.beta
    sol = np.concatenate(([mu], sol + mu * yw))
    rhs = np.concatenate(([b_next], state.rhs))
    if counter is not None:
        counter.recursion += 2 * n

    eps_l = _relative_residual(state.sigma, sol, rhs)
    if counter is not None:
        counter.recursion += n + 1

    if t_next is None:
        return replace(state, level=n + 1, yw=None, sol=sol, rhs=rhs, eps_l=eps_l)

    moments, yw, beta, alpha = _advance_yw(state.moments, yw, state.beta, t_next, counter)
    return replace(
        state, level=n + 1, moments=moments, yw=yw, sol=sol, rhs=rhs,
        beta=beta, alpha=alpha, eps_l=eps_l,
    )


def advance_degree(system: ToeplitzSystem, state: LevinsonState, final: bool = False) -> LevinsonState:
    """Degree M -> M+1 from the cached system; `final` leaves the state terminal."""
    m = state.degree + 1
    level = state.level
    state = step_odd(state, system.moment(level + 1), system.rhs_entry(m), system.counter)
    t_next = None if final else system.moment(level + 2)
    return step_even(state, system.rhs_entry(-m), t_next, system.counter)


def residual_sq(state: LevinsonState) -> float:
    """Relative squared weighted residual of the current solution, in O(level)."""
    if state.sigma == 0.0:
        raise ZeroData("all samples are zero; the relative residual is undefined")
    return _relative_residual(state.sigma, state.sol, state.rhs)


# ==================================================
# DRIVERS
# ==================================================

def _as_noise(noise) -> NoiseSpec:
    return noise if isinstance(noise, NoiseSpec) else NoiseSpec(noise)


def stop_level(noise, count: int) -> float:
    """Largest eps_l accepted: epsilon squared, floored at the roundoff level of r samples."""
    noise = _as_noise(noise)
    return max(noise.epsilon ** 2, ROUNDOFF_FLOOR * count * float(np.finfo(float).eps))


def _resolve_max_degree(samples: SampleSet1D, max_degree) -> int:
    limit = samples.max_degree
    if max_degree is None:
        return limit
    max_degree = int(max_degree)
    if max_degree < 0:
        raise ValidationError(f"max_degree must be nonnegative, got {max_degree}")
    if max_degree > limit:
        raise DegreeTooLarge(
            f"degree {max_degree} needs {2 * max_degree + 1} samples, only {samples.count} given"
        )
    return max_degree


def fit(samples: SampleSet1D, noise, max_degree: int = None,
        counter: Optional[OpCounter] = None) -> FitResult:
    """Smallest degree whose weighted residual is within epsilon of the data norm."""
    noise = _as_noise(noise)
    max_degree = _resolve_max_degree(samples, max_degree)
    system = ToeplitzSystem(samples, counter)

    if system.sigma == 0.0:
        logger.info("all samples are zero; returning the zero polynomial")
        return FitResult(
            degree=0,
            coefficients=np.zeros(1, dtype=complex),
            achieved_eps=0.0,
            converged=True,
            residual_history=((0, 0.0),),
        )

    target = stop_level(noise, samples.count)
    state = initial_state(system)
    history = [(0, state.eps_l)]
    logger.debug(f"degree 0: eps_l={state.eps_l:.6e}")

    try:
        while state.eps_l > target and state.degree < max_degree:
            state = advance_degree(system, state, final=state.degree + 1 == max_degree)
            history.append((state.degree, state.eps_l))
            logger.debug(f"degree {state.degree}: eps_l={state.eps_l:.6e} beta={state.beta:.6e}")
    except Breakdown as exc:
        logger.warning(f"{exc} after {len(history)} completed degrees")
        raise exc.with_history(history) from exc

    achieved = float(np.sqrt(state.eps_l))
    interpolates = 2 * state.degree + 1 == samples.count
    converged = state.eps_l <= target or interpolates
    if converged:
        logger.info(f"stopped at degree {state.degree} (residual {achieved:.3e}, epsilon {noise.epsilon})")
    else:
        logger.warning(
            f"no degree up to {max_degree} reached epsilon {noise.epsilon}; best residual {achieved:.3e}"
        )

    return FitResult(
        degree=state.degree,
        coefficients=state.coefficients,
        achieved_eps=achieved,
        converged=converged,
        residual_history=tuple(history),
    )


def solve_fixed_degree(samples: SampleSet1D, degree: int,
                       counter: Optional[OpCounter] = None) -> np.ndarray:
    """Least-squares coefficients a_{-M}..a_M at a forced degree M."""
    if 2 * degree + 1 > samples.count:
        raise DegreeTooLarge(f"degree {degree} needs {2 * degree + 1} samples, only {samples.count} given")
    system = ToeplitzSystem(samples, counter)
    state = initial_state(system)
    for m in range(1, degree + 1):
        state = advance_degree(system, state, final=m == degree)
    return state.coefficients


def solve_toeplitz(system: ToeplitzSystem, degree: int, rhs) -> np.ndarray:
    """Solve T_M c = rhs for an explicit right-hand side ordered b_{-M}..b_M.

    Returns c in the same ordering (no reversal).
    """
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape != (2 * degree + 1,):
        raise DimensionMismatch(f"expected {2 * degree + 1} right-hand side entries, got {rhs.shape}")

    state = initial_state(system, b0=rhs[degree])
    counter = system.counter
    for m in range(1, degree + 1):
        level = state.level
        state = step_odd(state, system.moment(level + 1), rhs[degree + m], counter)
        t_next = None if m == degree else system.moment(level + 2)
        state = step_even(state, rhs[degree - m], t_next, counter)
    return state.sol.copy()


# ==================================================
# EVALUATION
# ==================================================

def evaluate(coefficients, x) -> np.ndarray:
    """p(x) = sum_k a_k exp(2 pi i k x) by direct summation."""
    a = np.asarray(coefficients, dtype=complex)
    degree = (len(a) - 1) // 2
    k = np.arange(-degree, degree + 1)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.exp(2j * np.pi * np.outer(x, k)) @ a


def evaluate_on_grid(coefficients, n: int) -> np.ndarray:
    """p(j/n), j = 0..n-1, through one zero-padded inverse FFT."""
    a = np.asarray(coefficients, dtype=complex)
    if n < len(a):
        raise GridTooSmall(f"grid of {n} points cannot resolve {len(a)} coefficients")
    degree = (len(a) - 1) // 2
    spectrum = np.zeros(n, dtype=complex)
    spectrum[np.arange(-degree, degree + 1) % n] = a
    return n * np.fft.ifft(spectrum)


def cosine_sine_form(coefficients) -> Tuple[np.ndarray, np.ndarray]:
    """(A, B) with p(x) = A_0 + sum_k A_k cos(2 pi k x) + B_k sin(2 pi k x); B_0 = 0."""
    a = np.asarray(coefficients, dtype=complex)
    degree = (len(a) - 1) // 2
    pos = a[degree:]
    neg = a[degree::-1]
    cosines = pos + neg
    cosines[0] = a[degree]
    sines = 1j * (pos - neg)
    return cosines, sines


def fit_real(samples: SampleSet1D, noise, max_degree: int = None):
    """Fit real data and return (FitResult, cosines, sines) with real arrays."""
    if np.any(samples.values.imag != 0.0):
        raise ValidationError("fit_real expects real-valued samples")
    result = fit(samples, noise, max_degree)
    cosines, sines = cosine_sine_form(result.coefficients)
    return result, cosines.real.copy(), sines.real.copy()
