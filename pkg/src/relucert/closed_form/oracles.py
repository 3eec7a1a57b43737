"""Independent oracles for testing the closed forms.

The Monte Carlo estimator samples the defining expectation directly;
the finite-difference oracles differentiate the closed forms numerically.
"""

from typing import Tuple

import numpy as np

from relucert.closed_form.objective import _as_arrays, gradient_F, objective_F

DEFAULT_FD_STEP = 1e-5
MC_CHUNK = 100_000


def mc_objective_estimate(W, V, samples: int, seed: int) -> Tuple[float, float]:
    """Monte Carlo mean and standard error of the population loss.

    The integrand is 1/2 (sum_i relu(w_i.x) - sum_j relu(v_j.x))^2 with
    x ~ N(0, I). Samples are drawn in chunks to bound memory.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    Wm, Vm = _as_arrays(W, V)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    remaining = samples
    while remaining > 0:
        size = min(MC_CHUNK, remaining)
        X = rng.standard_normal((size, Wm.shape[1]))
        diff = np.maximum(X @ Wm.T, 0.0).sum(axis=1) - np.maximum(X @ Vm.T, 0.0).sum(axis=1)
        values = 0.5 * diff * diff
        total += float(values.sum())
        total_sq += float((values * values).sum())
        remaining -= size
    mean = total / samples
    if samples == 1:
        return mean, float("inf")
    variance = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, float(np.sqrt(variance / samples))


def mc_objective_oracle(W, V, samples: int, seed: int) -> float:
    """Unbiased Monte Carlo estimate of F(W)."""
    return mc_objective_estimate(W, V, samples, seed)[0]


def fd_gradient_oracle(W, V, step: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central finite differences of objective_F, flat row-major vector."""
    if step <= 0:
        raise ValueError("step must be positive")
    Wm, Vm = _as_arrays(W, V)
    x = Wm.reshape(-1)
    grad = np.empty_like(x)
    for idx in range(x.size):
        plus = x.copy()
        minus = x.copy()
        plus[idx] += step
        minus[idx] -= step
        grad[idx] = (
            objective_F(plus.reshape(Wm.shape), Vm) - objective_F(minus.reshape(Wm.shape), Vm)
        ) / (2.0 * step)
    return grad


def fd_hessian_oracle(W, V, step: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central finite differences of gradient_F, symmetrized."""
    if step <= 0:
        raise ValueError("step must be positive")
    Wm, Vm = _as_arrays(W, V)
    x = Wm.reshape(-1)
    H = np.empty((x.size, x.size))
    for idx in range(x.size):
        plus = x.copy()
        minus = x.copy()
        plus[idx] += step
        minus[idx] -= step
        H[:, idx] = (
            gradient_F(plus.reshape(Wm.shape), Vm) - gradient_F(minus.reshape(Wm.shape), Vm)
        ) / (2.0 * step)
    return 0.5 * (H + H.T)
