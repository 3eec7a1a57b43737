"""Closed-form population loss F, its gradient and its Hessian.

F(W) = 1/2 sum_ij f(w_i, w_j) - sum_ij f(w_i, v_j) + 1/2 sum_ij f(v_i, v_j)

The gradient path is vectorized over all pairs because gradient descent
calls it millions of times. The Hessian is assembled block by block from
the pairwise h1/h2 closed forms.
"""

from typing import Tuple

import numpy as np

from relucert.closed_form.kernels import TWO_PI, hess_block_h1, hess_block_h2
from relucert.models.points import TargetBasis, WeightPoint
from relucert.utils.errors import SingularPairError, ZeroNeuronError


def _as_arrays(W, V) -> Tuple[np.ndarray, np.ndarray]:
    Wm = W.W if isinstance(W, WeightPoint) else np.asarray(W, dtype=np.float64)
    Vm = V.vectors if isinstance(V, TargetBasis) else np.asarray(V, dtype=np.float64)
    if Wm.shape[1] != Vm.shape[1]:
        raise ValueError(
            f"neurons live in R^{Wm.shape[1]} but targets in R^{Vm.shape[1]}"
        )
    return Wm, Vm


def _pair_tables(A: np.ndarray, B: np.ndarray, a_norm: np.ndarray, b_norm: np.ndarray):
    """theta and sin(theta) for all rows of A against all rows of B."""
    cos = (A / a_norm[:, None]) @ (B / b_norm[:, None]).T
    np.clip(cos, -1.0, 1.0, out=cos)
    theta = np.arccos(cos)
    sin = np.sin(theta)
    sin[np.abs(cos) == 1.0] = 0.0
    return cos, theta, sin


def _kernel_sum(a_norm, b_norm, cos, theta, sin) -> float:
    return float(
        np.sum(np.outer(a_norm, b_norm) * (sin + (np.pi - theta) * cos)) / TWO_PI
    )


def objective_and_gradient(W, V) -> Tuple[float, np.ndarray]:
    """F(W) and its gradient as an n x d array (row i = block for w_i).

    Raises:
        ZeroNeuronError: If any neuron is exactly zero.
    """
    Wm, Vm = _as_arrays(W, V)
    w_norm = np.linalg.norm(Wm, axis=1)
    v_norm = np.linalg.norm(Vm, axis=1)
    if np.any(w_norm == 0.0):
        raise ZeroNeuronError(f"zero neuron at index {int(np.argmin(w_norm))}")

    cos_ww, theta_ww, sin_ww = _pair_tables(Wm, Wm, w_norm, w_norm)
    cos_wv, theta_wv, sin_wv = _pair_tables(Wm, Vm, w_norm, v_norm)
    cos_vv, theta_vv, sin_vv = _pair_tables(Vm, Vm, v_norm, v_norm)
    # f(w, w) = |w|^2 / 2 exactly
    np.fill_diagonal(theta_ww, 0.0)
    np.fill_diagonal(cos_ww, 1.0)
    np.fill_diagonal(sin_ww, 0.0)
    np.fill_diagonal(theta_vv, 0.0)
    np.fill_diagonal(cos_vv, 1.0)
    np.fill_diagonal(sin_vv, 0.0)

    value = (
        0.5 * _kernel_sum(w_norm, w_norm, cos_ww, theta_ww, sin_ww)
        - _kernel_sum(w_norm, v_norm, cos_wv, theta_wv, sin_wv)
        + 0.5 * _kernel_sum(v_norm, v_norm, cos_vv, theta_vv, sin_vv)
    )

    w_bar = Wm / w_norm[:, None]
    off = ~np.eye(Wm.shape[0], dtype=bool)
    sin_off = np.where(off, sin_ww, 0.0)
    angle_off = np.where(off, np.pi - theta_ww, 0.0)

    grad = 0.5 * Wm
    grad = grad + ((sin_off @ w_norm)[:, None] * w_bar + angle_off @ Wm) / TWO_PI
    grad = grad - ((sin_wv @ v_norm)[:, None] * w_bar + (np.pi - theta_wv) @ Vm) / TWO_PI
    return value, grad


def objective_F(W, V) -> float:
    """Closed-form population loss; nonnegative up to rounding."""
    return objective_and_gradient(W, V)[0]


def gradient_F(W, V) -> np.ndarray:
    """Gradient of F as a flat vector of length n*d (row-major blocks)."""
    return objective_and_gradient(W, V)[1].reshape(-1)


def neuron_gradient_norms(grad: np.ndarray) -> np.ndarray:
    """Per-neuron block norms of an n x d gradient array."""
    return np.linalg.norm(grad, axis=1)


def hessian_F(W, V) -> np.ndarray:
    """Hessian of F as an (n*d) x (n*d) symmetric matrix.

    Diagonal block i is 1/2 I + sum_{j != i} h1(w_i, w_j) - sum_j h1(w_i, v_j);
    off-diagonal block (i, j) is h2(w_i, w_j). A neuron exactly parallel to
    a target contributes the zero limit of its h1 term.

    Raises:
        SingularPairError: If two neurons are parallel.
        ZeroNeuronError: If any neuron is zero.
    """
    Wm, Vm = _as_arrays(W, V)
    n, d = Wm.shape
    H = np.zeros((n * d, n * d))
    for i in range(n):
        rows = slice(i * d, (i + 1) * d)
        block = 0.5 * np.eye(d)
        for j in range(n):
            if j == i:
                continue
            try:
                block += hess_block_h1(Wm[i], Wm[j])
            except SingularPairError as e:
                raise SingularPairError(str(e), pair=(f"w{i}", f"w{j}")) from e
        for j in range(Vm.shape[0]):
            block -= hess_block_h1(Wm[i], Vm[j], allow_parallel=True)
        H[rows, rows] = block
        for j in range(i + 1, n):
            cols = slice(j * d, (j + 1) * d)
            try:
                h2 = hess_block_h2(Wm[i], Wm[j])
            except SingularPairError as e:
                raise SingularPairError(str(e), pair=(f"w{i}", f"w{j}")) from e
            H[rows, cols] = h2
            H[cols, rows] = h2.T
    return 0.5 * (H + H.T)
