"""Pairwise arc-cosine kernel closed forms (float path).

For Gaussian input x, E[relu(w.x) relu(v.x)] depends only on the norms
of w and v and the angle between them. These functions evaluate that
kernel, its gradient in w, and the two Hessian blocks.
"""

import logging

import numpy as np

from relucert.models.points import PairGeometry
from relucert.utils.errors import SingularPairError, ZeroNeuronError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def pair_geometry(w: np.ndarray, v: np.ndarray) -> PairGeometry:
    """Angle, sine, cosine and residual direction for the pair (w, v).

    cos(theta) is clamped to [-1, 1] before arccos. A pair whose clamped
    cosine is exactly +-1 is parallel: sin_theta is 0 and n_bar_vw is None.

    Raises:
        ZeroNeuronError: If either vector is zero.
    """
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    w_norm = float(np.linalg.norm(w))
    v_norm = float(np.linalg.norm(v))
    if w_norm == 0.0 or v_norm == 0.0:
        raise ZeroNeuronError("pair_geometry called with a zero vector")

    w_bar = w / w_norm
    v_bar = v / v_norm
    cos_theta = float(np.clip(np.dot(w_bar, v_bar), -1.0, 1.0))
    theta = float(np.arccos(cos_theta))
    parallel = abs(cos_theta) == 1.0
    sin_theta = 0.0 if parallel else float(np.sin(theta))

    n_vw = v_bar - cos_theta * w_bar
    n_bar_vw = None if parallel else n_vw / sin_theta

    return PairGeometry(
        theta=theta,
        sin_theta=sin_theta,
        cos_theta=cos_theta,
        w_norm=w_norm,
        v_norm=v_norm,
        w_bar=w_bar,
        v_bar=v_bar,
        n_vw=n_vw,
        n_bar_vw=n_bar_vw,
    )


def kernel_f(w: np.ndarray, v: np.ndarray) -> float:
    """E[relu(w.x) relu(v.x)] for standard Gaussian x."""
    geo = pair_geometry(w, v)
    return (
        geo.w_norm
        * geo.v_norm
        * (geo.sin_theta + (np.pi - geo.theta) * geo.cos_theta)
        / TWO_PI
    )


def kernel_grad_g(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Gradient of kernel_f with respect to w.

    At parallel pairs the sin(theta) term vanishes, which is the
    continuous limit of the expression.
    """
    geo = pair_geometry(w, v)
    v = np.asarray(v, dtype=np.float64)
    return (geo.v_norm * geo.sin_theta * geo.w_bar + (np.pi - geo.theta) * v) / TWO_PI


def hess_block_h1(w: np.ndarray, v: np.ndarray, allow_parallel: bool = False) -> np.ndarray:
    """Derivative of kernel_grad_g(w, v) with respect to w.

    Args:
        w: First vector.
        v: Second vector.
        allow_parallel: Return the zero limit for a parallel pair instead
            of raising. Only used for neuron-vs-target terms.

    Raises:
        SingularPairError: If the pair is parallel and allow_parallel is False.
    """
    geo = pair_geometry(w, v)
    k = geo.w_bar.shape[0]
    if geo.parallel:
        if allow_parallel:
            return np.zeros((k, k))
        raise SingularPairError("h1 is undefined for a parallel pair")
    scale = geo.sin_theta * geo.v_norm / (TWO_PI * geo.w_norm)
    return scale * (
        np.eye(k)
        - np.outer(geo.w_bar, geo.w_bar)
        + np.outer(geo.n_bar_vw, geo.n_bar_vw)
    )


def hess_block_h2(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Derivative of kernel_grad_g(w, v) with respect to v.

    Raises:
        SingularPairError: If the pair is parallel.
    """
    geo = pair_geometry(w, v)
    if geo.parallel:
        raise SingularPairError("h2 is undefined for a parallel pair")
    k = geo.w_bar.shape[0]
    # n_wv = w_bar - cos(theta) v_bar, normalized
    n_bar_wv = (geo.w_bar - geo.cos_theta * geo.v_bar) / geo.sin_theta
    return (
        (np.pi - geo.theta) * np.eye(k)
        + np.outer(n_bar_wv, geo.v_bar)
        + np.outer(geo.n_bar_vw, geo.w_bar)
    ) / TWO_PI


def h1_spectrum(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues of h1(w, v), ascending."""
    geo = pair_geometry(w, v)
    k = geo.w_bar.shape[0]
    base = geo.sin_theta * geo.v_norm / (TWO_PI * geo.w_norm)
    values = [0.0, 2.0 * base] + [base] * (k - 2)
    return np.sort(np.asarray(values[:k]))


def h2_spectrum(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues of h2(w, v), ascending."""
    geo = pair_geometry(w, v)
    k = geo.w_bar.shape[0]
    rest = (np.pi - geo.theta) / TWO_PI
    values = [
        (np.pi - geo.theta + geo.sin_theta) / TWO_PI,
        (np.pi - geo.theta - geo.sin_theta) / TWO_PI,
    ] + [rest] * (k - 2)
    return np.sort(np.asarray(values[:k]))


def spectral_norm(A: np.ndarray) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    return float(np.max(np.abs(np.linalg.eigvalsh(A))))
