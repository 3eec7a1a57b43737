"""Closed-form objective, gradient, Hessian and their test oracles."""

from relucert.closed_form.kernels import (
    hess_block_h1,
    hess_block_h2,
    h1_spectrum,
    h2_spectrum,
    kernel_f,
    kernel_grad_g,
    pair_geometry,
    spectral_norm,
)
from relucert.closed_form.objective import (
    gradient_F,
    hessian_F,
    neuron_gradient_norms,
    objective_and_gradient,
    objective_F,
)
from relucert.closed_form.oracles import (
    DEFAULT_FD_STEP,
    fd_gradient_oracle,
    fd_hessian_oracle,
    mc_objective_estimate,
    mc_objective_oracle,
)

__all__ = [
    "DEFAULT_FD_STEP",
    "fd_gradient_oracle",
    "fd_hessian_oracle",
    "gradient_F",
    "h1_spectrum",
    "h2_spectrum",
    "hess_block_h1",
    "hess_block_h2",
    "hessian_F",
    "kernel_f",
    "kernel_grad_g",
    "mc_objective_estimate",
    "mc_objective_oracle",
    "neuron_gradient_norms",
    "objective_and_gradient",
    "objective_F",
    "pair_geometry",
    "spectral_norm",
]
