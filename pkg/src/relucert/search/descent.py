"""Plain gradient descent on the closed-form loss.

Each run owns a private numpy Generator seeded from its config, so a
(config, targets) pair always reproduces the same RunRecord.
"""

import logging
from typing import Optional

import numpy as np

from relucert.closed_form.objective import neuron_gradient_norms, objective_and_gradient
from relucert.models.points import TargetBasis, WeightPoint
from relucert.models.records import Classification, GDConfig, RunRecord, classify
from relucert.utils.errors import SingularEncounterError, ZeroNeuronError

logger = logging.getLogger(__name__)

# Rounding noise allowed before a step counts as an increase
DESCENT_SLACK = 1e-13


def xavier_init(k: int, n: int, rng: np.random.Generator) -> WeightPoint:
    """n neurons in R^k drawn i.i.d. from N(0, I/k)."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    return WeightPoint(rng.normal(0.0, 1.0 / np.sqrt(k), size=(n, k)))


def run_seed(base_seed: int, run_index: int) -> int:
    """Seed of run number run_index within an experiment."""
    return base_seed ^ run_index


def gd_run(
    config: GDConfig,
    V: TargetBasis,
    init: Optional[WeightPoint] = None,
) -> RunRecord:
    """Iterate W <- W - step * grad F(W) until every neuron block is small.

    Args:
        config: Step size, tolerance, iteration cap and seed.
        V: Target neurons.
        init: Starting point; drawn with xavier_init from the seed if omitted.

    Returns:
        RunRecord with the terminal point and its classification.

    Raises:
        SingularEncounterError: If an iterate has an exactly zero neuron.
    """
    if init is None:
        W = xavier_init(V.d, config.n, np.random.default_rng(config.seed)).W.copy()
    else:
        if init.W.shape != (config.n, V.d):
            raise ValueError(
                f"initial point has shape {init.W.shape}, expected {(config.n, V.d)}"
            )
        W = init.W.copy()

    Vm = V.vectors
    violations = 0
    iterations = 0
    try:
        value, grad = objective_and_gradient(W, Vm)
        while True:
            block_norm = float(np.max(neuron_gradient_norms(grad)))
            if block_norm <= config.grad_tol or iterations >= config.max_iters:
                break
            W = W - config.step_size * grad
            iterations += 1
            previous = value
            value, grad = objective_and_gradient(W, Vm)
            if value > previous + DESCENT_SLACK * max(1.0, abs(previous)):
                violations += 1
    except ZeroNeuronError as e:
        raise SingularEncounterError(
            f"seed {config.seed}: iterate {iterations} hit a zero neuron"
        ) from e

    converged = block_norm <= config.grad_tol
    label = classify(value, converged)
    if violations:
        logger.warning(
            "seed %d: objective increased on %d of %d steps", config.seed, violations, iterations
        )
    if label is Classification.ANOMALY:
        logger.warning(
            "seed %d: converged with objective %.6g inside the anomaly band", config.seed, value
        )
    logger.debug(
        "seed %d: %s after %d iterations, objective %.6g, grad %.3g",
        config.seed,
        label.value,
        iterations,
        value,
        block_norm,
    )

    return RunRecord(
        config=config,
        terminal=WeightPoint(W),
        iterations=iterations,
        objective=float(value),
        grad_norm=block_norm,
        classification=label,
        descent_violations=violations,
    )
