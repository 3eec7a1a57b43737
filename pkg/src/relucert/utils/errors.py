"""Custom exceptions and error logging for relucert."""

from datetime import datetime
from pathlib import Path
from typing import Optional, Tuple


class ReluCertError(Exception):
    """Base exception for every failure raised by relucert."""

    pass


# =============================================================================
# Singular configurations (the objective is not smooth there)
# =============================================================================


class SingularConfigurationError(ReluCertError):
    """Base class for points where F is not differentiable enough."""

    pass


class ZeroNeuronError(SingularConfigurationError):
    """Raised when a neuron (or target) vector is exactly zero.

    The kernel closed forms divide by the vector norms, so a zero
    row has no angle and no derivative.
    """

    pass


class SingularPairError(SingularConfigurationError):
    """Raised when a Hessian block is requested for a parallel pair.

    Attributes:
        pair: Indices (or labels) of the offending pair, when known.
    """

    def __init__(self, message: str, pair: Optional[Tuple[str, str]] = None):
        super().__init__(message)
        self.pair = pair


class SingularEncounterError(SingularConfigurationError):
    """Raised when a gradient descent iterate lands on a zero neuron."""

    pass


class SingularEnclosureError(SingularConfigurationError):
    """Raised when a rigorous sin(theta) enclosure contains zero.

    Attributes:
        pair: Labels of the pair, e.g. ("w3", "v1").
    """

    def __init__(self, message: str, pair: Optional[Tuple[str, str]] = None):
        super().__init__(message)
        self.pair = pair


class SymmetryUnavailableError(ReluCertError):
    """Raised when canonicalization is asked for non-standard targets.

    Coordinate permutations are only a symmetry of F when the targets
    are the standard basis.
    """

    pass


# =============================================================================
# Refusals: inconclusive outcomes of the certification pipeline
# =============================================================================


class RefusalError(ReluCertError):
    """Base class for inconclusive certification outcomes.

    A refusal never proves that no minimum exists; it only means the
    available bounds were not tight enough.
    """

    pass


class NotDiagonallyDominantError(RefusalError):
    """Raised when U^T U is not diagonally dominant."""

    pass


class CEnclosureTooLargeError(RefusalError):
    """Raised when the orthogonality defect C = ||I - U^T U||_F is >= 1."""

    pass


class NotPositiveDefiniteError(RefusalError):
    """Raised when the eigenvalue lower bound is not positive."""

    pass


class DiscriminantNegativeError(RefusalError):
    """Raised when 9*lambda^2 - 25*B*eps < 0."""

    pass


class RadiusExceedsAlphaError(RefusalError):
    """Raised when the certified radius is not below alpha."""

    pass


class BallContainsOriginError(RefusalError):
    """Raised when the radius-r ball reaches a zero neuron."""

    pass


class DegenerateBallError(RefusalError):
    """Raised when the minimal neuron norm over a ball may be zero."""

    pass


class CertificationRefusedError(RefusalError):
    """Wraps a refusal with the pipeline stage that produced it.

    Attributes:
        stage: Name of the pipeline stage ("gradient", "eigen_bound", ...).
        cause: The underlying exception.
    """

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


class IndeterminateEnclosureError(ReluCertError):
    """Raised when enclosures overlap and a decision cannot be made.

    Retrying at a higher precision may resolve it.
    """

    pass


# =============================================================================
# Persistence
# =============================================================================


class SchemaMismatchError(ReluCertError):
    """Raised when a stored file declares an unexpected schema."""

    pass


class InvariantViolationOnLoadError(ReluCertError):
    """Raised when a stored certificate fails re-validation."""

    pass


def log_error(
    error: Exception,
    source: str,
    log_path: str = "relucert-errors.log"
) -> None:
    """Append a timestamped error entry to the log file.

    Writes errors in a consistent format for later analysis:
    [ISO timestamp] [source] ErrorType: message

    Args:
        error: The exception that occurred.
        source: The candidate file or context where the error occurred.
        log_path: Path to the error log file (default: relucert-errors.log).
    """
    timestamp = datetime.now().isoformat(timespec="seconds")
    error_type = type(error).__name__
    message = str(error)

    log_entry = f"[{timestamp}] [{source}] {error_type}: {message}\n"

    log_file = Path(log_path)
    with open(log_file, "a", encoding="utf-8") as f:
        f.write(log_entry)
