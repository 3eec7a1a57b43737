"""Utility functions for relucert."""

from relucert.utils.errors import (
    BallContainsOriginError,
    CEnclosureTooLargeError,
    CertificationRefusedError,
    DegenerateBallError,
    DiscriminantNegativeError,
    IndeterminateEnclosureError,
    InvariantViolationOnLoadError,
    NotDiagonallyDominantError,
    NotPositiveDefiniteError,
    RadiusExceedsAlphaError,
    RefusalError,
    ReluCertError,
    SchemaMismatchError,
    SingularConfigurationError,
    SingularEnclosureError,
    SingularEncounterError,
    SingularPairError,
    SymmetryUnavailableError,
    ZeroNeuronError,
    log_error,
)

__all__ = [
    "BallContainsOriginError",
    "CEnclosureTooLargeError",
    "CertificationRefusedError",
    "DegenerateBallError",
    "DiscriminantNegativeError",
    "IndeterminateEnclosureError",
    "InvariantViolationOnLoadError",
    "NotDiagonallyDominantError",
    "NotPositiveDefiniteError",
    "RadiusExceedsAlphaError",
    "RefusalError",
    "ReluCertError",
    "SchemaMismatchError",
    "SingularConfigurationError",
    "SingularEnclosureError",
    "SingularEncounterError",
    "SingularPairError",
    "SymmetryUnavailableError",
    "ZeroNeuronError",
    "log_error",
]
