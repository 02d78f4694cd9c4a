"""Shared exception types."""


class CzsimError(Exception):
    """Base class for all czsim-specific failures."""


class AmbiguousLabelingError(CzsimError):
    """Dressed-state labeling is not meaningful (hybridized/resonant regime).

    Raised when some eigenvector's assigned bare-state overlap falls below
    the 0.5 threshold; `labels` carries the offending bare labels.
    """

    def __init__(self, labels, message=None):
        self.labels = tuple(labels)
        if message is None:
            message = f"ambiguous dressed-state labeling for {self.labels}"
        super().__init__(message)


class SingularConfigurationError(CzsimError):
    """A closed-form expression hit a vanishing denominator."""


class IntegrationFailureError(CzsimError):
    """Time propagation lost unitarity beyond the accepted tolerance."""


class PhaseUndefinedError(CzsimError):
    """A diagonal block entry is too small for its phase to be meaningful."""
