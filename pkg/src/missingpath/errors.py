"""Exception hierarchy for the engine."""


class MissingPathError(Exception):
    """Base class for all engine errors."""


class ValidationError(MissingPathError):
    """A structured query or configuration violates its invariants."""


class TransportError(MissingPathError):
    """Network-level failure talking to an endpoint; retryable."""


class EndpointError(MissingPathError):
    """The endpoint answered with a non-2xx status."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class DecodeError(MissingPathError):
    """The endpoint returned a malformed results document."""


class FixtureParseError(MissingPathError):
    """An N-Triples fixture file failed to parse."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyCollectionError(MissingPathError):
    """The collection has no instances."""


class UnpartitionableError(MissingPathError):
    """No partition plan fits under the endpoint quota."""


class IntegrityError(MissingPathError):
    """Retrieved data contradicts what was already established."""


class StoreFormatError(MissingPathError):
    """Persisted store files are corrupted or from another version."""
