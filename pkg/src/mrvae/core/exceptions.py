from typing import Optional


class MRVAEError(Exception):
    """Base exception class for the mrvae package."""

    pass


class DimensionError(MRVAEError):
    """Raised when array shapes are inconsistent with an operation."""

    pass


class DomainError(MRVAEError):
    """Raised when an argument lies outside the domain of a formula (e.g. beta <= 0)."""

    pass


class NumericalError(MRVAEError):
    """Raised on non-finite values or failure to converge."""

    def __init__(
        self,
        message: str,
        layer_index: Optional[int] = None,
        batch_index: Optional[int] = None,
    ):
        self.layer_index = layer_index
        self.batch_index = batch_index
        details = []
        if layer_index is not None:
            details.append(f"layer {layer_index}")
        if batch_index is not None:
            details.append(f"batch {batch_index}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class StateError(MRVAEError):
    """Raised when a tape, checkpoint or optimizer state does not match its model."""

    pass


class ConstructionError(MRVAEError):
    """Raised when the constructive hypernetwork cannot be built for the given inputs."""

    pass


class FormatError(MRVAEError):
    """Raised for malformed input files."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at byte offset {offset}"
        super().__init__(message)


class ConfigError(MRVAEError):
    """Raised for invalid run configuration."""

    pass
