"""Exception hierarchy shared by all modules."""

from typing import Optional


class IDInitError(Exception):
    """Base class for library errors."""


class ShapeError(IDInitError, ValueError):
    """Operand dimensions do not chain or match."""


class UnsupportedSizeError(IDInitError, ValueError):
    """A size constraint of a construction is violated (e.g. Hadamard order)."""


class UnsupportedShapeError(IDInitError, ValueError):
    """A kernel or layer shape is not supported by a construction."""


class FormatError(IDInitError, ValueError):
    """Malformed on-disk data.

    Args:
        message: Human readable description
        field: Name of the offending header field
        offset: Byte offset where the problem was detected
    """

    def __init__(self, message: str, field: Optional[str] = None, offset: Optional[int] = None):
        location = []
        if field is not None:
            location.append(f"field={field}")
        if offset is not None:
            location.append(f"offset={offset}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.field = field
        self.offset = offset


class TrainingUnsupportedError(IDInitError, RuntimeError):
    """The network contains a layer the trainer cannot differentiate."""


class ConfigError(IDInitError, ValueError):
    """Invalid run configuration or command-line usage."""
