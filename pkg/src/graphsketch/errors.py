"""Exception types shared across the library."""


class GraphSketchError(Exception):
    """Base class for all library errors."""


class EdgeListParseError(GraphSketchError, ValueError):
    """A malformed line was encountered while reading an edge list."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyDatasetError(GraphSketchError, ValueError):
    """The input contained no usable edges."""


class InvalidParameterError(GraphSketchError, ValueError):
    """An argument violates a documented precondition."""


class IncompatibleSignatureError(GraphSketchError, ValueError):
    """Signatures built with different hash families cannot be compared."""


class InvalidPartitionError(GraphSketchError, ValueError):
    """A community labelling does not cover every vertex."""


class SizeLimitError(GraphSketchError, ValueError):
    """An input exceeds the size bound that keeps queries interactive."""
