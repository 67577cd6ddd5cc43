"""Shared exception types."""


class ParseError(ValueError):
    """A problem/graph/schedule file failed to parse.

    Carries the offending line number when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateStateError(RuntimeError):
    """All time bins collapsed to zero counts and the automatic reseed failed."""


class SearchSpaceError(ValueError):
    """A brute-force enumeration would exceed its state-count guard."""
