"""Exception types shared across the toolkit.

Everything raised on purpose derives from StaxError, so callers (notably the
CLI) can tell our failures apart from genuine bugs.
"""

from __future__ import annotations


class StaxError(Exception):
    """Base class for all errors raised by stax-kit."""


class MalformedIri(StaxError):
    """IRI value violates the conservative syntactic subset we accept."""


class ParseError(StaxError):
    """A line of N-Triples/N-Quads input could not be parsed.

    Line and column are 1-based; column points at the offending character.
    """

    def __init__(self, line: int, column: int, reason: str):
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class MixedPayload(StaxError):
    """Statement or element kind does not match the framing's payload."""


class SchemaError(StaxError):
    """A manifest document does not match its schema."""


class CycleError(StaxError):
    """The broader hierarchy of a taxonomy contains a cycle."""


class DanglingReference(StaxError):
    """A taxonomy relation edge points at an unknown type id."""


class UnknownType(StaxError):
    """A stream type id is not present in the taxonomy."""


class UnknownStreamType(UnknownType):
    """An annotation manifest names a stream type the taxonomy does not define."""


class EmptyUsages(StaxError):
    """An annotation manifest declares no stream type usages."""


class InvalidBatchSize(StaxError):
    """Grouping was requested with a batch size below 1."""


class NamedGraphPresent(StaxError):
    """Projection hit an element that carries named-graph content."""

    def __init__(self, element_index: int, message: str | None = None):
        super().__init__(message or f"element {element_index} carries a named graph")
        self.element_index = element_index


class NoConversionPath(StaxError):
    """No conversion path exists between the requested stream types."""

    def __init__(self, from_type: str, to_type: str, policy: str):
        super().__init__(
            f"no {policy} conversion path from {from_type} to {to_type}"
        )
        self.from_type = from_type
        self.to_type = to_type
        self.policy = policy
