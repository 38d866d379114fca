"""
Error Module

Typed errors for every layer of the cipher pipeline. Each class carries the
process exit code the CLI reports for it.

Exit codes:
    0  ok
    1  unexpected failure (embedding failure)
    2  usage error
    3  parse/format error
    4  key error
    5  sequence mismatch / unknown sequence
    6  tamper detected
    7  entropy failure
"""

from typing import Optional


class DeccError(Exception):
    """Base class for all errors raised by the library."""

    exit_code = 1


class UsageError(DeccError, ValueError):
    exit_code = 2


class ModulusMismatchError(UsageError):
    """Field elements from different moduli were combined."""


class RangeError(UsageError):
    """A value lies outside the range an operation accepts."""


class CapacityError(UsageError):
    """The reference sequence is too short for the plaintext."""


class FieldDivisionError(DeccError, ZeroDivisionError):
    exit_code = 2


class ParseError(DeccError, ValueError):
    """
    Malformed input. `offset` is a byte offset into a binary stream,
    `line` a 1-based line number into a text file.
    """

    exit_code = 3

    def __init__(self, message: str, offset: Optional[int] = None,
                 line: Optional[int] = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        if line is not None:
            message = f"{message} (at line {line})"
        super().__init__(message)
        self.offset = offset
        self.line = line


class FramingError(ParseError):
    """Lengths or block counts are inconsistent."""


class AlphabetError(ParseError):
    """A character outside {A, C, G, T}."""


class EmptyInputError(ParseError):
    pass


class ConflictError(ParseError):
    """Duplicate sequence identifier."""


class PointValidationError(DeccError, ValueError):
    """A point does not lie on the curve."""

    exit_code = 3


class KeyFileError(DeccError):
    exit_code = 4


class CurveMismatchError(KeyFileError):
    pass


class SequenceMismatchError(DeccError):
    exit_code = 5


class SequenceNotFoundError(SequenceMismatchError, KeyError):
    def __str__(self) -> str:
        # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class TamperDetectedError(DeccError):
    """Reference-carried bits in the DNA stream disagree with the reference."""

    exit_code = 6


class EntropyError(DeccError):
    exit_code = 7


class EmbeddingError(DeccError):
    """No Koblitz candidate produced a curve point."""

    exit_code = 1
