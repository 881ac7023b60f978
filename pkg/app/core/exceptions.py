"""Exception hierarchy shared by all depmerge modules."""

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3


class DepmergeError(Exception):
    """Base class for toolkit errors."""

    exit_code = EXIT_INVARIANT


class DataError(DepmergeError, ValueError):
    """Input data or artifact is unusable."""

    exit_code = EXIT_DATA


class ConllFormatError(DataError):
    """Malformed CoNLL-X input."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class TreeStructureError(ConllFormatError):
    """Head column does not encode a single tree rooted at 0."""


class TagConfigError(DataError):
    """Tag configuration cannot be applied to the given data."""


class NonProjectiveError(DataError):
    """A projective tree was required."""


class AlignmentError(DataError):
    """Two treebanks or tag sequences do not line up."""


class ModelFormatError(DataError):
    """Serialized model is truncated, tampered or from another version."""


class EmptyInputError(DataError):
    """An operation received an empty corpus, sentence or list."""


class ParseError(DataError):
    """Parsing failed for one sentence of a treebank."""

    def __init__(self, message: str, sentence_index: int):
        self.sentence_index = sentence_index
        super().__init__(f"sentence {sentence_index}: {message}")


class InvariantViolation(DepmergeError):
    """Internal invariant broken; indicates a bug rather than bad input."""

    exit_code = EXIT_INVARIANT


class IllegalTransitionError(InvariantViolation):
    """Transition applied outside its legality conditions."""


class FrozenModelError(InvariantViolation):
    """Attempt to update a finalized model."""
