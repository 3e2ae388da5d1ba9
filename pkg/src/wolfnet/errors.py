"""Exception types shared across the package."""


class WolfnetError(Exception):
    """Base class for errors raised by wolfnet."""


class EvaluationError(WolfnetError):
    """An objective or network evaluation produced a non-finite value."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class DatasetError(WolfnetError):
    """A dataset file or schema is malformed."""
