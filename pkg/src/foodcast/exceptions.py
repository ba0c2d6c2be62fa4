class DataError(ValueError):
    """Input data is malformed or insufficient for the requested operation."""


class TrainingError(RuntimeError):
    """Training diverged (non-finite loss or gradient)."""
