"""Exception types shared across the package."""


class MinstateError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(MinstateError):
    """Column-role declaration is malformed or inconsistent with the data."""


class IngestionError(MinstateError):
    """A CSV cell could not be parsed; the message names the row and column."""


class ValidationError(MinstateError):
    """Data violates a documented invariant (range, scaling, uniqueness)."""


class ConfigurationError(MinstateError):
    """An option value or combination of options is unusable."""


class SubsetError(MinstateError):
    """A feature subset repeats an index or references a missing column."""


class FitError(MinstateError):
    """Model training failed (non-finite inputs, empty training set, ...)."""


class EvaluationError(MinstateError):
    """A metric or cost is undefined for the given inputs."""


class ShapeError(MinstateError):
    """Input width does not match what a trained model expects."""
