"""Exception hierarchy shared across the toolkit."""


class ChartlineError(Exception):
    """Base class for all toolkit errors."""


class ContractViolation(ChartlineError):
    """A caller broke a documented precondition (e.g. mismatched mask sizes)."""


class FormatError(ChartlineError):
    """A file failed schema validation.

    ``path`` is a JSON-pointer style location of the offending field.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class GenerationError(ChartlineError):
    """Synthetic generation could not satisfy its pattern contract."""


class RejectedMaskError(ChartlineError):
    """A mask was too sparse (or empty) to extract a series from."""


class CalibrationError(ChartlineError):
    """Axis calibration is missing or degenerate."""
