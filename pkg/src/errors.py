"""Exception hierarchy shared by the library, services and CLI."""


class LateralScanError(Exception):
    """Base class for all LateralScan errors.

    `stage` names the pipeline step the error belongs to so the CLI can
    report it ("input", "sampling", "training", "scan", "simulate", "output").
    """
    stage = "runtime"
    input_error = False

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


class FastaFormatError(LateralScanError):
    stage = "input"
    input_error = True


class ConfigError(LateralScanError):
    stage = "input"
    input_error = True


class ModelFormatError(LateralScanError):
    stage = "input"
    input_error = True


class BoundsError(LateralScanError):
    pass


class DomainError(LateralScanError):
    pass


class ShapeError(LateralScanError):
    pass


class SamplingError(LateralScanError):
    stage = "sampling"


class InputFileError(LateralScanError):
    """An input file is missing or unreadable."""
    stage = "input"
    input_error = True
