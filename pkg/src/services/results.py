"""Result types returned by the services."""

from dataclasses import dataclass, field
from pathlib import Path

from errors import LateralScanError


@dataclass
class ServiceResult:
    """Generic result from a service operation."""
    success: bool
    message: str
    stage: str = ""
    input_error: bool = False
    outputs: dict[str, Path] = field(default_factory=dict)
    data: dict | None = None

    @classmethod
    def failure(cls, error: LateralScanError) -> "ServiceResult":
        return cls(success=False, message=str(error), stage=error.stage, input_error=error.input_error)
