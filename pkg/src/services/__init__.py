"""Services layer for LateralScan.

Services wrap the library stages (train, scan, simulate, sensors) with file
handling and return Result dataclasses, so any front end (the CLI, a
notebook, a batch driver) can run them without being coupled to terminal
output. Import the services from their own modules, e.g.
`from services.training_service import TrainingService`; this package only
re-exports the progress callbacks, which the library modules also use.
"""

from .progress import (
    ProgressCallback,
    ProgressCallbackType,
    log_progress,
    print_progress,
    null_progress,
)

__all__ = [
    "ProgressCallback",
    "ProgressCallbackType",
    "log_progress",
    "print_progress",
    "null_progress",
]
