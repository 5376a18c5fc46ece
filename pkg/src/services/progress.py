"""Progress callback protocol for decoupling long-running work from the UI."""

import logging
from typing import Callable, Protocol, runtime_checkable

_progress_logger = logging.getLogger("lateralscan.progress")

_LOG_LEVELS = {
    "info": logging.INFO,
    "success": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


@runtime_checkable
class ProgressCallback(Protocol):
    """Protocol for progress reporting callbacks.

    Training, sampling and scanning report progress through this protocol
    so they can run under the CLI, inside tests or from another program.
    """
    def __call__(self, message: str, level: str = "info") -> None:
        """Report progress.

        Args:
            message: The progress message to report.
            level: Message level - "info", "warning", "error", or "success".
        """
        ...


def print_progress(message: str, level: str = "info") -> None:
    """CLI progress callback - coloured output to stdout."""
    from cli_utils import Colors
    color = {
        "warning": Colors.YELLOW,
        "error": Colors.RED,
        "success": Colors.GREEN,
    }.get(level, "")
    reset = Colors.RESET if color else ""
    print(f"{color}{message}{reset}")


def log_progress(message: str, level: str = "info") -> None:
    """Library default - forwards progress to the logging system."""
    _progress_logger.log(_LOG_LEVELS.get(level, logging.INFO), message)


def null_progress(message: str, level: str = "info") -> None:
    """Silent progress callback for testing or background operations."""
    pass


# Type alias for convenience
ProgressCallbackType = Callable[[str, str], None]
