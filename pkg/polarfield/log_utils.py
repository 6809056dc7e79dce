"""Useful log utilities."""

from collections.abc import Callable, Iterator
from contextlib import contextmanager
from datetime import datetime, timezone
import logging.config
import os
from pathlib import Path
import sys
from types import TracebackType
from typing import Any

from tenacity import RetryCallState

HOME_DIR = Path(os.environ.get("POLARFIELD_HOME", Path.home().joinpath(".polarfield")))
CONFIG_PATH = HOME_DIR.joinpath("log_config.ini")
LOGS_FOLDER_PATH = HOME_DIR.joinpath("logs")
LOG_PATH = Path(
    LOGS_FOLDER_PATH.joinpath(
        datetime.now(tz=timezone.utc).strftime("%Y-%m-%d_%H-%M-%S.log"),
    ),
)


def setup_logging() -> None:
    """Set logging for the cli based on config."""
    if not CONFIG_PATH.exists():
        create_default_config()
    if not LOGS_FOLDER_PATH.exists():
        Path.mkdir(LOGS_FOLDER_PATH, parents=True)

    logging.config.fileConfig(
        CONFIG_PATH,
        defaults={
            "log_path": f"{LOG_PATH.absolute()}",
        },
        disable_existing_loggers=False,
    )

    sys.excepthook = log_uncaught_exceptions


def create_default_config() -> None:
    """Create default logging config.

    Console output goes to stderr so that stdout stays reserved for the
    JSON documents printed by the cli.
    """
    config_content = """[loggers]
keys=root,polarfield,solve

[handlers]
keys=stderrHandler, runFileHandler

[logger_root]
level=ERROR
handlers=stderrHandler

[logger_polarfield]
level=INFO
handlers=stderrHandler, runFileHandler
qualname=polarfield
propagate=0

[logger_solve]
level=DEBUG
handlers=
qualname=polarfield.core.solve
propagate=1

[formatters]
keys=short, full

[formatter_short]
format=[%(levelname)s] %(name)s: %(message)s

[formatter_full]
format=%(asctime)s %(process)d %(name)s %(levelname)s %(message)s

[handler_stderrHandler]
class=StreamHandler
level=WARNING
formatter=short
args=(sys.stderr,)

[handler_runFileHandler]
class=FileHandler
level=DEBUG
formatter=full
args=(r"%(log_path)s", "a", "utf-8")
"""

    if not HOME_DIR.exists():
        Path.mkdir(HOME_DIR, parents=True)

    with Path.open(CONFIG_PATH, "w") as f:
        f.write(config_content)


def log_uncaught_exceptions(
    exc_type: type[BaseException],
    exc_value: BaseException,
    exc_traceback: TracebackType | None,
) -> Any:  # noqa: ANN401
    """Log an exception that escaped the cli together with the run log path.

    Args:
        exc_type (type[BaseException]): Exception type.
        exc_value (BaseException): Exception value.
        exc_traceback (TracebackType): Exception traceback.
    """
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return

    logging.getLogger("polarfield").critical(
        "Unhandled %s, full trace in %s",
        exc_type.__name__,
        LOG_PATH,
        exc_info=(exc_type, exc_value, exc_traceback),
    )


def log_retry(logger: logging.Logger) -> Callable[[RetryCallState], None]:
    """Return a tenacity ``before_sleep`` hook that logs the failed attempt.

    Returns:
        Callable[[RetryCallState], None]: Logging function.
    """

    def _log_retry(retry_state: RetryCallState) -> None:
        outcome = retry_state.outcome
        exception = outcome.exception() if outcome is not None else None
        name = getattr(retry_state.fn, "__qualname__", "KKT solve")
        logger.warning(
            "%s failed after %d attempts: %s",
            name,
            retry_state.attempt_number,
            exception,
        )

    return _log_retry


class WarningCollector(logging.Handler):
    """Keep the messages of warning records for the solver report."""

    def __init__(self) -> None:
        """Initialize handler at warning level."""
        super().__init__(level=logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        """Store formatted message."""
        self.messages.append(f"{record.name}: {record.getMessage()}")


@contextmanager
def collect_warnings(logger_name: str = "polarfield") -> Iterator[WarningCollector]:
    """Collect warnings logged below ``logger_name`` while the block runs."""
    logger = logging.getLogger(logger_name)
    collector = WarningCollector()
    logger.addHandler(collector)
    try:
        yield collector
    finally:
        logger.removeHandler(collector)
