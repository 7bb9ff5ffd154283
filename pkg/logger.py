"""Structured logging configuration using Rich."""

import logging
import os
from typing import Optional

from rich.logging import RichHandler
from rich.console import Console

# Global console for rich output
console = Console(stderr=True)


def _add_file_handler(logger: logging.Logger, log_file: str):
    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.DEBUG)
    file_formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    file_handler.setFormatter(file_formatter)
    logger.addHandler(file_handler)


def setup_logger(
    name: str = "qlz",
    level: Optional[str] = None,
    log_file: Optional[str] = None
) -> logging.Logger:
    """
    Configure and return a structured logger with Rich formatting.

    Args:
        name: Logger name
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL), INFO if unset
        log_file: Optional file path for logging to file

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Avoid adding handlers multiple times
    if logger.handlers:
        return logger

    level = level or "INFO"
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    logger.propagate = False

    rich_handler = RichHandler(
        console=console,
        show_time=True,
        show_path=False,
        rich_tracebacks=True,
        markup=True
    )
    rich_handler.setLevel(logging.DEBUG)
    logger.addHandler(rich_handler)

    if log_file:
        _add_file_handler(logger, log_file)

    return logger


# Default logger instance
logger = setup_logger()


def configure_logging(level: str, log_file: Optional[str] = None):
    """
    Apply the configured level and file target to the default logger.

    Called once settings are loaded; a file already attached is not added twice.
    """
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    if log_file and not any(
        isinstance(h, logging.FileHandler) and h.baseFilename == os.path.abspath(log_file)
        for h in logger.handlers
    ):
        _add_file_handler(logger, log_file)


def log_sweep_cell(label: str, index: int, total: int):
    """Log progress of one cell of a parameter sweep."""
    logger.info(
        f"[bold blue]Cell {index}/{total}[/bold blue] | [cyan]{label}[/cyan]"
    )


def log_solver_call(solver: str, detail: str, status: str = "success"):
    """Log a solver invocation."""
    color = "green" if status == "success" else "red"
    logger.debug(f"Solver [{solver}] {detail} - [{color}]{status}[/{color}]")


def log_error(message: str, exc: Optional[Exception] = None):
    """Log an error with optional exception details."""
    if exc:
        logger.error(f"{message}: {exc}", exc_info=True)
    else:
        logger.error(message)


def log_warning(message: str):
    """Log a warning message."""
    logger.warning(f"[yellow]{message}[/yellow]")


def log_success(message: str):
    """Log a success message."""
    logger.info(f"[green]{message}[/green]")
