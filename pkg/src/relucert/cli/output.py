"""Console, exit codes and logging setup shared by the subcommands."""

import logging
import os
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn

# Exit codes per sysexits.h convention
EXIT_SUCCESS = 0
EXIT_REFUSED = 2
EXIT_DATA_ERROR = 65

PRECISION_ENVVAR = "RELU_CERT_PRECISION"
ERROR_LOG = "relucert-errors.log"

# Rich console for colored output
console = Console(stderr=True)
output_console = Console()


def setup_logging(verbose: bool) -> None:
    """Route library logging through rich on stderr."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def resolve_precision(flag_value: Optional[int]) -> Optional[int]:
    """RELU_CERT_PRECISION when set, otherwise the --precision value."""
    raw = os.environ.get(PRECISION_ENVVAR, "").strip()
    if not raw:
        return flag_value
    try:
        bits = int(raw)
    except ValueError:
        raise typer.BadParameter(f"{PRECISION_ENVVAR}={raw!r} is not an integer")
    if bits < 64:
        raise typer.BadParameter(f"{PRECISION_ENVVAR} must be at least 64 bits, got {bits}")
    return bits


def progress_bar() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
    )
