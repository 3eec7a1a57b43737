"""Command-line interface for relucert."""

from relucert.cli.main import app

__all__ = ["app"]
