"""Entry point for python -m relucert."""

from relucert.cli.main import app

if __name__ == "__main__":
    app()
