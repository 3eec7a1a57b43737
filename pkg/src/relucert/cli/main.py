"""Main CLI application for relucert."""

import typer

from relucert.cli.certify import certify_command, lift_command, verify_command
from relucert.cli.experiment import experiment_command
from relucert.cli.search import search_command
from relucert.cli.tables import cdf_command, table_command

app = typer.Typer(
    name="relucert",
    help="relucert: find and certify spurious local minima of two-layer ReLU networks",
    add_completion=False,
)

# Register subcommands
app.command(name="search")(search_command)
app.command(name="certify")(certify_command)
app.command(name="verify")(verify_command)
app.command(name="lift")(lift_command)
app.command(name="table")(table_command)
app.command(name="cdf")(cdf_command)
app.command(name="experiment")(experiment_command)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    version: bool = typer.Option(
        False, "--version", "-V", help="Show version and exit"
    ),
) -> None:
    """relucert: find and certify spurious local minima of two-layer ReLU networks."""
    if version:
        from relucert import __version__
        typer.echo(f"relucert {__version__}")
        raise typer.Exit()

    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())
