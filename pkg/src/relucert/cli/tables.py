"""Table and cdf subcommands.

Both read a runs.csv ledger written by `relucert search` or
`relucert experiment`:
- table: summary CSV, optionally crediting runs covered by certificates
- cdf: empirical CDF of the objective per (k, n)
"""

from pathlib import Path
from typing import List, Optional, Sequence

import typer
from rich.table import Table

from relucert.cli.output import (
    ERROR_LOG,
    EXIT_DATA_ERROR,
    EXIT_SUCCESS,
    console,
    output_console,
    setup_logging,
)
from relucert.harness import (
    SummaryRow,
    emit_cdf,
    load_certificate,
    read_runs_csv,
    summarize,
    write_cdf_csv,
    write_summary_csv,
)
from relucert.utils import InvariantViolationOnLoadError, SchemaMismatchError, log_error


def summary_table(rows: Sequence[SummaryRow]) -> Table:
    """Rich rendering of summary rows."""
    table = Table(title="Spurious local minima")
    columns = (
        "k", "n", "runs", "singular", "% certified", "% unverified", "avg lambda_min", "avg F"
    )
    for name in columns:
        table.add_column(name, justify="right")
    for row in rows:
        table.add_row(
            str(row.k),
            str(row.n),
            str(row.runs),
            str(row.singular),
            f"{row.pct_certified:.1f}",
            f"{row.pct_unverified:.1f}",
            "-" if row.avg_lambda_min is None else f"{row.avg_lambda_min:.4g}",
            "-" if row.avg_objective is None else f"{row.avg_objective:.4g}",
        )
    return table


def table_command(
    runs_csv: Path = typer.Argument(..., help="runs.csv ledger", exists=True, dir_okay=False),
    certificates: Optional[Path] = typer.Option(
        None,
        "--certificates",
        "-c",
        exists=True,
        file_okay=False,
        help="Directory of certificate files",
    ),
    out: Path = typer.Option(Path("summary.csv"), "--out", "-o", help="Summary CSV path"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show detailed output"),
) -> None:
    """Aggregate runs and certificates into the summary table.

    Examples:
        relucert table out/runs.csv --certificates out/certificates
    """
    setup_logging(verbose)

    records = read_runs_csv(runs_csv)
    certs = []
    if certificates is not None:
        for path in sorted(certificates.glob("*.json")):
            try:
                certs.append(load_certificate(path))
            except (SchemaMismatchError, InvariantViolationOnLoadError) as e:
                log_error(e, str(path), ERROR_LOG)
                console.print(f"[red]Error:[/red] {e}")
                raise typer.Exit(EXIT_DATA_ERROR)
        if verbose:
            console.print(f"[cyan]Loaded {len(certs)} certificates[/cyan]")

    rows = summarize(records, certs)
    write_summary_csv(rows, out)
    output_console.print(summary_table(rows))
    console.print(f"[green]Wrote:[/green] {out}")
    raise typer.Exit(EXIT_SUCCESS)


def cdf_command(
    runs_csv: List[Path] = typer.Argument(
        ..., help="One or more runs.csv ledgers", exists=True, dir_okay=False
    ),
    out: Path = typer.Option(Path("cdf.csv"), "--out", "-o", help="CDF CSV path"),
) -> None:
    """Write the empirical CDF of terminal objective values.

    Examples:
        relucert cdf out/runs.csv --out out/cdf.csv
    """
    records = [row for path in runs_csv for row in read_runs_csv(path)]
    if not records:
        console.print("[red]Error:[/red] no runs in input")
        raise typer.Exit(EXIT_DATA_ERROR)
    write_cdf_csv(emit_cdf(records), out)
    console.print(f"[green]Wrote:[/green] {out} ({len(records)} runs)")
    raise typer.Exit(EXIT_SUCCESS)
