"""Certify, verify and lift subcommands.

Implements:
- certify: candidate files -> certificate files
- verify: re-validate stored certificates (--full re-derives epsilon and lambda)
- lift: certificate files -> lift reports for the zero-padded problem
"""

from pathlib import Path
from typing import List

import typer
from rich.table import Table

from relucert.certify import certify_point, lift_certificate
from relucert.cli.output import (
    ERROR_LOG,
    EXIT_DATA_ERROR,
    EXIT_REFUSED,
    EXIT_SUCCESS,
    PRECISION_ENVVAR,
    console,
    output_console,
    progress_bar,
    resolve_precision,
    setup_logging,
)
from relucert.harness import (
    load_certificate,
    load_point,
    save_certificate,
    save_lift_report,
)
from relucert.models import TargetBasis
from relucert.rigor import DEFAULT_PRECISION, MAX_PRECISION
from relucert.utils import (
    IndeterminateEnclosureError,
    InvariantViolationOnLoadError,
    RefusalError,
    SchemaMismatchError,
    log_error,
)


def _certificate_table(rows: List[tuple]) -> Table:
    table = Table(title="Certificates")
    for name in ("point", "lambda_min", "r", "margin", "status"):
        table.add_column(name, justify="left" if name in ("point", "status") else "right")
    for row in rows:
        table.add_row(*row)
    return table


def certify_command(
    files: List[Path] = typer.Argument(
        ..., help="Candidate files to certify", exists=True, dir_okay=False
    ),
    precision: int = typer.Option(
        DEFAULT_PRECISION,
        "--precision",
        "-p",
        min=64,
        help=f"Starting MPFR precision in bits; {PRECISION_ENVVAR} overrides it",
    ),
    max_precision: int = typer.Option(
        MAX_PRECISION, "--max-precision", min=64, help="Precision cap for retries"
    ),
    out: Path = typer.Option(Path("certificates"), "--out", "-o", help="Certificate directory"),
    strict: bool = typer.Option(
        False, "--strict", help="Exit with code 2 if any candidate is refused"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show detailed output"),
) -> None:
    """Rigorously certify candidate points as spurious local minima.

    Refusals are inconclusive: they are reported and logged, never taken
    as evidence that no minimum exists.

    Examples:
        relucert certify out/candidates/*.json --out out/certificates
        relucert certify data/example_k6_n6.json --precision 512 --strict
    """
    setup_logging(verbose)
    precision = resolve_precision(precision)

    rows = []
    refused = 0
    with progress_bar() as progress:
        task = progress.add_task("Certifying...", total=len(files))
        for path in files:
            ref = path.stem
            try:
                W = load_point(path)
            except SchemaMismatchError as e:
                log_error(e, str(path), ERROR_LOG)
                console.print(f"[red]Error:[/red] {e}")
                raise typer.Exit(EXIT_DATA_ERROR)
            try:
                cert = certify_point(
                    W, TargetBasis.standard(W.d), precision, max_precision, point_ref=ref
                )
            except (RefusalError, IndeterminateEnclosureError) as e:
                refused += 1
                log_error(e, str(path), ERROR_LOG)
                rows.append((ref, "-", "-", "-", f"[yellow]refused[/yellow] {e}"))
                progress.advance(task)
                continue
            save_certificate(cert, out / f"{ref}.json")
            status = "[green]certified[/green]" if cert.is_certified else "[yellow]not certified[/yellow]"
            rows.append(
                (ref, f"{cert.lambda_min:.6g}", f"{cert.r:.3g}", f"{cert.margin:.6g}", status)
            )
            progress.advance(task)

    output_console.print(_certificate_table(rows))
    console.print(f"[green]Certified:[/green] {len(files) - refused} of {len(files)}")
    if refused and strict:
        raise typer.Exit(EXIT_REFUSED)
    raise typer.Exit(EXIT_SUCCESS)


def verify_command(
    files: List[Path] = typer.Argument(
        ..., help="Certificate files to re-validate", exists=True, dir_okay=False
    ),
    full: bool = typer.Option(
        False, "--full", help="Also re-derive epsilon and the eigenvalue bound"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show detailed output"),
) -> None:
    """Re-validate stored certificates.

    Examples:
        relucert verify out/certificates/*.json
        relucert verify out/certificates/k6_n6_seed17.json --full
    """
    setup_logging(verbose)

    failed = 0
    for path in files:
        try:
            load_certificate(path, full=full)
        except (SchemaMismatchError, InvariantViolationOnLoadError) as e:
            failed += 1
            log_error(e, str(path), ERROR_LOG)
            console.print(f"[red]Invalid:[/red] {e}")
            continue
        if verbose:
            console.print(f"[cyan]Valid: {path}[/cyan]")

    console.print(f"[green]Valid:[/green] {len(files) - failed} of {len(files)}")
    raise typer.Exit(EXIT_DATA_ERROR if failed else EXIT_SUCCESS)


def lift_command(
    files: List[Path] = typer.Argument(
        ..., help="Certificate files to lift", exists=True, dir_okay=False
    ),
    out: Path = typer.Option(Path("lifts"), "--out", "-o", help="Lift report directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show detailed output"),
) -> None:
    """Certify the zero-padded versions of stored certificates.

    Examples:
        relucert lift out/certificates/*.json --out out/lifts
    """
    setup_logging(verbose)

    table = Table(title="Lifted certificates")
    table.add_column("point")
    table.add_column("lambda_min (lifted)", justify="right")
    table.add_column("min eig M", justify="right")
    table.add_column("status")
    refused = 0
    for path in files:
        try:
            cert = load_certificate(path)
        except (SchemaMismatchError, InvariantViolationOnLoadError) as e:
            log_error(e, str(path), ERROR_LOG)
            console.print(f"[red]Error:[/red] {e}")
            raise typer.Exit(EXIT_DATA_ERROR)
        try:
            report = lift_certificate(cert)
        except (RefusalError, IndeterminateEnclosureError) as e:
            refused += 1
            log_error(e, str(path), ERROR_LOG)
            table.add_row(cert.point_ref, "-", "-", f"[yellow]refused[/yellow] {e}")
            continue
        save_lift_report(report, out / f"{cert.point_ref}.lift.json")
        table.add_row(
            cert.point_ref,
            f"{report.lambda_min_lower:.6g}",
            f"{report.spectrum_M[0]:.6g}",
            "[green]certified[/green]" if report.lift_certified else "[yellow]not certified[/yellow]",
        )

    output_console.print(table)
    console.print(f"[green]Lifted:[/green] {len(files) - refused} of {len(files)}")
    raise typer.Exit(EXIT_SUCCESS)
