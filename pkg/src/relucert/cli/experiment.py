"""Experiment subcommand: search, certify and tabulate in one go."""

import json
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError

from relucert.cli.output import (
    ERROR_LOG,
    EXIT_DATA_ERROR,
    EXIT_SUCCESS,
    PRECISION_ENVVAR,
    console,
    output_console,
    progress_bar,
    resolve_precision,
    setup_logging,
)
from relucert.cli.tables import summary_table
from relucert.harness import ExperimentSpec, run_experiment
from relucert.rigor import DEFAULT_PRECISION
from relucert.utils import RefusalError, log_error


def _load_spec(path: Path, overrides: dict) -> ExperimentSpec:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    data.update(overrides)
    return ExperimentSpec.model_validate(data)


def experiment_command(
    spec_file: Optional[Path] = typer.Argument(
        None, help="JSON experiment spec", exists=True, dir_okay=False
    ),
    k: Optional[List[int]] = typer.Option(None, "--k", help="Target width (repeatable)"),
    n_rule: str = typer.Option("n=k", "--n-rule", help="n=k or n=k+1"),
    runs: int = typer.Option(1000, "--runs", min=1, help="Runs per configuration"),
    seed: int = typer.Option(0, "--seed", min=0, help="Base seed"),
    precision: Optional[int] = typer.Option(
        None,
        "--precision",
        "-p",
        min=64,
        help=f"Starting MPFR precision in bits (default 256); {PRECISION_ENVVAR} overrides it",
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory (default out)"),
    workers: Optional[int] = typer.Option(None, "--workers", "-j", min=1, help="Process pool size"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show detailed output"),
) -> None:
    """Run descent, certification and aggregation for a set of (k, n).

    --out, --precision and --workers override the spec file.

    Examples:
        relucert experiment --k 6 --k 7 --runs 1000 --out out
        relucert experiment spec.json --workers 8
    """
    setup_logging(verbose)
    precision = resolve_precision(precision)

    try:
        if spec_file is not None:
            overrides = {
                key: value
                for key, value in (
                    ("output_dir", str(out) if out else None),
                    ("precision_bits", precision),
                    ("workers", workers),
                )
                if value is not None
            }
            spec = _load_spec(spec_file, overrides)
        else:
            if not k:
                raise typer.BadParameter("give --k or a spec file", param_hint="--k")
            spec = ExperimentSpec(
                k_range=k,
                n_rule=n_rule,
                runs_per_config=runs,
                base_seed=seed,
                precision_bits=precision or DEFAULT_PRECISION,
                output_dir=out or Path("out"),
                workers=workers,
            )
    except (ValidationError, json.JSONDecodeError) as e:
        console.print(f"[red]Error:[/red] invalid experiment spec: {e}")
        raise typer.Exit(EXIT_DATA_ERROR)

    with progress_bar() as progress:
        task = progress.add_task("Experiment", total=2 * len(spec.configurations()))

        def advance(label: str, count: int) -> None:
            progress.update(task, advance=1, description=f"{label} ({count})")

        result = run_experiment(spec, progress=advance)

    for ref, reason in result.refusals:
        log_error(RefusalError(reason), ref, ERROR_LOG)

    output_console.print(summary_table(result.summary))
    console.print(
        f"[green]Wrote:[/green] {spec.output_dir} "
        f"({len(result.certificates)} certificates, {len(result.refusals)} refusals)"
    )
    raise typer.Exit(EXIT_SUCCESS)
