"""Search subcommand: gradient descent runs to candidate files.

Implements `relucert search`:
- Runs --runs descent instantiations for one (k, n) from Xavier starts
- --init restarts a single run from a stored candidate instead
- Writes candidate files for Candidate and Anomaly runs plus runs.csv
"""

from collections import Counter
from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from relucert.cli.output import (
    ERROR_LOG,
    EXIT_DATA_ERROR,
    EXIT_SUCCESS,
    console,
    output_console,
    progress_bar,
    setup_logging,
)
from relucert.harness import load_point, save_candidate, write_runs_csv
from relucert.models import (
    DEFAULT_GRAD_TOL,
    DEFAULT_MAX_ITERS,
    DEFAULT_STEP_SIZE,
    Classification,
    GDConfig,
    RunRecord,
    TargetBasis,
)
from relucert.search import gd_run, run_seed
from relucert.utils import SchemaMismatchError, SingularEncounterError, log_error

KEPT_LABELS = (Classification.CANDIDATE, Classification.ANOMALY)


def _class_table(records: List[RunRecord]) -> Table:
    counts = Counter(r.classification for r in records)
    table = Table(title=f"{len(records)} runs")
    table.add_column("classification")
    table.add_column("runs", justify="right")
    table.add_column("%", justify="right")
    for label in Classification:
        count = counts.get(label, 0)
        pct = 100.0 * count / len(records) if records else 0.0
        table.add_row(label.value, str(count), f"{pct:.1f}")
    return table


def search_command(
    k: Optional[int] = typer.Option(None, "--k", min=1, help="Target width and input dimension"),
    n: Optional[int] = typer.Option(None, "--n", min=1, help="Trained neurons (default: k)"),
    runs: int = typer.Option(1, "--runs", min=1, help="Number of descent instantiations"),
    step: float = typer.Option(DEFAULT_STEP_SIZE, "--step", help="Fixed step size"),
    grad_tol: float = typer.Option(DEFAULT_GRAD_TOL, "--grad-tol", help="Per-neuron gradient tolerance"),
    max_iters: int = typer.Option(DEFAULT_MAX_ITERS, "--max-iters", min=1, help="Iteration cap"),
    seed: int = typer.Option(0, "--seed", min=0, help="Base seed; run i uses seed ^ i"),
    out: Path = typer.Option(Path("out"), "--out", "-o", help="Output directory"),
    init: Optional[Path] = typer.Option(
        None,
        "--init",
        exists=True,
        dir_okay=False,
        help="Start a single run from this candidate file",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show detailed output"),
) -> None:
    """Run gradient descent and store the candidate points.

    Examples:
        relucert search --k 6 --runs 1000 --seed 1
        relucert search --init data/example_k6_n6.json --out out/ex1
    """
    setup_logging(verbose)

    start = None
    if init is not None:
        try:
            start = load_point(init)
        except SchemaMismatchError as e:
            log_error(e, str(init), ERROR_LOG)
            console.print(f"[red]Error:[/red] {e}")
            raise typer.Exit(EXIT_DATA_ERROR)
        k, n, runs = start.d, start.n, 1
        if verbose:
            console.print(f"[cyan]Restarting from {init} (k={k}, n={n})[/cyan]")
    elif k is None:
        raise typer.BadParameter("--k is required unless --init is given", param_hint="--k")
    n = n if n is not None else k

    V = TargetBasis.standard(k)
    records: List[RunRecord] = []
    with progress_bar() as progress:
        task = progress.add_task(f"Descent k={k} n={n}", total=runs)
        for i in range(runs):
            config = GDConfig(
                k=k,
                n=n,
                seed=run_seed(seed, i),
                step_size=step,
                grad_tol=grad_tol,
                max_iters=max_iters,
            )
            try:
                records.append(gd_run(config, V, init=start))
            except SingularEncounterError as e:
                log_error(e, f"seed {config.seed}", ERROR_LOG)
                console.print(f"[yellow]Warning:[/yellow] {e}")
            progress.advance(task)

    written = 0
    for record in records:
        if record.classification in KEPT_LABELS or start is not None:
            save_candidate(record, out / "candidates" / f"{record.point_ref}.json")
            written += 1
    write_runs_csv(records, out / "runs.csv")

    output_console.print(_class_table(records))
    console.print(f"[green]Wrote:[/green] {written} candidate files and {out / 'runs.csv'}")
    raise typer.Exit(EXIT_SUCCESS)
