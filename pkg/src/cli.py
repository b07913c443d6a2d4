#!/usr/bin/env python3
"""
tmtool CLI - run verification suites on twisted Poisson structure files
"""

import json
from pathlib import Path
from typing import Any

import typer
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from src.config import settings
from src.constants import Command, ExitCode, OutputFormat
from src.dependencies import get_structure_registry, get_suite_config, get_suite_runner
from src.exceptions import TmtoolException
from src.models.responses import SuiteReport
from src.utils.log import setup_logging
from src.utils.structure_io import load_structure

app = typer.Typer(
    name="tmtool",
    help="tmtool - exact checks for twisted Poisson structures and their modular classes",
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)

# Shared options
FORMAT_OPTION = typer.Option(OutputFormat.JSON, "--format", "-f", help="Report format: json or text")
DEGREE_OPTION = typer.Option(None, "--degree-bound", help="Polynomial degree bound for coboundary searches")
TRIALS_OPTION = typer.Option(None, "--trials", help="Randomized identity trials")
SEED_OPTION = typer.Option(None, "--seed", help="Seed for randomized trials")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Write the report to this file")


def _value_text(value: Any) -> str:
    text = json.dumps(value)
    return text if len(text) <= 70 else text[:67] + "..."


def render_text(report: SuiteReport) -> None:
    """Print a report as rich tables."""
    table = Table(
        title=f"{report.command}: {report.structure}",
        box=box.ROUNDED,
        show_header=True,
        header_style="bold cyan",
    )
    table.add_column("Check", style="cyan")
    table.add_column("Result", justify="center")
    table.add_column("Detail", style="white")
    for check in report.checks:
        mark = "[green]✓[/green]" if check.passed else "[red]✗[/red]"
        detail = check.detail or ""
        if check.counterexample is not None:
            detail = (detail + " " if detail else "") + _value_text(check.counterexample.model_dump())
        table.add_row(check.name, mark, detail)
    console.print(table)

    values = Table(show_header=False, box=box.SIMPLE)
    values.add_column("Key", style="bold")
    values.add_column("Value")
    for key, value in report.data.items():
        values.add_row(key, _value_text(value))
    console.print(Panel(values, title="[bold]Values[/bold]"))

    if report.passed:
        console.print(Panel("[bold green]✓ every identity holds[/bold green]", border_style="green"))
    else:
        failed = ", ".join(c.name for c in report.failures)
        console.print(Panel(f"[bold red]✗ failed: {failed}[/bold red]", border_style="red"))


def run_command(
    command: str,
    path: Path,
    output_format: str,
    degree_bound: int | None,
    trials: int | None,
    seed: int | None,
    out: Path | None,
) -> None:
    """Load, run, report and exit with 0 (pass), 1 (input error) or 2 (identity failure)."""
    if output_format not in OutputFormat.ALL:
        err_console.print(f"[red]Error: unknown format '{output_format}'[/red]")
        raise typer.Exit(ExitCode.INPUT_ERROR)
    runner = get_suite_runner(get_suite_config(trials, seed, degree_bound))
    try:
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=err_console,
            transient=True,
        ) as progress:
            task = progress.add_task(f"[cyan]{command} {path.name}...", total=None)
            loaded = load_structure(path)
            report = runner.run(command, loaded)
            progress.update(task, completed=True)
    except TmtoolException as e:
        err_console.print(f"[red]Error: {e.message}[/red]")
        raise typer.Exit(e.exit_code) from None

    if out is not None:
        out.write_text(report.to_json())
    if output_format == OutputFormat.TEXT:
        render_text(report)
    elif out is None:
        typer.echo(report.to_json(), nl=False)
    raise typer.Exit(ExitCode.OK if report.passed else ExitCode.IDENTITY_FAILURE)


@app.command()
def verify(
    path: Path = typer.Argument(..., help="Structure file (JSON or YAML)"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Check d psi = 0 and 1/2[pi, pi] = (wedge^3 pi#) psi."""
    run_command(Command.VERIFY, path, output_format, degree_bound, trials, seed, out)


@app.command()
def modular(
    path: Path = typer.Argument(..., help="Structure file (JSON or YAML)"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Compute Y, X and the modular section Z."""
    run_command(Command.MODULAR, path, output_format, degree_bound, trials, seed, out)


@app.command()
def elw(
    path: Path = typer.Argument(..., help="Structure file (JSON or YAML)"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Compare the modular section with the modular character of the dual algebra."""
    run_command(Command.ELW, path, output_format, degree_bound, trials, seed, out)


@app.command()
def cohomology(
    path: Path = typer.Argument(..., help="Structure file (JSON or YAML)"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Betti numbers of the multivector and form complexes, and duality."""
    run_command(Command.COHOMOLOGY, path, output_format, degree_bound, trials, seed, out)


@app.command()
def identities(
    path: Path = typer.Argument(..., help="Structure file (JSON or YAML)"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Operator identities on the structure plus seeded random trials."""
    run_command(Command.IDENTITIES, path, output_format, degree_bound, trials, seed, out)


@app.command()
def poly(
    path: Path = typer.Argument(..., help="Structure file on R^n (JSON or YAML)"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Hamiltonian calculus and modular fields on R^n."""
    run_command(Command.POLY, path, output_format, degree_bound, trials, seed, out)


@app.command()
def gauge(
    path: Path = typer.Argument(..., help="Structure file on R^n with a 2-form B"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Gauge transformation by B and the modular correspondence."""
    run_command(Command.GAUGE, path, output_format, degree_bound, trials, seed, out)


@app.command(name="all")
def run_all(
    path: Path = typer.Argument(..., help="Structure file (JSON or YAML)"),
    output_format: str = FORMAT_OPTION,
    degree_bound: int | None = DEGREE_OPTION,
    trials: int | None = TRIALS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
):
    """Every suite that applies to the structure."""
    run_command(Command.ALL, path, output_format, degree_bound, trials, seed, out)


@app.command(name="list")
def list_structures(
    output_format: str = FORMAT_OPTION,
):
    """List bundled structure files."""
    entries = get_structure_registry().list_structures()
    if output_format == OutputFormat.JSON:
        typer.echo(json.dumps(entries, indent=2))
        return

    if not entries:
        console.print("[yellow]No structure files found[/yellow]")
        return

    table = Table(
        title="Structure Files", box=box.ROUNDED, show_header=True, header_style="bold cyan"
    )
    table.add_column("Name", style="cyan")
    table.add_column("File")
    table.add_column("Kind", justify="center")
    table.add_column("Dim", justify="right")
    table.add_column("Description", style="white")
    for entry in entries:
        desc = entry["description"]
        if len(desc) > 47:
            desc = desc[:47] + "..."
        table.add_row(entry["name"], entry["file"], entry["kind"], str(entry["dim"]), desc)
    console.print(table)


@app.callback()
def main(
    log_level: str = typer.Option(settings.log_level, "--log-level", help="Logging level"),
):
    """tmtool CLI."""
    setup_logging(log_level)


if __name__ == "__main__":
    app()
