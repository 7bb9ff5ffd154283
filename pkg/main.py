#!/usr/bin/env python3
"""
qlz - Quantized Landau-Zener solver

Closed-form weak-coupling dynamics, numerical strong-coupling dynamics, the
asymptotic transition probabilities and the reference figure data, all
checked against brute-force oracles by the ``validate`` command.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import dotenv_values
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from config import get_settings
from errors import ConfigError, NumericalError, QLZError
from exporter import Exporter
from figures import FIGURES, asymptote_table, describe
from logger import configure_logging, log_error, log_success, log_warning
from lzfull import integrate_full, integrate_full_autosized
from lzrwa import excited_probability, population_difference, rwa_trajectory
from models import Command, FullParams, JointState, ResultTable, RunConfig
from validation import run_validation, validation_table

console = Console()

PREVIEW_ROWS = 12

# config-file keys that differ from RunConfig field names
CONFIG_ALIASES = {
    "nmax": "n_max",
    "sectors": "n_sectors",
}
CONFIG_KEYS = set(RunConfig.model_fields) - {"command"}

FULL_DEFAULTS = {"tau0": 1.0, "tau1": 11.0, "state": "fock:0,e"}


class CLIParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors become ConfigError records."""

    def error(self, message: str) -> None:
        raise ConfigError(f"{self.prog}: {message}")


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = CLIParser(add_help=False)
    common.add_argument("--g", type=float, help="Scaled coupling (default: 0.1)")
    common.add_argument("--tau0", type=float, help="Scaled start time")
    common.add_argument("--tau1", type=float, help="Scaled end time")
    common.add_argument("--state", type=str, help="Initial state fock:<n>,<g|e>")
    common.add_argument("--nmax", dest="n_max", type=int, help="Fock truncation")
    common.add_argument("--samples", type=int, help="Number of output times (default: 2001)")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="Relative tolerance")
    common.add_argument("--abs-tol", dest="abs_tol", type=float, help="Absolute tolerance")
    common.add_argument("--out", type=Path, help="Output file (default: exports/<command>.<format>)")
    common.add_argument("--format", choices=["csv", "json"], help="Output format (default: csv)")
    common.add_argument("--config", type=Path, help="Flat key=value file; flags override it")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    parser = CLIParser(
        description="Solve the quantized Landau-Zener problem",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s solve-rwa --g 0.1 --state fock:11,g        Closed-form sweep from -10 to 10
  %(prog)s solve-full --g 3 --state fock:0,e          Strong coupling from resonance
  %(prog)s asymptote --crossing half --sectors 102    Half-crossing probabilities
  %(prog)s figure 2 --format json                     Data behind figure 2
  %(prog)s validate --extended                        Oracle suite including g = 10
        """
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser(
        Command.SOLVE_RWA.value, parents=[common], help="Closed-form weak-coupling evolution"
    )

    solve_full = commands.add_parser(
        Command.SOLVE_FULL.value, parents=[common], help="Numerical strong-coupling evolution"
    )
    solve_full.add_argument(
        "--no-autosize", dest="autosize", action="store_false", default=None,
        help="Keep n_max fixed and only warn about truncation"
    )

    asymptote = commands.add_parser(
        Command.ASYMPTOTE.value, parents=[common], help="Asymptotic probabilities per dressed pair"
    )
    asymptote.add_argument("--crossing", choices=["full", "half"], help="Crossing geometry (default: full)")
    asymptote.add_argument("--sectors", dest="n_sectors", type=int, help="Number of dressed pairs (default: 102)")

    figure = commands.add_parser(
        Command.FIGURE.value, parents=[common], help="Reproduce the data of a reference figure"
    )
    figure.add_argument("figure", type=int, choices=sorted(FIGURES), help="Figure number")
    figure.add_argument("--sectors", dest="n_sectors", type=int, help="Dressed pairs for figures 2 and 4")
    figure.add_argument(
        "--no-autosize", dest="autosize", action="store_false", default=None,
        help="Figure 5: keep n_max fixed"
    )

    validate = commands.add_parser(
        Command.VALIDATE.value, parents=[common], help="Run the oracle-equivalence suite"
    )
    validate.add_argument(
        "--extended", action="store_true", default=None, help="Add the g = 10 comparison"
    )

    return parser.parse_args(argv)


def read_config_file(path: Path) -> Dict[str, str]:
    """Flat key=value file; ``-`` and ``_`` are interchangeable in keys."""
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        name = CONFIG_ALIASES.get(name, name)
        if name not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key '{key}' in {path}")
        if value is not None:
            values[name] = value
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Settings defaults < config file < command-line flags."""
    settings = get_settings()
    command = Command(args.command)
    values: Dict[str, Any] = {
        "samples": settings.samples,
        "rel_tol": settings.rel_tol,
        "abs_tol": settings.abs_tol,
    }
    if command is Command.SOLVE_FULL:
        values.update(FULL_DEFAULTS)
    if args.config is not None:
        values.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    try:
        return RunConfig(command=command, **values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def display_header(config: RunConfig):
    """Display the run parameters."""
    console.print(Panel(
        f"[bold]{config.command.value}[/bold]"
        + (f" {config.figure}" if config.figure else "")
        + f"\ng={config.g}  tau=[{config.tau0}, {config.tau1}]  state={config.state}",
        title="qlz"
    ))


def display_table(table: ResultTable, limit: int = PREVIEW_ROWS):
    """Display the first rows of a result table."""
    view = Table(title=table.title)
    for column in table.columns:
        view.add_column(column, justify="right", style="cyan" if column == table.columns[0] else None)
    for row in table.rows[:limit]:
        view.add_row(*[f"{v:.6g}" if isinstance(v, float) else str(v) for v in row])
    console.print(view)
    if len(table.rows) > limit:
        console.print(f"[dim]... {len(table.rows) - limit} more rows[/dim]")


def run_solve_rwa(config: RunConfig) -> ResultTable:
    """Closed-form trajectory rows (tau, sigma_z, pe, norm)."""
    n_max = config.resolved_n_max(config.state.photons + 1)
    if config.state.photons > n_max:
        raise ConfigError(f"state {config.state} does not fit n_max={n_max}")
    state0 = JointState.from_initial(config.state, n_max)
    taus = np.linspace(config.tau0, config.tau1, config.samples)

    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console, transient=True) as progress:
        progress.add_task("Evaluating closed-form propagators...", total=None)
        trajectory = rwa_trajectory(state0, config.g, config.tau0, taus)

    rows = [
        [tau, population_difference(s), excited_probability(s), s.norm()]
        for tau, s in trajectory
    ]
    return ResultTable(
        title=f"weak-coupling evolution from {config.state}",
        metadata=describe(
            command=config.command.value, g=config.g, tau0=config.tau0, tau1=config.tau1,
            state=config.state, n_max=n_max, samples=config.samples,
        ),
        columns=["tau", "sigma_z", "pe", "norm"],
        rows=rows,
    )


def run_solve_full(config: RunConfig) -> ResultTable:
    """Strong-coupling trajectory rows (tau, sigma_z, pe, norm)."""
    settings = get_settings()
    n_max = config.resolved_n_max(settings.n_max)
    if config.state.photons > n_max:
        raise ConfigError(f"state {config.state} does not fit n_max={n_max}")
    p = FullParams(
        g=config.g, tau0=config.tau0, tau1=config.tau1, n_max=max(n_max, 1),
        rel_tol=config.rel_tol, abs_tol=config.abs_tol,
        truncation_threshold=settings.truncation_threshold,
    )

    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console, transient=True) as progress:
        progress.add_task("Integrating the parity-frame equations...", total=None)
        if config.autosize:
            trajectory = integrate_full_autosized(config.state, p, samples=config.samples)
        else:
            state0 = JointState.from_initial(config.state, p.n_max)
            trajectory = integrate_full(state0, p, samples=config.samples)

    rows = [
        [float(tau), float(sz), 0.5 * (1.0 + float(sz)), s.norm()]
        for tau, sz, (_, s) in zip(trajectory.taus, trajectory.sigma_z(), trajectory.points)
    ]
    return ResultTable(
        title=f"strong-coupling evolution from {config.state}",
        metadata=describe(
            command=config.command.value, g=config.g, tau0=config.tau0, tau1=config.tau1,
            state=config.state, n_max=n_max, used_n_max=trajectory.n_max,
            autosize=config.autosize, samples=config.samples,
            rel_tol=config.rel_tol, abs_tol=config.abs_tol,
            max_top_population=trajectory.max_top_population,
            max_norm_drift=trajectory.max_norm_drift,
        ),
        columns=["tau", "sigma_z", "pe", "norm"],
        rows=rows,
    )


def run_figure(config: RunConfig) -> ResultTable:
    """Dispatch to the figure sweep with the parameters it accepts."""
    number = config.figure
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console, transient=True) as progress:
        progress.add_task(f"Computing figure {number}...", total=None)
        if number in (1, 3):
            return FIGURES[number](g=config.g, samples=config.samples)
        if number in (2, 4):
            return FIGURES[number](g=config.g, n_sectors=config.n_sectors)
        return FIGURES[number](
            samples=config.samples,
            autosize=config.autosize,
            n_max=config.resolved_n_max(get_settings().n_max),
        )


def run_validate(config: RunConfig) -> ResultTable:
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console, transient=True) as progress:
        progress.add_task("Running oracle comparisons...", total=None)
        checks = run_validation(extended=config.extended)
    return validation_table(checks, extended=config.extended)


def run(config: RunConfig, exporter: Optional[Exporter] = None) -> Path:
    """
    Execute one command and write its table.

    Returns:
        Path of the written file

    Raises:
        QLZError: on configuration, numerical or truncation failures
    """
    exporter = exporter or Exporter()
    display_header(config)

    if config.command is Command.SOLVE_RWA:
        table = run_solve_rwa(config)
    elif config.command is Command.SOLVE_FULL:
        table = run_solve_full(config)
    elif config.command is Command.ASYMPTOTE:
        table = asymptote_table(config.g, config.n_sectors, config.crossing)
    elif config.command is Command.FIGURE:
        table = run_figure(config)
    else:
        table = run_validate(config)

    display_table(table)
    filepath = exporter.export(table, config.format, config.out)
    console.print(f"[dim]Exported to:[/dim] {filepath}")

    if config.command is Command.VALIDATE:
        failed = [row[0] for row in table.rows if row[-1] != "true"]
        if failed:
            raise NumericalError(f"{len(failed)} validation check(s) failed: {', '.join(failed)}")
        log_success("All validation checks passed")
    return filepath


def error_record(exc: QLZError) -> str:
    """Machine-readable error line for stderr."""
    return json.dumps({
        "status": "error",
        "kind": exc.kind,
        "exit_code": exc.exit_code,
        "message": str(exc),
    })


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    try:
        args = parse_args(argv)
        settings = get_settings()
    except (ConfigError, ValidationError) as e:
        error = e if isinstance(e, ConfigError) else ConfigError(str(e))
        log_error("Configuration error", error)
        sys.stderr.write(error_record(error) + "\n")
        return error.exit_code
    configure_logging("DEBUG" if args.verbose else settings.log_level, settings.log_file)

    try:
        config = build_config(args)
        try:
            run(config)
        except ValidationError as e:
            raise ConfigError(f"invalid parameters: {e}") from e
    except QLZError as e:
        if e.exit_code == 4:
            log_warning(str(e))
        else:
            log_error(f"{e.kind} failure", e)
        sys.stderr.write(error_record(e) + "\n")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
