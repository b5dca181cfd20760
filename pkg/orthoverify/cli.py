"""
Command-line interface for orthoverify.

This module provides a Click-based CLI for running claim checks and
campaigns.
"""

import functools
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import click

from orthoverify import __version__
from orthoverify.campaign import run_campaign
from orthoverify.checks import ClaimContext, run_claim
from orthoverify.config import VerifierConfig, load_config
from orthoverify.errors import (
    ConfigurationError,
    EvenCharacteristicError,
    InvalidPrimeError,
    UsageError,
    VerificationError,
)
from orthoverify.report import (
    VerificationReport,
    summary_lines,
    write_report_file,
    write_scan_csv,
)
from orthoverify.utils import setup_logging

GEOMETRY_CHECKS = {
    "build": "geometry.build",
    "diameter": "geometry.diameter",
    "transversal": "geometry.transversal",
    "transitivity": "geometry.transitivity",
    "residues": "geometry.residues",
    "residual": "geometry.residual_connectivity",
    "h1": "topology.h1",
    "pi1": "topology.pi1",
    "invariants": "topology.invariants",
    "triangles": "topology.triangles",
}

COUNT_CHECKS = {
    "line": "counts.line_census",
    "sumsq": "counts.sum_of_squares",
    "degplane": "counts.degenerate_planes",
    "radplane": "counts.radical_planes",
    "connected": "counts.connected_subspaces",
}


class Settings:
    """Global options shared by the subcommands."""

    def __init__(
        self,
        config: VerifierConfig,
        jobs: int,
        timings: bool,
        verbose: bool,
    ):
        self.config = config
        self.jobs = jobs
        self.timings = timings
        self.verbose = verbose


def _error(label: str, message: str, hint: Optional[str] = None) -> None:
    click.echo(click.style(f"✗ {label}: ", fg="red", bold=True) + message, err=True)
    if hint:
        click.echo(
            "\n" + click.style("Hint: ", fg="yellow", bold=True) + hint,
            err=True,
        )


def handle_errors(command: Callable) -> Callable:
    """Map the exception hierarchy to messages and exit codes.

    Exit codes:
      1: A claim with an expectation failed, or an internal error
      2: Configuration, usage or I/O error
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ConfigurationError as e:
            _error("Configuration Error", str(e))
            sys.exit(2)
        except (UsageError, EvenCharacteristicError, InvalidPrimeError) as e:
            _error(
                "Usage Error",
                str(e),
                "q must be an odd prime power; geometries over q = 3 mod 4 "
                "also need --allow-minus-one-nonsquare."
                if isinstance(e, (EvenCharacteristicError, InvalidPrimeError))
                else None,
            )
            sys.exit(2)
        except OSError as e:
            _error("I/O Error", str(e))
            sys.exit(2)
        except VerificationError as e:
            _error("Verification Error", str(e))
            sys.exit(1)
        except Exception as e:
            _error("Unexpected Error", str(e))
            settings = click.get_current_context().find_object(Settings)
            if settings is not None and settings.verbose:
                import traceback

                traceback.print_exc()
            sys.exit(1)

    return wrapper


def _emit(reports: Sequence[VerificationReport], out: Optional[str]) -> int:
    """Write reports, print the summary and return the exit code."""
    if out:
        write_report_file(reports, Path(out))
    for line in summary_lines(reports):
        click.echo(line)
    if any(r.failed for r in reports):
        click.echo(click.style("✗ ", fg="red", bold=True) + "A claim failed its expectation")
        return 1
    return 0


@click.group()
@click.version_option(version=__version__, prog_name="orthoverify")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    show_default=True,
    help="Log level for messages on stderr.",
)
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging.")
@click.option("--seed", type=int, default=None, help="Seed for sampled checks.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes.")
@click.option(
    "--config",
    "config_path",
    default=None,
    help="Path to an INI file with an [orthoverify] budget section.",
)
@click.option(
    "--timings",
    is_flag=True,
    help="Record wall time in reports (reports are then no longer reproducible).",
)
@click.pass_context
def cli(ctx, log_level, verbose, seed, jobs, config_path, timings):
    """orthoverify - Verify the geometry of square-type subspaces.

    Builds the geometry of nondegenerate square-type subspaces of F_q^(n+1),
    checks its counting lemmas, connectedness and flag transitivity, and
    computes homotopy invariants of its incidence complex.
    """
    setup_logging(log_level, verbose)
    try:
        config = load_config(config_path).override(seed=seed)
    except ConfigurationError as e:
        _error("Configuration Error", str(e))
        sys.exit(2)
    ctx.obj = Settings(config, jobs, timings, verbose)


@cli.command("field-lemma")
@click.option("--q-min", type=int, default=3, show_default=True, help="Smallest q.")
@click.option("--q-max", type=int, default=409, show_default=True, help="Largest q.")
@click.option(
    "--mod4",
    type=click.Choice(["1", "3", "all"]),
    default="all",
    show_default=True,
    help="Residue of q mod 4 to scan.",
)
@click.option("--out", default=None, help="JSON-lines report file.")
@click.option("--csv", "csv_path", default=None, help="CSV summary file.")
@click.pass_obj
@handle_errors
def field_lemma(settings, q_min, q_max, mod4, out, csv_path):
    """Run the sum-of-squares search over every odd prime power in a range.

    Examples:

      # Reproduce the list of exceptional q = 1 mod 4
      orthoverify field-lemma --q-min 3 --q-max 409 --mod4 1

    Exit codes:
      0: Failing set matches the expected exceptional list
      1: Mismatch
      2: Usage or I/O error
    """
    if q_min > q_max:
        raise UsageError(f"--q-min {q_min} is larger than --q-max {q_max}")
    params = {"q_min": q_min, "q_max": q_max, "mod4": mod4 if mod4 == "all" else int(mod4)}
    report = run_claim(
        "field.joes_lemma", params, ClaimContext(settings.config), settings.timings
    )
    if csv_path:
        write_scan_csv(report.values["results"], Path(csv_path))
    failing = report.values["failing_q_mod_4_one"]
    click.echo(f"  Scanned: {report.values['scanned']} prime powers")
    click.echo(f"  Failing q = 1 mod 4: {', '.join(map(str, failing)) or 'none'}")
    sys.exit(_emit([report], out))


@cli.command()
@click.option("--n", "n", type=int, required=True, help="Rank of the geometry (dim V - 1).")
@click.option("--q", "q", type=int, required=True, help="Field order.")
@click.option(
    "--check",
    "checks",
    type=click.Choice(sorted(GEOMETRY_CHECKS)),
    multiple=True,
    default=("build",),
    show_default=True,
    help="Pipeline to run; repeat for several.",
)
@click.option("--budget-cosets", type=int, default=None, help="Coset enumeration budget.")
@click.option("--budget-cells", type=int, default=None, help="Incidence complex cell budget.")
@click.option("--sample-size", type=int, default=None, help="Triangles to sample.")
@click.option("--out", default=None, help="JSON-lines report file.")
@click.option(
    "--presentation-out",
    default=None,
    help="Write the fundamental group presentation (with --check pi1).",
)
@click.option(
    "--allow-minus-one-nonsquare",
    is_flag=True,
    help="Build the geometry for q = 3 mod 4 (recorded in provenance).",
)
@click.pass_obj
@handle_errors
def geometry(
    settings,
    n,
    q,
    checks,
    budget_cosets,
    budget_cells,
    sample_size,
    out,
    presentation_out,
    allow_minus_one_nonsquare,
):
    """Build the geometry for (n, q) and run the selected checks.

    Examples:

      orthoverify geometry --n 3 --q 5 --check diameter

      orthoverify geometry --n 3 --q 5 --check h1 --check pi1 \\
          --presentation-out pi1.txt

    Budget exhaustion is reported as Exceeded and does not fail the run.
    """
    config = settings.config.override(
        max_cosets=budget_cosets, max_cells=budget_cells, sample_size=sample_size
    )
    context = ClaimContext(config, allow_minus_one_nonsquare=allow_minus_one_nonsquare)
    params = {"n": n, "q": q}
    reports: List[VerificationReport] = []
    for check in dict.fromkeys(checks):
        reports.append(run_claim(GEOMETRY_CHECKS[check], params, context, settings.timings))

    presentation = context.artifacts.get("topology.pi1:presentation")
    if presentation_out and presentation is not None:
        Path(presentation_out).write_text(presentation, encoding="utf-8")
        click.echo(f"  Presentation written to {presentation_out}")
    sys.exit(_emit(reports, out))


@cli.command()
@click.option("--q", "q", type=int, required=True, help="Field order.")
@click.option(
    "--which",
    type=click.Choice(sorted(COUNT_CHECKS)),
    multiple=True,
    default=("line", "sumsq", "degplane", "radplane"),
    show_default=True,
    help="Counting lemma to verify; repeat for several.",
)
@click.option("--out", default=None, help="JSON-lines report file.")
@click.pass_obj
@handle_errors
def counts(settings, q, which, out):
    """Verify the point-counting lemmas over F_q.

    Examples:

      orthoverify counts --q 13 --which line
    """
    context = ClaimContext(settings.config)
    reports = [
        run_claim(COUNT_CHECKS[w], {"q": q}, context, settings.timings)
        for w in dict.fromkeys(which)
    ]
    sys.exit(_emit(reports, out))


@cli.command()
@click.option(
    "--paper-suite",
    "claim_suite",
    is_flag=True,
    help="Run every claim with an expectation.",
)
@click.option("--open-cases", is_flag=True, help="Compute H1 and pi1 for n = 3, q in 5..17.")
@click.option("--jobs", type=int, default=None, help="Worker processes (overrides global).")
@click.option(
    "--out-dir",
    default="reports",
    show_default=True,
    help="Directory for one report file per claim.",
)
@click.pass_obj
@handle_errors
def campaign(settings, claim_suite, open_cases, jobs, out_dir):
    """Run a batch of claims and write one report file per claim.

    Exit codes:
      0: Every claim with an expectation passed
      1: At least one claim failed
      2: Usage or I/O error
    """
    result = run_campaign(
        claim_suite,
        open_cases,
        Path(out_dir),
        settings.config,
        jobs if jobs is not None else settings.jobs,
        settings.timings,
    )
    for line in summary_lines(result.reports):
        click.echo(line)
    click.echo(f"  Reports written to {out_dir} ({len(result.files)} files)")
    if not result.success:
        click.echo(
            click.style("✗ ", fg="red", bold=True)
            + f"{len(result.failed)} claim(s) failed: "
            + ", ".join(sorted({r.claim_id for r in result.failed}))
        )
        sys.exit(1)
    click.echo(click.style("✓ ", fg="green", bold=True) + "Campaign complete")
    sys.exit(0)


def main():
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
