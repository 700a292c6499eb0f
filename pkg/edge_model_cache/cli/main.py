"""Main CLI entry point for the edge model cache simulator.

Runs policy x seed experiments and prints the defaults table.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 internal
invariant violation, 1 anything else.
"""

import logging
from pathlib import Path
from typing import List, Optional

import typer
from dotenv import load_dotenv

from edge_model_cache.cli.commands.defaults import print_defaults
from edge_model_cache.cli.commands.run import run_command
from edge_model_cache.exceptions import EdgeCacheError

app = typer.Typer(
    help="Edge LLM model caching simulator",
    name="simrun",
    add_completion=False,
)


@app.command()
def simrun(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="TOML experiment config"),
    policy: Optional[List[str]] = typer.Option(
        None, "--policy", "-p", help="Policy to run (LAOT, FIFO, LFU, CLOUD_ONLY); repeatable"
    ),
    seeds: Optional[str] = typer.Option(None, "--seeds", help="Comma-separated seeds, e.g. 0,1,2"),
    slots: Optional[int] = typer.Option(None, "--slots", help="Number of slots per run"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    emit: Optional[str] = typer.Option(None, "--format", help="Outputs to write: csv, json or both"),
    summary: bool = typer.Option(False, "--summary", help="Print the policy comparison"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Parallel runs; 0 uses every CPU"),
    print_defaults_flag: bool = typer.Option(False, "--print-defaults", help="Print the defaults table and exit"),
    as_json: bool = typer.Option(False, "--json", help="With --print-defaults, print JSON"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """Run a policy x seed caching experiment."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(message)s",
    )
    if print_defaults_flag:
        print_defaults(as_json)
        return

    try:
        run_command(config, policy, seeds, slots, out, emit, jobs, summary)
    except EdgeCacheError as e:
        typer.secho(f"Error: {e}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=e.exit_code)


def main():
    """Entry point for the CLI."""
    load_dotenv()
    app()


if __name__ == "__main__":
    main()
