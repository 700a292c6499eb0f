"""CLI rendering of the defaults table."""

import json

import typer
from rich.console import Console
from rich.table import Table

from edge_model_cache.config.defaults import defaults, defaults_as_dict

console = Console()


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(str(item) for item in value) or "(empty)"
    return str(value)


def print_defaults(as_json: bool = False) -> None:
    """Print every default parameter with its provenance, as a table or as JSON."""
    if as_json:
        typer.echo(json.dumps(defaults_as_dict(), indent=2))
        return

    table = Table(title="Simulation defaults")
    table.add_column("Key", style="bold")
    table.add_column("Value")
    table.add_column("Provenance")
    table.add_column("Note")
    for entry in defaults():
        style = "green" if entry.provenance == "PAPER" else None
        table.add_row(entry.key, _format_value(entry.value), entry.provenance, entry.note, style=style)
    console.print(table)
