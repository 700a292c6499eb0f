"""Command-line interface: the ``simrun`` typer app."""
