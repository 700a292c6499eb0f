"""Defaults table and config-file loading."""
