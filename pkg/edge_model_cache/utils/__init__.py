"""Error translation and timing decorators."""
