"""CLI commands for sdvsr."""
