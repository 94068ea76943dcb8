"""Shared exception base so callers (CLI, service) can catch one family."""


class SparcsError(Exception):
    """Base class for all workbench errors."""
