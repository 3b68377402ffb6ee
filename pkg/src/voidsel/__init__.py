"""Ignorance-zone discovery and ignorance-aware prototype selection."""

__version__ = "0.1.0"
