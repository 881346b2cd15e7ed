"""Command-line interface, file schemas, and report assembly."""

from .main import main

__all__ = ["main"]
