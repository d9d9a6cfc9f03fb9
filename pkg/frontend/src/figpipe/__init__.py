"""CSV-to-figure pipeline for randlat artifacts."""

__version__ = "0.1.0"

from .render import FIGURES, SchemaError, render
