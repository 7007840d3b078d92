"""Command-line interface and dimension-bound calculators."""
from .app import main
from .bounds import BoundsReport, bounds, schlafly_bound

__all__ = ["BoundsReport", "bounds", "main", "schlafly_bound"]
