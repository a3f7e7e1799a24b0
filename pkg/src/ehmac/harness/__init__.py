"""Sweeps, figure presets, analytic/simulation comparison, audit and CLI."""

from .audit import AuditReport, audit
from .sweep import (PRESETS, ComparisonRow, MetricComparison, SweepSpec, compare, csv_rows,
                    evaluate, figure_preset)

__all__ = ["AuditReport", "audit", "PRESETS", "ComparisonRow", "MetricComparison", "SweepSpec",
           "compare", "csv_rows", "evaluate", "figure_preset"]
