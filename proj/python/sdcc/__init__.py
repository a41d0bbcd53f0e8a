"""Combinatorial coverage (CC) and set-difference combinatorial coverage (SDCC)."""

from fractions import Fraction

from ._core import (
    Dataset,
    Projection2D,
    QuantileBinning,
    Schema,
    SdccError,
    __version__,
    apply_predicate,
    assign_bin,
    build_combination_set,
    combinatorial_coverage,
    combos_of_record,
    coverage_gap_report,
    fit_projection,
    fit_quantile_bins,
    partition_relaxed,
    partition_strict,
    project_and_scale,
    region_of,
    sdcc,
    select_labeling_batch,
    universe_count,
)


def as_fraction(ratio: dict) -> Fraction:
    """Exact value of a ratio dict returned by the coverage functions."""
    return Fraction(ratio["numerator"], ratio["denominator"])


__all__ = [
    "Dataset",
    "Projection2D",
    "QuantileBinning",
    "Schema",
    "SdccError",
    "__version__",
    "apply_predicate",
    "as_fraction",
    "assign_bin",
    "build_combination_set",
    "combinatorial_coverage",
    "combos_of_record",
    "coverage_gap_report",
    "fit_projection",
    "fit_quantile_bins",
    "partition_relaxed",
    "partition_strict",
    "project_and_scale",
    "region_of",
    "sdcc",
    "select_labeling_batch",
    "universe_count",
]
