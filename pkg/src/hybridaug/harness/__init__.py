"""Benchmark harness: run configs, cross-validation protocols and reports."""

from .config import (
    Cell,
    CellConfig,
    ConfigError,
    OutOfScope,
    RunConfig,
    load_config,
    parse_config,
    resolve_augmentation,
    resolve_cells,
    resolve_classifier,
)
from .report import (
    OUT_OF_SCOPE,
    canonical_json,
    content_hash,
    pivot,
    render_pivot_csv,
    render_pivot_text,
    render_summary,
    report_bytes,
    verify_report,
    write_outputs,
)
from .runner import (
    CLEAN,
    LEAKY,
    LeakageError,
    cell_seed,
    check_clean_fold,
    dataset_fingerprint,
    load_dataset,
    run_cell_clean,
    run_cell_leaky,
    run_clean,
    run_grid,
    run_leaky,
)

__all__ = [
    "CLEAN",
    "Cell",
    "CellConfig",
    "ConfigError",
    "LEAKY",
    "LeakageError",
    "OUT_OF_SCOPE",
    "OutOfScope",
    "RunConfig",
    "canonical_json",
    "cell_seed",
    "check_clean_fold",
    "content_hash",
    "dataset_fingerprint",
    "load_config",
    "load_dataset",
    "parse_config",
    "pivot",
    "render_pivot_csv",
    "render_pivot_text",
    "render_summary",
    "report_bytes",
    "resolve_augmentation",
    "resolve_cells",
    "resolve_classifier",
    "run_cell_clean",
    "run_cell_leaky",
    "run_clean",
    "run_grid",
    "run_leaky",
    "verify_report",
    "write_outputs",
]
