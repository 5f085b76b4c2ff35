"""Experiment runner, report emission and the command-line interface."""

from .reports import emit_reports, load_table, median_deltas, read_records, write_records
from .runner import TUNED, UNTUNED, ExperimentPlan, RunRecord, cell_seed, plan_cells, run_plan, run_tuned, run_untuned

__all__ = [
    "TUNED", "UNTUNED", "ExperimentPlan", "RunRecord", "cell_seed", "plan_cells", "run_plan",
    "run_tuned", "run_untuned", "emit_reports", "load_table", "median_deltas", "read_records",
    "write_records",
]
