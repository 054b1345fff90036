"""Chart rendering for sweep CSV outputs.

Read-only consumer of the harness CSV contract: a summary table
(p, method, mean_pd, mean_sinr_db, trial_count) and a pooled phase-error
CDF table (p, method, e_deg, cdf).  Nothing is recomputed; plotted
vertices equal the CSV values.
"""

from .errors import EmptyCsv, PlotError, SchemaMismatch
from .io import CdfTable, SummaryTable, read_cdf_csv, read_summary_csv
from .render import PlotJob, render, render_panels

__all__ = [
    "CdfTable", "EmptyCsv", "PlotError", "PlotJob", "SchemaMismatch",
    "SummaryTable", "read_cdf_csv", "read_summary_csv", "render",
    "render_panels",
]
