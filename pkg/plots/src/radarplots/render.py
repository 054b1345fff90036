"""Three-panel rendering: PD vs p, SINR vs p, phase-error CDF.

The renderer applies no numerical transformation: every curve's vertex
list equals the CSV values verbatim, so tests can read the data back
from the figure and compare exactly.
"""

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .io import read_cdf_csv, read_summary_csv  # noqa: E402

DEFAULT_STYLES = {
    "none": {"color": "#777777", "linestyle": "-", "marker": "o"},
    "td_th": {"color": "#1f77b4", "linestyle": "--", "marker": "s"},
    "tfd_th": {"color": "#d62728", "linestyle": "-", "marker": "^"},
}
FALLBACK_STYLE = {"linestyle": "-", "marker": "."}

PD_FILE = "pd_vs_p.svg"
SINR_FILE = "sinr_vs_p.svg"
CDF_FILE = "phase_error_cdf.svg"


@dataclass(frozen=True)
class PlotJob:
    """One batch rendering task."""

    pd_csv: str
    cdf_csv: str
    out_dir: str
    styles: dict = field(default_factory=lambda: dict(DEFAULT_STYLES))


def _style_for(styles, method):
    return styles.get(method, FALLBACK_STYLE)


def _line_panel(curves, styles, xlabel, ylabel, title):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, xs, ys in curves:
        method = label.split(",")[0]
        ax.plot(xs, ys, label=label, markersize=4,
                **_style_for(styles, method))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render_panels(summary, cdf, styles=None):
    """Build the three figures from parsed tables; returns
    {"pd": fig, "sinr": fig, "cdf": fig} without touching disk."""
    styles = dict(DEFAULT_STYLES) if styles is None else styles
    pd_fig = _line_panel(summary.curves("mean_pd"), styles,
                         "interference probability p",
                         "probability of detection",
                         "Detection vs interference probability")
    sinr_fig = _line_panel(summary.curves("mean_sinr_db"), styles,
                           "interference probability p", "SINR (dB)",
                           "SINR vs interference probability")
    cdf_fig = _line_panel(cdf.curves(), styles,
                          "phase error (deg)", "CDF",
                          "Phase-error CDF")
    return {"pd": pd_fig, "sinr": sinr_fig, "cdf": cdf_fig}


def render(job: PlotJob) -> dict:
    """Read both CSVs, render the three panels, and write them as SVG
    files under job.out_dir.  Returns {panel: path}."""
    summary = read_summary_csv(job.pd_csv)
    cdf = read_cdf_csv(job.cdf_csv)
    figs = render_panels(summary, cdf, job.styles)
    os.makedirs(job.out_dir, exist_ok=True)
    names = {"pd": PD_FILE, "sinr": SINR_FILE, "cdf": CDF_FILE}
    paths = {}
    try:
        for panel, fig in figs.items():
            path = os.path.join(job.out_dir, names[panel])
            fig.savefig(path, format="svg")
            paths[panel] = path
    finally:
        for fig in figs.values():
            plt.close(fig)
    return paths
