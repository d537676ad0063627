"""Report rendering: histogram CSVs with matplotlib figures alongside,
and the evaluation TSV matching the benchmark-table layout."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import metrics  # noqa: E402


def write_histogram(values, out_base, bin_width=0.05, title=None,
                    xlabel=None):
    """Write <out_base>.csv with (bin_low, bin_high, count) rows and a
    matching <out_base>.png bar chart.  Returns the two paths."""
    out_base = Path(out_base)
    rows = metrics.histogram(values, bin_width=bin_width)
    csv_path = out_base.with_suffix(".csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, count in rows:
            writer.writerow(["%.2f" % lo, "%.2f" % hi, count])

    png_path = out_base.with_suffix(".png")
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar([lo for lo, _, _ in rows], [c for _, _, c in rows],
           width=bin_width, align="edge", edgecolor="black", linewidth=0.4)
    ax.set_xlabel(xlabel or "score")
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    ax.set_xlim(0.0, 1.0)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return csv_path, png_path


EVAL_COLUMNS = ("model", "max_f1", "precision", "recall", "threshold")


def append_eval_row(path, model_name, result):
    """Append one benchmark row (model, max_f1, precision, recall,
    threshold) to a TSV report, writing the header on first use."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        if new:
            fh.write("\t".join(EVAL_COLUMNS) + "\n")
        p = result.max_f1
        fh.write("%s\t%.3f\t%.3f\t%.3f\t%.6g\n"
                 % (model_name, p.f1, p.precision, p.recall, p.threshold))
