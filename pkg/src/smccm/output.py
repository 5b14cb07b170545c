"""Result emission: CSV tables and SVG plots.

CSV files are the canonical interchange format (stable column order,
repr-based shortest-roundtrip floats, no locale dependence); plots are
derived views. Plot rendering is pinned deterministic: fixed hash salt,
no embedded timestamps.
"""

from __future__ import annotations

import csv
import io
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

PLOT_KINDS = ("mse_vs_symbols", "mse_vs_snr", "ber_vs_symbols", "ber_vs_snr",
              "ber_vs_users", "bound_trace")
_LOG_Y = {"mse_vs_symbols", "mse_vs_snr", "ber_vs_symbols", "ber_vs_snr", "ber_vs_users"}
_X_LABEL = {"mse_vs_symbols": "symbols", "ber_vs_symbols": "symbols",
            "mse_vs_snr": "Eb/N0 (dB)", "ber_vs_snr": "Eb/N0 (dB)",
            "ber_vs_users": "users", "bound_trace": "symbols"}
_Y_LABEL = {"mse_vs_symbols": "MSE", "mse_vs_snr": "MSE",
            "ber_vs_symbols": "BER", "ber_vs_snr": "BER", "ber_vs_users": "BER",
            "bound_trace": "bound"}


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def render_csv(columns: dict) -> str:
    """Render named columns (equal lengths) to CSV text, one row per
    index, header first."""
    if not columns:
        raise ValueError("no columns to emit")
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"columns disagree on length: {sorted(lengths)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*arrays):
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(columns: dict, path: str) -> str:
    """Write columns to ``path``; byte-identical for identical input."""
    text = render_csv(columns)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def records_to_columns(records: np.ndarray) -> dict:
    """Structured record array -> ordered column dict."""
    return {name: records[name] for name in records.dtype.names}


def parse_csv(path: str) -> dict:
    """Read an emitted CSV back into float columns."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    cols = np.asarray(rows, dtype=np.float64).T if rows else np.zeros((len(header), 0))
    return {name: cols[j] for j, name in enumerate(header)}


def make_figure(series: dict, kind: str):
    """Build the figure for a plot kind.

    series maps legend labels to (x, y) pairs. MSE/BER kinds use a log
    y-axis. Returns the matplotlib figure.
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    if not series:
        raise ValueError("no series to plot")
    lengths = {len(np.asarray(y)) for _, (_, y) in series.items()}
    if len(lengths) != 1:
        raise ValueError(f"series disagree on length: {sorted(lengths)}")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, (x, y) in series.items():
        ax.plot(np.asarray(x), np.asarray(y), label=str(label))
    if kind in _LOG_Y:
        ax.set_yscale("log")
    ax.set_xlabel(_X_LABEL[kind])
    ax.set_ylabel(_Y_LABEL[kind])
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def emit_plot(series: dict, kind: str, path: str) -> str:
    """Render and save a deterministic SVG plot."""
    with plt.rc_context({"svg.hashsalt": "smccm"}):
        fig = make_figure(series, kind)
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
