"""Figures for the sweep reports, rendered straight to PNG files.

Uses the object-oriented Agg canvas so no global pyplot state is touched.
"""
from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

_AXIS_LABELS = {
    "spacing": "element spacing [m]",
    "distance": "TX-RX distance [m]",
    "tx_elems": "TX elements per side",
    "snr": "average transmit SNR [dB]",
    "none": "configuration",
}
_STYLES = {"CDCM": "o-", "CICM": "s--", "Exact": "k^-"}


def _new_figure(width=6.4, height=4.2):
    fig = Figure(figsize=(width, height), dpi=120)
    FigureCanvasAgg(fig)
    return fig


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    return path


def _f(row, key):
    try:
        return float(row[key])
    except (KeyError, ValueError, TypeError):
        return math.nan


def plot_nmse(rows, axis: str, path) -> Path:
    fig = _new_figure()
    ax = fig.add_subplot(1, 1, 1)
    series = defaultdict(list)
    for r in rows:
        if r["error"]:
            continue
        series[(r["model"], r["rx_polar_v"])].append((_f(r, "sweep_value_si"), _f(r, "nmse")))
    for (model, pol), pts in sorted(series.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], _STYLES.get(model, "x-"),
                label=f"{model}, rx polar_v={float(pol):g} deg", markersize=4)
    ax.set_yscale("log")
    if axis in ("spacing", "distance"):
        ax.set_xscale("log")
    ax.set_xlabel(_AXIS_LABELS.get(axis, axis))
    ax.set_ylabel("NMSE")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    return _finish(fig, path)


def plot_spectra(rows, path) -> Path:
    groups = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r["error"]:
            continue
        key = (r["sweep_value_si"], r["rx_polar_v"])
        groups[key][r["model"]].append((int(r["index"]), _f(r, "singular_value")))
    n = max(1, len(groups))
    fig = _new_figure(width=4.0 * min(n, 3), height=3.4 * math.ceil(n / 3))
    for k, (key, models) in enumerate(sorted(groups.items())):
        ax = fig.add_subplot(math.ceil(n / 3), min(n, 3), k + 1)
        for model, pts in sorted(models.items()):
            pts.sort()
            ax.semilogy([p[0] + 1 for p in pts], [max(p[1], 1e-300) for p in pts],
                        _STYLES.get(model, "x-"), label=model, markersize=3)
        ax.set_title(f"value={key[0]}, polar_v={key[1]}", fontsize=8)
        ax.set_xlabel("mode index")
        ax.set_ylabel("singular value")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7)
    return _finish(fig, path)


def plot_capacity(rows, axis: str, path) -> Path:
    fig = _new_figure()
    ax = fig.add_subplot(1, 1, 1)
    by_pol = defaultdict(list)
    for r in rows:
        if not r["error"]:
            by_pol[r["rx_polar_v"]].append(r)
    for pol, rs in sorted(by_pol.items()):
        x = [_f(r, "sweep_value_si") for r in rs]
        ax.plot(x, [_f(r, "exact_bits") for r in rs], "o-", label=f"exact (polar_v={pol})")
        ax.plot(x, [_f(r, "bound_bits") for r in rs], "--", label="upper bound")
        ax.plot(x, [_f(r, "ff_bound_bits") for r in rs], ":", label="upper bound (FF)")
    if axis == "distance":
        ax.set_xscale("log")
    ax.set_xlabel(_AXIS_LABELS.get(axis, axis))
    ax.set_ylabel("capacity [bit/s/Hz]")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    return _finish(fig, path)
