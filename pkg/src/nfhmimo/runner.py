"""Config-driven sweeps that write CSV tables, figures and metadata sidecars.

Every sweep point is independent; with ``cfg.workers > 1`` points run on a
thread pool but rows are always written in grid order. CSV files carry no
timestamps, so reruns of the same config are byte-identical; run metadata
(time, version, config echo) goes to a ``.meta.json`` sidecar.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, formats, plotting
from .capacity import SnrParams, capacity_report, config_hash
from .channel import Model, QuadratureSpec, assemble_channel, simulate_transmission
from .config import ExperimentConfig
from .errors import HMIMOError
from .metrics import SPECTRUM_KIND, nmse, singular_spectrum

_UNIT_COLUMNS = ("frequency_hz", "wavelength_m", "tx_len_h_m", "tx_len_v_m",
                 "rx_len_h_m", "rx_len_v_m", "distance_m", "n_tx", "n_rx")


@dataclass
class Point:
    """One resolved sweep point."""

    value: float
    value_si: float
    rx_polar_v: float
    tx: object
    rx: object
    snr_db: float


@dataclass
class RunResult:
    csv_path: Path
    figure_path: Path | None = None
    meta_path: Path | None = None
    extra_paths: list = field(default_factory=list)
    n_rows: int = 0
    n_errors: int = 0


def _unit_values(cfg: ExperimentConfig, pt: Point) -> list:
    dist = float(np.linalg.norm(np.subtract(pt.rx.center, pt.tx.center)))
    return [cfg.wave.frequency, cfg.wave.wavelength, pt.tx.len_h, pt.tx.len_v,
            pt.rx.len_h, pt.rx.len_v, dist, pt.tx.n_elements, pt.rx.n_elements]


def sweep_points(cfg: ExperimentConfig) -> list[Point]:
    """Grid points in output order: sweep value outer, receive tilt inner."""
    values = cfg.sweep_values if cfg.sweep_axis != "none" else (math.nan,)
    tilts = cfg.rx_polar_v or (cfg.rx.polar_v,)
    points = []
    for value in values:
        tx, rx, snr_db = cfg.tx, cfg.rx, cfg.snr_db
        si = cfg.sweep_si(value)
        if cfg.sweep_axis == "spacing":
            tx = tx.replace(len_h=si, len_v=si)
            rx = rx.replace(len_h=si, len_v=si)
        elif cfg.sweep_axis == "distance":
            direction = np.subtract(rx.center, tx.center)
            norm = np.linalg.norm(direction)
            direction = direction / norm if norm > 0 else np.array([0.0, 0.0, 1.0])
            rx = rx.replace(center=tuple(np.asarray(tx.center) + si * direction))
        elif cfg.sweep_axis == "tx_elems":
            tx = tx.replace(n_h=int(value), n_v=int(value))
        elif cfg.sweep_axis == "snr":
            snr_db = value
        for tilt in tilts:
            points.append(Point(value, si, tilt, tx, rx.replace(polar_v=tilt), snr_db))
    return points


def _map(cfg: ExperimentConfig, fn, items):
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _error_label(err: Exception) -> str:
    return f"{type(err).__name__}: {err}".replace("\n", " ")


def _write_meta(path: Path, cfg: ExperimentConfig, kind: str, extra=None) -> Path:
    meta = {
        "kind": kind,
        "tool": "nfhmimo",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": cfg.echo(),
        "config_hash": config_hash(cfg.canonical()),
    }
    if extra:
        meta.update(extra)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_nmse_sweep(cfg: ExperimentConfig, plot: bool = True) -> RunResult:
    """NMSE of every non-reference model against the quadrature oracle."""
    if Model.EXACT not in cfg.models:
        raise HMIMOError("nmse sweep needs the Exact model as reference")
    others = [m for m in cfg.models if m is not Model.EXACT]
    q = QuadratureSpec(cfg.quad_order)

    def evaluate(pt: Point):
        try:
            ref = assemble_channel(Model.EXACT, pt.tx, pt.rx, cfg.wave, q)
        except (HMIMOError, np.linalg.LinAlgError) as err:
            return [(m, math.nan, _error_label(err)) for m in others]
        out = []
        for m in others:
            try:
                out.append((m, nmse(assemble_channel(m, pt.tx, pt.rx, cfg.wave, q), ref), ""))
            except (HMIMOError, np.linalg.LinAlgError) as err:
                out.append((m, math.nan, _error_label(err)))
        return out

    points = sweep_points(cfg)
    results = _map(cfg, evaluate, points)
    header = ("sweep_axis", "sweep_value", "sweep_value_si", "rx_polar_v", "model",
              "nmse") + _UNIT_COLUMNS + ("error",)
    rows = []
    for pt, res in zip(points, results):
        for model, val, err in res:
            rows.append([cfg.sweep_axis, pt.value, pt.value_si, pt.rx_polar_v, model.value,
                         val, *_unit_values(cfg, pt), err])
    out = _out_dir(cfg)
    result = RunResult(formats.write_csv(out / "nmse.csv", header, rows), n_rows=len(rows),
                       n_errors=sum(1 for r in rows if r[-1]))
    if plot:
        result.figure_path = plotting.plot_nmse([dict(zip(header, r)) for r in rows],
                                                cfg.sweep_axis, out / "nmse.png")
    result.meta_path = _write_meta(out / "nmse.meta.json", cfg, "nmse")
    return result


def run_eigen(cfg: ExperimentConfig, plot: bool = True) -> RunResult:
    """Singular-value spectra of every configured model at each point."""
    q = QuadratureSpec(cfg.quad_order)

    def evaluate(pt: Point):
        out = []
        for m in cfg.models:
            try:
                spec = singular_spectrum(assemble_channel(m, pt.tx, pt.rx, cfg.wave, q))
                out.append((m, spec.values, ""))
            except (HMIMOError, np.linalg.LinAlgError) as err:
                out.append((m, None, _error_label(err)))
        return out

    points = sweep_points(cfg)
    results = _map(cfg, evaluate, points)
    header = ("sweep_axis", "sweep_value", "sweep_value_si", "rx_polar_v", "model",
              "index", "singular_value", "kind") + _UNIT_COLUMNS + ("error",)
    rows = []
    for pt, res in zip(points, results):
        units = _unit_values(cfg, pt)
        for model, values, err in res:
            if values is None:
                rows.append([cfg.sweep_axis, pt.value, pt.value_si, pt.rx_polar_v,
                             model.value, -1, math.nan, SPECTRUM_KIND, *units, err])
                continue
            for k, s in enumerate(values):
                rows.append([cfg.sweep_axis, pt.value, pt.value_si, pt.rx_polar_v,
                             model.value, k, s, SPECTRUM_KIND, *units, ""])
    out = _out_dir(cfg)
    result = RunResult(formats.write_csv(out / "spectrum.csv", header, rows),
                       n_rows=len(rows), n_errors=sum(1 for r in rows if r[-1]))
    if plot:
        result.figure_path = plotting.plot_spectra([dict(zip(header, r)) for r in rows],
                                                   out / "spectrum.png")
    result.meta_path = _write_meta(out / "spectrum.meta.json", cfg, "eigen",
                                   {"spectrum_kind": SPECTRUM_KIND})
    return result


def run_capacity_sweep(cfg: ExperimentConfig, plot: bool = True) -> RunResult:
    """Exact capacity, near-field bound and far-field bound at each point."""
    def evaluate(pt: Point):
        try:
            rep = capacity_report(pt.tx, pt.rx, SnrParams.from_db(pt.snr_db), cfg.wave,
                                  cfg.power_fraction, cfg.squared_energy)
            return rep, ""
        except (HMIMOError, np.linalg.LinAlgError, ValueError) as err:
            return None, _error_label(err)

    points = sweep_points(cfg)
    results = _map(cfg, evaluate, points)
    header = ("config_hash", "sweep_axis", "sweep_value", "sweep_value_si", "rx_polar_v",
              "P", "snr_db", "exact_bits", "bound_bits", "ff_bound_bits") \
        + _UNIT_COLUMNS + ("error",)
    base = cfg.canonical()
    rows = []
    for pt, (rep, err) in zip(points, results):
        h = config_hash(f"{base}|{pt.value!r}|{pt.rx_polar_v!r}")
        if rep is None:
            vals = [h, -1, pt.snr_db, math.nan, math.nan, math.nan]
        else:
            vals = rep.csv_row(h)
        rows.append([vals[0], cfg.sweep_axis, pt.value, pt.value_si, pt.rx_polar_v,
                     *vals[1:], *_unit_values(cfg, pt), err])
    out = _out_dir(cfg)
    result = RunResult(formats.write_csv(out / "capacity.csv", header, rows),
                       n_rows=len(rows), n_errors=sum(1 for r in rows if r[-1]))
    if plot:
        result.figure_path = plotting.plot_capacity([dict(zip(header, r)) for r in rows],
                                                    cfg.sweep_axis, out / "capacity.png")
    result.meta_path = _write_meta(out / "capacity.meta.json", cfg, "capacity")
    return result


def dump_channel(cfg: ExperimentConfig, model) -> RunResult:
    """Write one assembled channel as CSV and binary, plus a metadata sidecar.

    Also writes ``transmission_<model>.csv``: the received vector for a
    random unit-power current excitation and noise of variance
    ``noise.variance``, both drawn from ``seed``.
    """
    model = Model.parse(model)
    if cfg.sweep_axis != "none":
        raise HMIMOError("dump needs a single configuration (sweep.axis = none)")
    H = assemble_channel(model, cfg.tx, cfg.rx, cfg.wave, QuadratureSpec(cfg.quad_order),
                         workers=cfg.workers)
    out = _out_dir(cfg)
    stem = f"channel_{model.value}"
    csv_path = formats.write_matrix_csv(out / f"{stem}.csv", H.data)
    bin_path = formats.write_matrix_bin(out / f"{stem}.bin", H.data)

    rng = np.random.default_rng(cfg.seed)
    rows, cols = H.shape
    j = (rng.standard_normal(cols) + 1j * rng.standard_normal(cols)) / math.sqrt(2 * cols)
    noise = math.sqrt(cfg.noise_variance / 2) * (
        rng.standard_normal(rows) + 1j * rng.standard_normal(rows))
    e = simulate_transmission(H, j, noise, cfg.rx.element_area)
    def cell(vec, k):
        return vec[k] if k < len(vec) else ""
    tx_path = formats.write_csv(out / f"transmission_{model.value}.csv",
                                ("index", "current", "noise", "field"),
                                ([k, cell(j, k), cell(noise, k), cell(e, k)]
                                 for k in range(max(rows, cols))))
    meta = _write_meta(out / f"{stem}.meta.json", cfg, "dump", {
        "model": model.value,
        "rows": rows,
        "cols": cols,
        "wavelength_m": cfg.wave.wavelength,
        "seed": cfg.seed,
        "files": {"csv": csv_path.name, "bin": bin_path.name, "transmission": tx_path.name},
    })
    return RunResult(csv_path, None, meta, [bin_path, tx_path], n_rows=rows)
