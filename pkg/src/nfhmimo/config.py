"""Experiment configuration: strict flat ``key = value`` files with dotted sections.

Example::

    frequency = 30e9
    lambda_relative = true
    tx.n_h = 9
    rx.center = 0, 0, 1
    sweep.axis = spacing
    sweep.values = 0.5, 0.2, 0.1

Blank lines and ``#`` comments are ignored. Unknown keys, duplicate keys
and malformed values raise :class:`~nfhmimo.errors.ConfigError`. With
``lambda_relative`` all lengths (centers, element edges, spacing and
distance sweep values) are in wavelengths and resolved to meters here.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import Model
from .errors import ConfigError, DegenerateAzimuths
from .geometry import SurfacePlacement
from .green import WaveParams

SWEEP_AXES = ("none", "spacing", "distance", "tx_elems", "snr")

_SURFACE_KEYS = ("center", "polar_h", "polar_v", "azimuth_h", "azimuth_v",
                 "n_h", "n_v", "len_h", "len_v")

# defaults: TX in the xy-plane, RX one wavelength above, tilted by rx.polar_v
DEFAULTS = {
    "frequency": "30e9",
    "round_wavelength": "true",
    "lambda_relative": "true",
    "eta": "376.73",
    "models": "Exact, CDCM, CICM",
    "quad_order": "12",
    "seed": "0",
    "workers": "1",
    "tx.center": "0, 0, 0",
    "tx.polar_h": "90", "tx.polar_v": "90",
    "tx.azimuth_h": "0", "tx.azimuth_v": "90",
    "tx.n_h": "9", "tx.n_v": "9",
    "tx.len_h": "0.05", "tx.len_v": "0.05",
    "rx.center": "0, 0, 1",
    "rx.polar_h": "90", "rx.polar_v": "90",
    "rx.azimuth_h": "0", "rx.azimuth_v": "90",
    "rx.n_h": "3", "rx.n_v": "3",
    "rx.len_h": "0.05", "rx.len_v": "0.05",
    "sweep.axis": "none",
    "sweep.values": "",
    "sweep.rx_polar_v": "",
    "snr.db": "20",
    "snr.power_fraction": "0.8",
    "snr.squared_energy": "true",
    "noise.variance": "0",
    "output.dir": "out",
}


def _bool(key, text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _float(key, text):
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not np.isfinite(val):
        raise ConfigError(f"{key}: value must be finite, got {text!r}")
    return val


def _int(key, text):
    val = _float(key, text)
    if val != int(val):
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(val)


def _floats(key, text):
    parts = [p for p in (s.strip() for s in text.split(",")) if p]
    return [_float(key, p) for p in parts]


def parse_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Split config text into a raw key -> value mapping."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment, lengths in meters."""

    wave: WaveParams
    tx: SurfacePlacement
    rx: SurfacePlacement
    models: tuple[Model, ...]
    quad_order: int
    sweep_axis: str
    sweep_values: tuple[float, ...]
    rx_polar_v: tuple[float, ...]
    snr_db: float
    power_fraction: float
    squared_energy: bool
    noise_variance: float
    output_dir: Path
    seed: int
    workers: int
    lambda_relative: bool
    round_wavelength: bool
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def wavelength(self) -> float:
        return self.wave.wavelength

    def sweep_si(self, value: float) -> float:
        """Sweep value in SI units (meters for lengths)."""
        if self.sweep_axis in ("spacing", "distance") and self.lambda_relative:
            return value * self.wavelength
        return value

    def echo(self) -> dict:
        """All resolved fields as JSON-friendly values."""
        def surf(p):
            return {k: (list(getattr(p, k)) if k == "center" else getattr(p, k))
                    for k in _SURFACE_KEYS}
        return {
            "frequency_hz": self.wave.frequency,
            "wavelength_m": self.wave.wavelength,
            "eta_ohm": self.wave.eta,
            "round_wavelength": self.round_wavelength,
            "lambda_relative": self.lambda_relative,
            "tx": surf(self.tx),
            "rx": surf(self.rx),
            "models": [m.value for m in self.models],
            "quad_order": self.quad_order,
            "sweep_axis": self.sweep_axis,
            "sweep_values": list(self.sweep_values),
            "sweep_values_si": [self.sweep_si(v) for v in self.sweep_values],
            "rx_polar_v": list(self.rx_polar_v),
            "snr_db": self.snr_db,
            "power_fraction": self.power_fraction,
            "squared_energy": self.squared_energy,
            "noise_variance": self.noise_variance,
            "output_dir": str(self.output_dir),
            "seed": self.seed,
            "workers": self.workers,
            "raw": dict(sorted(self.raw.items())),
        }

    def canonical(self) -> str:
        echo = self.echo()
        echo.pop("output_dir")
        echo.pop("workers")
        echo.pop("raw")
        return json.dumps(echo, sort_keys=True)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _surface(prefix, values, scale):
    try:
        center = _floats(f"{prefix}.center", values[f"{prefix}.center"])
        if len(center) != 3:
            raise ConfigError(f"{prefix}.center: expected three numbers")
        return SurfacePlacement(
            center=tuple(c * scale for c in center),
            polar_h=_float(f"{prefix}.polar_h", values[f"{prefix}.polar_h"]),
            polar_v=_float(f"{prefix}.polar_v", values[f"{prefix}.polar_v"]),
            azimuth_h=_float(f"{prefix}.azimuth_h", values[f"{prefix}.azimuth_h"]),
            azimuth_v=_float(f"{prefix}.azimuth_v", values[f"{prefix}.azimuth_v"]),
            n_h=_int(f"{prefix}.n_h", values[f"{prefix}.n_h"]),
            n_v=_int(f"{prefix}.n_v", values[f"{prefix}.n_v"]),
            len_h=_float(f"{prefix}.len_h", values[f"{prefix}.len_h"]) * scale,
            len_v=_float(f"{prefix}.len_v", values[f"{prefix}.len_v"]) * scale,
        )
    except (ValueError, DegenerateAzimuths) as err:
        raise ConfigError(f"{prefix}: {err}") from None


def resolve(raw: dict[str, str]) -> ExperimentConfig:
    values = {**DEFAULTS, **raw}
    freq = _float("frequency", values["frequency"])
    if freq <= 0:
        raise ConfigError("frequency must be positive")
    round_wavelength = _bool("round_wavelength", values["round_wavelength"])
    lam_rel = _bool("lambda_relative", values["lambda_relative"])
    eta = _float("eta", values["eta"])
    if eta <= 0:
        raise ConfigError("eta must be positive")
    wave = WaveParams.from_frequency(freq, round_wavelength=round_wavelength, eta=eta)
    scale = wave.wavelength if lam_rel else 1.0

    try:
        models = tuple(Model.parse(m) for m in values["models"].split(",") if m.strip())
    except ValueError as err:
        raise ConfigError(f"models: {err}") from None
    if not models:
        raise ConfigError("models: at least one model required")
    if len(set(models)) != len(models):
        raise ConfigError("models: duplicate entries")

    quad = _int("quad_order", values["quad_order"])
    if quad < 2:
        raise ConfigError("quad_order must be >= 2")
    seed = _int("seed", values["seed"])
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    workers = _int("workers", values["workers"])
    if workers < 1:
        raise ConfigError("workers must be >= 1")

    axis = values["sweep.axis"].strip()
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis: expected one of {SWEEP_AXES}, got {axis!r}")
    grid = tuple(_floats("sweep.values", values["sweep.values"]))
    if axis != "none":
        if not grid:
            raise ConfigError("sweep.values: grid must be nonempty")
        diffs = np.diff(grid)
        if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ConfigError("sweep.values: grid must be strictly monotone")
        if axis in ("spacing", "distance", "tx_elems") and min(grid) <= 0:
            raise ConfigError(f"sweep.values: {axis} values must be positive")
        if axis == "tx_elems" and any(v != int(v) for v in grid):
            raise ConfigError("sweep.values: tx_elems values must be integers")
    elif grid:
        raise ConfigError("sweep.values given but sweep.axis is none")

    tx = _surface("tx", values, scale)
    rx = _surface("rx", values, scale)
    rx_polar = tuple(_floats("sweep.rx_polar_v", values["sweep.rx_polar_v"]))
    for val in rx_polar:
        if not 0 <= val <= 180:
            raise ConfigError(f"sweep.rx_polar_v: {val} outside [0, 180]")

    frac = _float("snr.power_fraction", values["snr.power_fraction"])
    if not 0 < frac <= 1:
        raise ConfigError("snr.power_fraction must lie in (0, 1]")
    noise_var = _float("noise.variance", values["noise.variance"])
    if noise_var < 0:
        raise ConfigError("noise.variance must be non-negative")

    return ExperimentConfig(
        wave=wave, tx=tx, rx=rx, models=models, quad_order=quad,
        sweep_axis=axis, sweep_values=grid, rx_polar_v=rx_polar,
        snr_db=_float("snr.db", values["snr.db"]),
        power_fraction=frac,
        squared_energy=_bool("snr.squared_energy", values["snr.squared_energy"]),
        noise_variance=noise_var,
        output_dir=Path(values["output.dir"]),
        seed=seed, workers=workers,
        lambda_relative=lam_rel, round_wavelength=round_wavelength,
        raw=dict(raw),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    return resolve(parse_text(text, str(path)))
