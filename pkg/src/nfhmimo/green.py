"""Free-space dyadic Green's function and related closed forms.

All functions accept separations with a trailing axis of length 3 and
broadcast over leading axes; tensors come back with two trailing axes
``(..., 3, 3)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints

SPEED_OF_LIGHT = 299_792_458.0
ETA0 = 376.73
MIN_SEPARATION = 1e-9


@dataclass(frozen=True)
class WaveParams:
    """Frequency-domain constants of a free-space wave.

    ``wavelength`` normally equals ``c / frequency``; :meth:`from_frequency`
    with ``round_wavelength=True`` pins it to a rounded value instead, and
    then only ``k0 * wavelength == 2*pi`` is guaranteed.
    """

    frequency: float
    wavelength: float
    eta: float = ETA0

    def __post_init__(self):
        if not (self.frequency > 0 and self.wavelength > 0 and self.eta > 0):
            raise ValueError(f"non-positive wave parameter in {self}")

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @classmethod
    def from_frequency(cls, frequency: float, round_wavelength: bool = False,
                       eta: float = ETA0) -> "WaveParams":
        lam = SPEED_OF_LIGHT / frequency
        if round_wavelength:
            # keep two significant digits: 30 GHz -> 0.01 m
            lam = float(f"{lam:.1e}")
        return cls(frequency, lam, eta)

    @classmethod
    def from_wavelength(cls, wavelength: float, eta: float = ETA0) -> "WaveParams":
        return cls(SPEED_OF_LIGHT / wavelength, wavelength, eta)


def _separation(d_vec):
    d_vec = np.asarray(d_vec, dtype=float)
    if d_vec.shape[-1:] != (3,):
        raise ValueError(f"separation must have a trailing axis of length 3, got {d_vec.shape}")
    d = np.sqrt(np.sum(d_vec * d_vec, axis=-1))
    if np.any(d < MIN_SEPARATION):
        raise CoincidentPoints(f"separation below {MIN_SEPARATION} m")
    return d_vec, d


def green_coefficients(d, k0):
    """Scalar coefficients ``(a, b)`` with ``G = a*I + b*outer(d_hat, d_hat)``.

    ``d`` is the distance array; no phase is removed.
    """
    x = k0 * d
    inv = 1.0 / x
    pref = -1j * np.exp(1j * x) / (4.0 * np.pi * d)
    a = pref * (1.0 + 1j * inv - inv * inv)
    b = pref * (3.0 * inv * inv - 3j * inv - 1.0)
    return a, b


def _assemble(d_vec, d, a, b):
    dhat = d_vec / d[..., None]
    proj = dhat[..., :, None] * dhat[..., None, :]
    return a[..., None, None] * np.eye(3) + b[..., None, None] * proj


def green_tensor(r, t, w: WaveParams) -> np.ndarray:
    """Dyadic Green's function between observation ``r`` and source ``t``."""
    d_vec, d = _separation(np.asarray(r, dtype=float) - np.asarray(t, dtype=float))
    a, b = green_coefficients(d, w.k0)
    return _assemble(d_vec, d, a, b)


def amplitude_tensor(d_vec, w: WaveParams) -> np.ndarray:
    """Green tensor at separation ``d_vec`` with the phase ``exp(i k0 d)`` removed."""
    d_vec, d = _separation(d_vec)
    a, b = green_coefficients(d, w.k0)
    phase = np.exp(-1j * w.k0 * d)
    return _assemble(d_vec, d, a * phase, b * phase)


def frobenius_coefficients(d_vec, w: WaveParams):
    """The ``(eps1, eps2, eps3)`` coefficients of the squared Frobenius norm.

    Written with the general projector trace so the reduction
    ``trace(d d^T / d^2) == 1`` stays visible.
    """
    d_vec, d = _separation(d_vec)
    tr = np.sum(d_vec * d_vec, axis=-1) / (d * d)
    c = 16.0 * np.pi ** 2
    k0 = w.k0
    eps1 = (3.0 - tr) / c
    eps2 = (5.0 * tr - 3.0) / (c * k0 ** 2)
    eps3 = (3.0 * tr + 3.0) / (c * k0 ** 4)
    return eps1, eps2, eps3


def green_frobenius_sq_closed_form(d_vec, w: WaveParams):
    """``trace(G^H G)`` as ``eps1/d^2 + eps2/d^4 + eps3/d^6``."""
    d_vec, d = _separation(d_vec)
    eps1, eps2, eps3 = frobenius_coefficients(d_vec, w)
    d2 = d * d
    return eps1 / d2 + eps2 / (d2 * d2) + eps3 / (d2 * d2 * d2)
