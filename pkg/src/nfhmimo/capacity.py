"""Mode gains, exact capacity and closed-form capacity bounds.

The exact capacity follows from an SVD of the Green matrix ``G`` (Green
tensors between element centers, ``H = eta/(2*lambda) * s_R * s_T * G``):
receive and transmit patterns are the leading singular vectors scaled by
``1/sqrt(s_R)`` and ``1/sqrt(s_T)``, and the mode gains are
``sqrt(s_R * s_T) * sigma_p``. Power is split equally over the ``P`` modes.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import BlockChannelMatrix, center_separations, green_matrix
from .errors import RankZero
from .geometry import SurfacePlacement
from .green import WaveParams, green_frobenius_sq_closed_form

FAR_FIELD_EPS1 = 1.0 / (8.0 * math.pi ** 2)


@dataclass(frozen=True)
class SnrParams:
    """Average transmit SNR per unit area, ``P_t / (P * s_R * sigma_w^2)`` (linear)."""

    snr: float
    total_power: float | None = None
    noise_variance: float | None = None

    def __post_init__(self):
        if not (self.snr >= 0 and math.isfinite(self.snr)):
            raise ValueError(f"SNR must be finite and non-negative, got {self.snr}")

    @classmethod
    def from_db(cls, snr_db: float) -> "SnrParams":
        return cls(10.0 ** (snr_db / 10.0))

    @classmethod
    def from_powers(cls, total_power: float, noise_variance: float,
                    stream_count: int, s_R: float) -> "SnrParams":
        if noise_variance <= 0 or stream_count < 1 or s_R <= 0:
            raise ValueError("noise variance, stream count and s_R must be positive")
        return cls(total_power / (stream_count * s_R * noise_variance),
                   total_power, noise_variance)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.snr) if self.snr > 0 else -math.inf


def mu(w: WaveParams) -> float:
    """``eta^2 / (4 lambda^2)``."""
    return w.eta ** 2 / (4.0 * w.wavelength ** 2)


@dataclass
class PatternBasis:
    """Leading SVD modes of a Green matrix expressed as surface patterns.

    ``T`` is ``(3N, P)`` with ``T^H T = I / s_T``; ``R`` is ``(3M, P)`` with
    ``R^H R = I / s_R``; ``gammas`` holds the ``P`` selected mode gains in
    descending order and ``singular_values`` the full spectrum of ``G``.
    """

    P: int
    gammas: np.ndarray
    T: np.ndarray
    R: np.ndarray
    singular_values: np.ndarray
    s_T: float
    s_R: float


def select_mode_count(singular_values, power_fraction: float = 0.8,
                      squared: bool = True) -> int:
    """Smallest ``P`` whose leading values carry ``power_fraction`` of the total.

    With ``squared`` (the default) the energy ``sigma^2`` is accumulated;
    otherwise the singular values themselves.
    """
    if not 0.0 < power_fraction <= 1.0:
        raise ValueError(f"power_fraction must lie in (0, 1], got {power_fraction}")
    s = np.sort(np.asarray(singular_values, dtype=float))[::-1]
    e = s * s if squared else s
    total = e.sum()
    if not total > 0:
        raise RankZero("all singular values are zero")
    frac = np.cumsum(e) / total
    # relative slack so that exact ties like 0.8 == 4/5 are accepted
    return int(np.searchsorted(frac, power_fraction * (1.0 - 1e-12)) + 1)


def svd_patterns(G, s_T: float, s_R: float, power_fraction: float = 0.8,
                 squared: bool = True, P: int | None = None) -> PatternBasis:
    """Patterns and gains of the leading modes of ``G``.

    ``P`` overrides the power-fraction rule when given.
    """
    g = G.data if isinstance(G, BlockChannelMatrix) else np.asarray(G, dtype=complex)
    if not np.all(np.isfinite(g)):
        raise ValueError("Green matrix has non-finite entries")
    U, sv, Vh = np.linalg.svd(g, full_matrices=False)
    if P is None:
        P = select_mode_count(sv, power_fraction, squared)
    elif not 1 <= P <= sv.size:
        raise ValueError(f"P={P} outside 1..{sv.size}")
    elif not sv[0] > 0:
        raise RankZero("all singular values are zero")
    R = U[:, :P] / math.sqrt(s_R)
    T = Vh[:P].conj().T / math.sqrt(s_T)
    gammas = math.sqrt(s_R * s_T) * sv[:P]
    return PatternBasis(P, gammas, T, R, sv, s_T, s_R)


def exact_capacity(basis: PatternBasis, snr: SnrParams, w: WaveParams) -> float:
    """``sum_p log2(1 + mu * SNR * gamma_p^2)`` in bits/s/Hz."""
    g2 = np.asarray(basis.gammas, dtype=float) ** 2
    return float(np.sum(np.log1p(mu(w) * snr.snr * g2)) / math.log(2.0))


def _bound(P: int, snr: SnrParams, w: WaveParams, coupling: float) -> float:
    if P < 1:
        raise ValueError(f"stream count must be positive, got {P}")
    # log1p keeps the far-distance bounds accurate when the argument is tiny
    return P * math.log1p(mu(w) * snr.snr / P * coupling) / math.log(2.0)


def green_energy(tx: SurfacePlacement, rx: SurfacePlacement, w: WaveParams) -> float:
    """``sum_mn trace(G_mn^H G_mn)`` from the closed form, pairwise-summed."""
    terms = green_frobenius_sq_closed_form(center_separations(tx, rx), w)
    return float(np.sum(np.ascontiguousarray(terms).reshape(-1)))


def capacity_upper_bound(tx: SurfacePlacement, rx: SurfacePlacement, snr: SnrParams,
                         w: WaveParams, P: int) -> float:
    """Near-field capacity bound from the closed-form Green energy of all pairs."""
    coupling = rx.element_area * tx.element_area * green_energy(tx, rx, w)
    return _bound(P, snr, w, coupling)


def far_field_upper_bound(A_T: float, A_R: float, d0: float, snr: SnrParams,
                          w: WaveParams, P: int) -> float:
    """Bound with only the ``1/d^2`` term and a common distance ``d0``."""
    if not d0 > 0:
        raise ValueError(f"d0 must be positive, got {d0}")
    return _bound(P, snr, w, FAR_FIELD_EPS1 * A_R * A_T / d0 ** 2)


@dataclass
class CapacityReport:
    exact_bits: float
    upper_bound_bits: float
    far_field_bound_bits: float
    P: int
    snr: SnrParams
    gammas: np.ndarray = field(repr=False, default=None)

    def csv_row(self, config_hash: str) -> list:
        return [config_hash, self.P, self.snr.snr_db, self.exact_bits,
                self.upper_bound_bits, self.far_field_bound_bits]

    CSV_HEADER = ("config_hash", "P", "snr_db", "exact_bits", "bound_bits", "ff_bound_bits")


def capacity_report(tx: SurfacePlacement, rx: SurfacePlacement, snr: SnrParams,
                    w: WaveParams, power_fraction: float = 0.8, squared: bool = True,
                    P: int | None = None) -> CapacityReport:
    """Exact capacity and both bounds with a shared stream count.

    ``P`` defaults to the mode count selected on the Green matrix; the
    far-field distance is the surface center-to-center distance.
    """
    G = green_matrix(tx, rx, w)
    basis = svd_patterns(G, tx.element_area, rx.element_area, power_fraction, squared, P)
    d0 = float(np.linalg.norm(np.subtract(rx.center, tx.center)))
    return CapacityReport(
        exact_bits=exact_capacity(basis, snr, w),
        upper_bound_bits=capacity_upper_bound(tx, rx, snr, w, basis.P),
        far_field_bound_bits=far_field_upper_bound(tx.total_area, rx.total_area, d0,
                                                   snr, w, basis.P),
        P=basis.P, snr=snr, gammas=basis.gammas)


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
