from pathlib import Path

import numpy as np
import pytest

from nfhmimo import SurfacePlacement, WaveParams

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def wave():
    """30 GHz with the wavelength rounded to 0.01 m."""
    return WaveParams.from_frequency(30e9, round_wavelength=True)


def standard_pair(lam, spacing, distance, rx_polar_v=90.0, n=9, m=3):
    """TX in the xy-plane at the origin, RX above it tilted about the x-axis.

    ``spacing`` and ``distance`` are in wavelengths.
    """
    tx = SurfacePlacement((0, 0, 0), 90, 90, 0, 90, n, n, spacing * lam, spacing * lam)
    rx = SurfacePlacement((0, 0, distance * lam), 90, rx_polar_v, 0, 90, m, m,
                          spacing * lam, spacing * lam)
    return tx, rx


@pytest.fixture(scope="session")
def pair_factory(wave):
    def make(spacing, distance, rx_polar_v=90.0, n=9, m=3):
        return standard_pair(wave.wavelength, spacing, distance, rx_polar_v, n, m)
    return make


def random_placement(rng, center=(0.0, 0.0, 0.0), n=(1, 1), lengths=(1e-3, 1e-3)):
    """Placement with random orientation that keeps the surface non-vertical."""
    while True:
        ph = rng.uniform(5, 175, size=2)
        az = rng.uniform(0, 360, size=2)
        s = abs(np.sin(np.radians(az[0] - az[1])))
        if s > 0.2:
            return SurfacePlacement(center, ph[0], ph[1], az[0], az[1], n[0], n[1],
                                    lengths[0], lengths[1])


def scalar_green(r, k):
    d = np.linalg.norm(r)
    return np.exp(1j * k * d) / (4 * np.pi * d)


def fd_operator_green(r, k, h):
    """-i (I + grad grad^T / k^2) applied to exp(ikd)/(4 pi d) by 4th-order differences."""
    r = np.asarray(r, dtype=float)
    e = np.eye(3) * h
    f0 = scalar_green(r, k)
    hess = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        fp1, fm1 = scalar_green(r + e[i], k), scalar_green(r - e[i], k)
        fp2, fm2 = scalar_green(r + 2 * e[i], k), scalar_green(r - 2 * e[i], k)
        hess[i, i] = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
        for j in range(i + 1, 3):
            # product of two 4th-order first-derivative stencils
            c = {1: 8, 2: -1, -1: -8, -2: 1}
            acc = 0j
            for si, wi in c.items():
                for sj, wj in c.items():
                    acc += wi * wj * scalar_green(r + si * e[i] + sj * e[j], k)
            hess[i, j] = hess[j, i] = acc / (144 * h * h)
    return -1j * (f0 * np.eye(3) + hess / k ** 2)
