"""Fidelity metrics between channel matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import BlockChannelMatrix
from .errors import DimensionMismatch, ZeroReference

# Recorded in spectrum outputs: "eigenvalues" of the non-square channel are
# reported as singular values of H (not eigenvalues of H^H H).
SPECTRUM_KIND = "singular_values_of_H"


def _data(H):
    return H.data if isinstance(H, BlockChannelMatrix) else np.asarray(H)


def nmse(H_hat, H) -> float:
    """``||H_hat - H||_F^2 / ||H||_F^2`` with ``H`` the reference."""
    a, b = _data(H_hat), _data(H)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    ref = np.linalg.norm(b)
    if ref == 0:
        raise ZeroReference("reference matrix has zero Frobenius norm")
    return float(np.linalg.norm(a - b) ** 2 / ref ** 2)


@dataclass
class SpectrumReport:
    label: str
    values: np.ndarray
    shape: tuple[int, int]

    def top(self, k: int) -> np.ndarray:
        return self.values[:k]


def singular_spectrum(H, label: str | None = None) -> SpectrumReport:
    """Singular values of the full matrix, descending."""
    data = _data(H)
    if label is None:
        label = getattr(H, "label", "")
    sv = np.linalg.svd(data, compute_uv=False)
    return SpectrumReport(label, np.sort(sv)[::-1], data.shape)
