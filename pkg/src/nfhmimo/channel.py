"""Near-field line-of-sight channel matrices between two surfaces.

Three per-pair models are available:

* ``Exact``: 4-D Gauss-Legendre quadrature of the Green tensor over both
  elements (reference oracle).
* ``CDCM``: coordinate-dependent closed form; the Green tensor at the
  element centers times a product of four sinc factors.
* ``CICM``: coordinate-independent closed form; the Green tensor at the
  element centers times both element areas.

Every model carries the ``eta / (2 * wavelength)`` prefactor.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry
from .errors import (BlockError, CoincidentPoints, DimensionMismatch,
                     QuadratureDiverged)
from .geometry import SurfacePlacement
from .green import MIN_SEPARATION, WaveParams, green_coefficients, green_tensor

DEFAULT_QUAD_ORDER = 12
# bound on (rx nodes) x (tx nodes) pairs evaluated at once by the exact oracle
_CHUNK_PAIRS = 1 << 21


class Model(str, enum.Enum):
    EXACT = "Exact"
    CDCM = "CDCM"
    CICM = "CICM"

    @classmethod
    def parse(cls, name) -> "Model":
        if isinstance(name, cls):
            return name
        key = str(name).strip().replace("-", "").upper()
        for m in cls:
            if m.value.upper() == key:
                return m
        raise ValueError(f"unknown channel model {name!r}; expected one of "
                         f"{[m.value for m in cls]}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product Gauss-Legendre rule, ``order`` points per intrinsic axis."""

    order: int = DEFAULT_QUAD_ORDER
    convergence_rtol: float = 1e-4

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise ValueError(f"quadrature order must be an integer >= 2, got {self.order}")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.order, self.convergence_rtol)


@dataclass
class BlockChannelMatrix:
    """A ``(3M, 3N)`` complex matrix of 3x3 blocks; block ``(m, n)`` is zero-based."""

    data: np.ndarray
    m_elems: int
    n_elems: int
    label: str = ""

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (3 * self.m_elems, 3 * self.n_elems):
            raise DimensionMismatch(
                f"data shape {self.data.shape} does not match M={self.m_elems}, N={self.n_elems}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("channel matrix has non-finite entries")

    @classmethod
    def from_blocks(cls, blocks: np.ndarray, label: str = "") -> "BlockChannelMatrix":
        """Build from an ``(M, N, 3, 3)`` block array."""
        m, n = blocks.shape[:2]
        data = np.ascontiguousarray(blocks.transpose(0, 2, 1, 3)).reshape(3 * m, 3 * n)
        return cls(data, m, n, label)

    @property
    def shape(self):
        return self.data.shape

    def block(self, m: int, n: int) -> np.ndarray:
        return self.data[3 * m:3 * m + 3, 3 * n:3 * n + 3]

    def blocks(self) -> np.ndarray:
        """Block view as an ``(M, N, 3, 3)`` array."""
        return self.data.reshape(self.m_elems, 3, self.n_elems, 3).transpose(0, 2, 1, 3)


def _prefactor(w: WaveParams) -> float:
    return w.eta / (2.0 * w.wavelength)


@lru_cache(maxsize=32)
def _gauss_legendre(order: int):
    x, wt = np.polynomial.legendre.leggauss(order)
    return x, wt


def element_rule(p: SurfacePlacement, order: int):
    """Quadrature offsets ``(Q*Q, 3)`` from an element center and their weights.

    Weights integrate ``da db`` over ``[-len_h/2, len_h/2] x [-len_v/2, len_v/2]``.
    """
    x, wt = _gauss_legendre(order)
    a = 0.5 * p.len_h * x
    b = 0.5 * p.len_v * x
    wa = 0.5 * p.len_h * wt
    wb = 0.5 * p.len_v * wt
    aa, bb = np.meshgrid(a, b, indexing="ij")
    offsets = aa.reshape(-1, 1) * p.h + bb.reshape(-1, 1) * p.v
    weights = np.outer(wa, wb).reshape(-1)
    return offsets, weights


def _exact_row(tx: SurfacePlacement, rx: SurfacePlacement, m: int,
               w: WaveParams, order: int, tx_index=None) -> np.ndarray:
    """Exact blocks ``(len(tx_index), 3, 3)`` for receive element ``m``."""
    t_off, t_w = element_rule(tx, order)
    r_off, r_w = element_rule(rx, order)
    t_centers = tx.centers if tx_index is None else tx.centers[np.atleast_1d(tx_index)]
    t_pts = t_centers[:, None, :] + t_off[None, :, :]              # (N, Qt, 3)
    r_pts = rx.centers[m] + r_off                                  # (Qr, 3)
    n_tx = t_pts.shape[0]
    per_node = n_tx * t_pts.shape[1]
    chunk = max(1, _CHUNK_PAIRS // per_node)

    s_iso = np.zeros(n_tx, dtype=complex)
    s_proj = np.zeros((n_tx, 3, 3), dtype=complex)
    for start in range(0, r_pts.shape[0], chunk):
        rp = r_pts[start:start + chunk]
        rw = r_w[start:start + chunk]
        d_vec = rp[:, None, None, :] - t_pts[None, :, :, :]       # (c, N, Qt, 3)
        d = np.sqrt(np.einsum("...i,...i->...", d_vec, d_vec))
        if np.any(d < MIN_SEPARATION):
            bad = np.argwhere(d < MIN_SEPARATION)[0][1]
            n_bad = bad if tx_index is None else int(np.atleast_1d(tx_index)[bad])
            raise BlockError(m, int(n_bad), CoincidentPoints(
                "quadrature nodes of the two elements coincide"))
        a, b = green_coefficients(d, w.k0)
        wgt = rw[:, None, None] * t_w[None, None, :]
        s_iso += np.einsum("cnt,cnt->n", a, wgt)
        bw = b * wgt / (d * d)
        s_proj += np.einsum("cnt,cnti,cntj->nij", bw, d_vec, d_vec, optimize=True)
    return _prefactor(w) * (s_iso[:, None, None] * np.eye(3) + s_proj)


def exact_channel_block(tx: SurfacePlacement, n: int, rx: SurfacePlacement, m: int,
                        w: WaveParams, q: QuadratureSpec | None = None,
                        check_convergence: bool = False) -> np.ndarray:
    """Surface-integrated Green tensor for one element pair.

    With ``check_convergence`` the block is recomputed at twice the order and
    :class:`QuadratureDiverged` is raised if the two differ by more than
    ``q.convergence_rtol`` (relative Frobenius norm).
    """
    q = q or QuadratureSpec()
    try:
        blk = _exact_row(tx, rx, m, w, q.order, tx_index=[n])[0]
    except BlockError as err:
        raise err.cause from None
    if check_convergence:
        fine = _exact_row(tx, rx, m, w, 2 * q.order, tx_index=[n])[0]
        rel = np.linalg.norm(fine - blk) / np.linalg.norm(fine)
        if rel > q.convergence_rtol:
            raise QuadratureDiverged(
                f"order {q.order} -> {2 * q.order} changed block (m={m}, n={n}) by {rel:.3e}")
    return blk


def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def varrho(tx: SurfacePlacement, rx: SurfacePlacement, dbar, w: WaveParams):
    """Four-sinc correction factor between element centers separated by ``dbar``.

    ``dbar`` is receive center minus transmit center and may carry leading
    axes. Each surface contributes one sinc per in-plane axis, with the z
    offset folded into the x and y phase slopes.
    """
    dbar = np.asarray(dbar, dtype=float)
    d = np.sqrt(np.sum(dbar * dbar, axis=-1))
    if np.any(d < MIN_SEPARATION):
        raise CoincidentPoints("element centers coincide")
    x, y, z = dbar[..., 0], dbar[..., 1], dbar[..., 2]
    scale = np.pi / w.wavelength
    out = np.ones_like(d)
    for p in (tx, rx):
        c_x, c_y = geometry.delta_z_coefficients(p)
        out = out * _sinc(scale * p.len_h * (x + z * c_x) / d)
        out = out * _sinc(scale * p.len_v * (y + z * c_y) / d)
    return out


def cicm_block(tx: SurfacePlacement, n: int, rx: SurfacePlacement, m: int,
               w: WaveParams) -> np.ndarray:
    g = green_tensor(rx.centers[m], tx.centers[n], w)
    return _prefactor(w) * rx.element_area * tx.element_area * g


def cdcm_block(tx: SurfacePlacement, n: int, rx: SurfacePlacement, m: int,
               w: WaveParams) -> np.ndarray:
    rho = varrho(tx, rx, rx.centers[m] - tx.centers[n], w)
    return cicm_block(tx, n, rx, m, w) * rho


def center_separations(tx: SurfacePlacement, rx: SurfacePlacement) -> np.ndarray:
    """``(M, N, 3)`` array of receive-minus-transmit center vectors."""
    return rx.centers[:, None, :] - tx.centers[None, :, :]


def green_matrix(tx: SurfacePlacement, rx: SurfacePlacement, w: WaveParams) -> BlockChannelMatrix:
    """Green tensors between all element centers, without the channel prefactor."""
    dbar = center_separations(tx, rx)
    _check_centers(dbar)
    return BlockChannelMatrix.from_blocks(green_tensor(dbar, np.zeros(3), w), label="G")


def _check_centers(dbar):
    d = np.linalg.norm(dbar, axis=-1)
    if np.any(d < MIN_SEPARATION):
        m, n = np.argwhere(d < MIN_SEPARATION)[0]
        raise BlockError(int(m), int(n), CoincidentPoints("element centers coincide"))


def assemble_channel(model, tx: SurfacePlacement, rx: SurfacePlacement, w: WaveParams,
                     q: QuadratureSpec | None = None, workers: int = 1) -> BlockChannelMatrix:
    """Full ``(3M, 3N)`` channel matrix for the chosen model.

    Exact rows are independent and may be computed on ``workers`` threads;
    each row is written to its own slot, so the result does not depend on
    the worker count.
    """
    model = Model.parse(model)
    q = q or QuadratureSpec()
    if model is Model.EXACT:
        rows = range(rx.n_elements)
        compute = lambda m: _exact_row(tx, rx, m, w, q.order)  # noqa: E731
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                blocks = list(pool.map(compute, rows))
        else:
            blocks = [compute(m) for m in rows]
        return BlockChannelMatrix.from_blocks(np.stack(blocks), label=model.value)

    dbar = center_separations(tx, rx)
    _check_centers(dbar)
    g = green_tensor(dbar, np.zeros(3), w)
    blocks = _prefactor(w) * rx.element_area * tx.element_area * g
    if model is Model.CDCM:
        blocks = blocks * varrho(tx, rx, dbar, w)[..., None, None]
    return BlockChannelMatrix.from_blocks(blocks, label=model.value)


def simulate_transmission(H: BlockChannelMatrix, j, noise, s_R: float) -> np.ndarray:
    """Received field samples ``e = H j + s_R * noise``."""
    j = np.asarray(j, dtype=complex)
    noise = np.asarray(noise, dtype=complex)
    rows, cols = H.shape
    if j.shape != (cols,):
        raise DimensionMismatch(f"current vector has shape {j.shape}, expected ({cols},)")
    if noise.shape != (rows,):
        raise DimensionMismatch(f"noise vector has shape {noise.shape}, expected ({rows},)")
    return H.data @ j + s_R * noise
