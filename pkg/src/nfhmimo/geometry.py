"""Placement of planar antenna surfaces in Cartesian coordinates.

A surface is spanned by a horizontal and a vertical unit vector, each given
by a polar angle (from +z) and an azimuth angle (from +x in the xy-plane).
Elements are parallelograms of edge lengths ``len_h`` x ``len_v`` laid out
on a centered grid; element ``n = j * n_h + i`` (zero-based) sits at grid
column ``i`` along ``h`` and row ``j`` along ``v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateAzimuths, OutOfElement

ANGLE_TOL_DEG = 1e-9
_DEGENERATE_TOL = 1e-12


def vec3(x, y, z) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def _unit(polar_deg: float, azimuth_deg: float) -> np.ndarray:
    th = math.radians(polar_deg)
    ph = math.radians(azimuth_deg)
    return np.array([math.sin(th) * math.cos(ph),
                     math.sin(th) * math.sin(ph),
                     math.cos(th)])


def _cot(angle_rad: float) -> float:
    # cos/sin keeps cot(90 deg) at ~6e-17 instead of going through tan
    return math.cos(angle_rad) / math.sin(angle_rad)


@dataclass(frozen=True)
class SurfacePlacement:
    """One antenna surface: center, orientation and element grid.

    Angles are in degrees, lengths in meters.
    """

    center: tuple[float, float, float]
    polar_h: float
    polar_v: float
    azimuth_h: float
    azimuth_v: float
    n_h: int
    n_v: int
    len_h: float
    len_v: float

    def __post_init__(self):
        c = tuple(float(x) for x in self.center)
        if len(c) != 3 or not all(math.isfinite(x) for x in c):
            raise ValueError(f"center must be three finite numbers, got {self.center!r}")
        object.__setattr__(self, "center", c)
        for name in ("polar_h", "polar_v"):
            val = getattr(self, name)
            if not 0.0 <= val <= 180.0:
                raise ValueError(f"{name}={val} outside [0, 180] degrees")
        for name in ("azimuth_h", "azimuth_v"):
            val = getattr(self, name)
            if not 0.0 <= val < 360.0:
                raise ValueError(f"{name}={val} outside [0, 360) degrees")
        if int(self.n_h) != self.n_h or int(self.n_v) != self.n_v or self.n_h < 1 or self.n_v < 1:
            raise ValueError(f"element counts must be positive integers, got {self.n_h}x{self.n_v}")
        object.__setattr__(self, "n_h", int(self.n_h))
        object.__setattr__(self, "n_v", int(self.n_v))
        if not (self.len_h > 0 and self.len_v > 0):
            raise ValueError(f"element lengths must be positive, got {self.len_h}, {self.len_v}")
        if abs(math.sin(math.radians(self.azimuth_h - self.azimuth_v))) < _DEGENERATE_TOL:
            raise DegenerateAzimuths(
                f"azimuth_h={self.azimuth_h} and azimuth_v={self.azimuth_v} differ by a multiple of 180 degrees")

    @property
    def n_elements(self) -> int:
        return self.n_h * self.n_v

    @property
    def element_area(self) -> float:
        """Nominal element area ``len_h * len_v`` (s_T or s_R)."""
        return self.len_h * self.len_v

    @property
    def total_area(self) -> float:
        return self.n_elements * self.element_area

    @cached_property
    def h(self) -> np.ndarray:
        return _unit(self.polar_h, self.azimuth_h)

    @cached_property
    def v(self) -> np.ndarray:
        return _unit(self.polar_v, self.azimuth_v)

    @cached_property
    def centers(self) -> np.ndarray:
        """Element centers, shape ``(n_h * n_v, 3)``."""
        i = np.arange(self.n_h) - (self.n_h - 1) / 2.0
        j = np.arange(self.n_v) - (self.n_v - 1) / 2.0
        jj, ii = np.meshgrid(j, i, indexing="ij")
        offs = (ii.reshape(-1, 1) * self.len_h * self.h
                + jj.reshape(-1, 1) * self.len_v * self.v)
        out = np.asarray(self.center) + offs
        out.setflags(write=False)
        return out

    def replace(self, **changes) -> "SurfacePlacement":
        from dataclasses import replace
        return replace(self, **changes)


def unit_vectors(p: SurfacePlacement) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical unit vectors of the surface."""
    return p.h.copy(), p.v.copy()


def is_rectangular(p: SurfacePlacement) -> bool:
    """True iff the elements are rectangles (either direction lies in the xy-plane)."""
    return (abs(p.polar_h - 90.0) <= ANGLE_TOL_DEG
            or abs(p.polar_v - 90.0) <= ANGLE_TOL_DEG)


def delta_z_coefficients(p: SurfacePlacement) -> tuple[float, float]:
    """Coefficients ``(c_x, c_y)`` with ``dz = c_x*dx + c_y*dy`` on the surface plane.

    Obtained by writing an in-plane offset as ``alpha*h + beta*v`` and
    eliminating ``alpha`` and ``beta`` from the x and y components.

    Raises
    ------
    DegenerateAzimuths
        If the surface projects onto a line in the xy-plane, so ``dz`` is
        not a function of ``(dx, dy)``.
    """
    th_h, th_v = math.radians(p.polar_h), math.radians(p.polar_v)
    ph_h, ph_v = math.radians(p.azimuth_h), math.radians(p.azimuth_v)
    s = math.sin(ph_h - ph_v)
    if abs(s * math.sin(th_h) * math.sin(th_v)) < _DEGENERATE_TOL:
        raise DegenerateAzimuths(f"surface is perpendicular to the xy-plane: {p}")
    cot_h, cot_v = _cot(th_h), _cot(th_v)
    c_x = (cot_v * math.sin(ph_h) - cot_h * math.sin(ph_v)) / s
    c_y = (cot_h * math.cos(ph_v) - cot_v * math.cos(ph_h)) / s
    return c_x, c_y


def element_centers(p: SurfacePlacement) -> np.ndarray:
    """Element centers in index order ``n = j * n_h + i``; shape ``(N, 3)``."""
    return p.centers.copy()


def point_on_element(center, a: float, b: float, p: SurfacePlacement) -> np.ndarray:
    """Point at intrinsic coordinates ``(a, b)`` of the element centered at ``center``."""
    slack = 1e-12
    if abs(a) > p.len_h / 2 * (1 + slack) or abs(b) > p.len_v / 2 * (1 + slack):
        raise OutOfElement(f"(a={a}, b={b}) outside element {p.len_h} x {p.len_v}")
    return np.asarray(center, dtype=float) + a * p.h + b * p.v
