"""Near-field line-of-sight channel models and capacity bounds for holographic MIMO."""

__version__ = "0.1.0"

from .capacity import (CapacityReport, PatternBasis, SnrParams, capacity_report,
                       capacity_upper_bound, exact_capacity, far_field_upper_bound,
                       svd_patterns)
from .channel import (BlockChannelMatrix, Model, QuadratureSpec, assemble_channel,
                      cdcm_block, cicm_block, exact_channel_block, green_matrix,
                      simulate_transmission, varrho)
from .geometry import (SurfacePlacement, delta_z_coefficients, element_centers,
                       is_rectangular, point_on_element, unit_vectors)
from .green import (WaveParams, amplitude_tensor, green_frobenius_sq_closed_form,
                    green_tensor)
from .metrics import SpectrumReport, nmse, singular_spectrum

__all__ = [
    "BlockChannelMatrix", "CapacityReport", "Model", "PatternBasis", "QuadratureSpec",
    "SnrParams", "SpectrumReport", "SurfacePlacement", "WaveParams",
    "amplitude_tensor", "assemble_channel", "capacity_report", "capacity_upper_bound",
    "cdcm_block", "cicm_block", "delta_z_coefficients", "element_centers",
    "exact_capacity", "exact_channel_block", "far_field_upper_bound", "green_matrix",
    "green_frobenius_sq_closed_form", "green_tensor", "is_rectangular", "nmse",
    "point_on_element", "simulate_transmission", "singular_spectrum", "svd_patterns",
    "unit_vectors", "varrho",
]
