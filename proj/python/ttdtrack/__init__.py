"""Wideband TTD beam tracking: pairing, bounds, codebooks, tracking and Monte Carlo sweeps."""

from ._core import (
    DegenerateError,
    DimensionError,
    DomainError,
    PairingConfig,
    PairingMode,
    SystemConfig,
    angle_map,
    array_gain,
    backward_bound,
    codebook,
    dirichlet,
    fixed_radius,
    forward_bound,
    make_backward_pairing,
    make_forward_pairing,
    make_pairing,
    nmse,
    radius_bounds,
    reference_system,
    scenario_keys,
    search_angles,
    snap,
    sweep,
    theorem1_bound,
    track,
)

__all__ = [
    "DegenerateError",
    "DimensionError",
    "DomainError",
    "PairingConfig",
    "PairingMode",
    "SystemConfig",
    "angle_map",
    "array_gain",
    "backward_bound",
    "codebook",
    "dirichlet",
    "fixed_radius",
    "forward_bound",
    "make_backward_pairing",
    "make_forward_pairing",
    "make_pairing",
    "nmse",
    "radius_bounds",
    "reference_system",
    "scenario_keys",
    "search_angles",
    "snap",
    "sweep",
    "theorem1_bound",
    "track",
]
