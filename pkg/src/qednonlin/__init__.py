"""Charge-qubit / LC-resonator nonlinear circuit QED simulations."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    DYNAMICS_TRUNCATION,
    REFERENCE_DEVICE,
    SPECTRUM_TRUNCATION,
    DerivedParams,
    PhysicalParams,
    Truncation,
    derive_params,
)

__all__ = [
    "DYNAMICS_TRUNCATION",
    "REFERENCE_DEVICE",
    "SPECTRUM_TRUNCATION",
    "DerivedParams",
    "PhysicalParams",
    "Truncation",
    "derive_params",
]
