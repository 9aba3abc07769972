"""Riesz-type energies on spheres and projective spaces.

Jacobi coefficients of radial kernels, energies of canonical measures,
sign-change scans in the kernel exponent, and discrete optimization.
"""
__version__ = "0.1.0"

from .spaces import Family, SpaceDescriptor, space_params  # noqa: E402
from .kernels import (  # noqa: E402
    AcuteAnglePower,
    ChordalLog,
    ChordalRiesz,
    Custom,
    GeodesicLog,
    GeodesicRiesz,
    parse_kernel,
)
from .coeffs import (  # noqa: E402
    coefficient_via_rodrigues,
    find_transition,
    jacobi_coefficient,
    jacobi_coefficients,
    positivity_scan,
)
from .measures import DiscreteMeasure, PoleEquatorMeasure, energy_discrete, energy_uniform  # noqa: E402
