"""Certify or refute robust diffusive stability of coupled nonnegative systems."""

from ._core import (
    NonnegMatrix,
    ValidationError,
    NumericError,
    build_s1_s2,
    check_rds,
    common_right_vector,
    couple,
    enumerate_coupling_class,
    find_cdlf,
    find_clclf,
    find_destabilizer,
    find_jlclf,
    is_irreducible,
    is_schur,
    rho_coupled,
    row_selections,
    simulate,
    spectral_radius,
    validate_leslie,
    verify_copositive_cert,
    verify_diagonal_cert,
)

__version__ = "0.1.0"

__all__ = [
    "NonnegMatrix",
    "ValidationError",
    "NumericError",
    "build_s1_s2",
    "check_rds",
    "common_right_vector",
    "couple",
    "enumerate_coupling_class",
    "find_cdlf",
    "find_clclf",
    "find_destabilizer",
    "find_jlclf",
    "is_irreducible",
    "is_schur",
    "rho_coupled",
    "row_selections",
    "simulate",
    "spectral_radius",
    "validate_leslie",
    "verify_copositive_cert",
    "verify_diagonal_cert",
]
