"""Compression-based proxies for algorithmic information and effective dimension."""

from .calibration import Calibration, CalibrationError, calibrate, load_calibration, write_calibration
from .compress import (
    HEADER_OVERHEAD,
    JOIN_OVERHEAD,
    compress,
    cond_klen,
    cond_klen_primed,
    decompress,
    klen,
    klen_joint,
    mutual_info,
    mutual_info_clamped,
)
from .encoding import BitEncoding, decode, encode, joint_point
from .estimates import (
    ChainResult,
    ComplexityProfile,
    DensityEstimate,
    cdim_estimate,
    chain_r_list,
    chain_rule_residuals,
    complexity_profile,
    dim_estimate,
    dyadic_point,
    mdim_estimate,
    periodic_point,
    prng_point,
    sigma,
)

__all__ = [
    "BitEncoding",
    "Calibration",
    "CalibrationError",
    "ChainResult",
    "ComplexityProfile",
    "DensityEstimate",
    "HEADER_OVERHEAD",
    "JOIN_OVERHEAD",
    "calibrate",
    "cdim_estimate",
    "chain_r_list",
    "chain_rule_residuals",
    "complexity_profile",
    "compress",
    "cond_klen",
    "cond_klen_primed",
    "decode",
    "decompress",
    "dim_estimate",
    "dyadic_point",
    "encode",
    "joint_point",
    "klen",
    "klen_joint",
    "load_calibration",
    "mdim_estimate",
    "mutual_info",
    "mutual_info_clamped",
    "periodic_point",
    "prng_point",
    "sigma",
    "write_calibration",
]
