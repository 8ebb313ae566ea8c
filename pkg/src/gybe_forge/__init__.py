"""Constructors and numerical verifiers for Yang-Baxter-type solution families."""

from .blocks import BlockSpec, build_deformed_block, build_diag_block, build_rot_block, build_trig_block, build_xxz_block
from .errors import GybeError
from .families import REGISTRY, build_family, certify
from .verify import GybeShape, VerificationReport, verify_spectral
from .xshape import BlockMap, assemble_x_shaped, build_m_family

__all__ = [
    "BlockMap",
    "BlockSpec",
    "GybeError",
    "GybeShape",
    "REGISTRY",
    "VerificationReport",
    "assemble_x_shaped",
    "build_deformed_block",
    "build_diag_block",
    "build_family",
    "build_m_family",
    "build_rot_block",
    "build_trig_block",
    "build_xxz_block",
    "certify",
    "verify_spectral",
]

__version__ = "0.1.0"
