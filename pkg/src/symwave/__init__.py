"""Exact construction of symmetric MRA-based wavelet filter banks."""
from .design import bank_from_masks, design_axial, design_group, design_point, verify_bank
from .extension import FilterBank
from .fileio import bank_from_json, bank_to_json, golden, load_table
from .lattice import build_context
from .laurent import LaurentPoly
from .transform import Grid, analyze, cascade, synthesize

__all__ = [
    "FilterBank", "Grid", "LaurentPoly", "analyze", "bank_from_json", "bank_from_masks",
    "bank_to_json", "build_context", "cascade", "design_axial", "design_group", "design_point",
    "golden", "load_table", "synthesize", "verify_bank",
]
