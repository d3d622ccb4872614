"""Dirichlet L-function values, zero scanning, classification and zero-region checkers."""

from .checks import (CheckReport, Classification, ProblemRange, TheoremConstants, classify,
                     density_count_check, deuring_heilbronn_check, eta_condition, gulp_region_check,
                     iwaniec_condition_check, k0_value, problem_range_rectangle, theorem1_constants,
                     xi_index, zero_free_region_check)
from .values import dirichlet_partial_sum, l_value, l_value_regular
from .zeros import (Rect, ScanResult, ZeroRecord, conjugate_pairs_ok, has_zero, scan_zeros,
                    winding_number, zeros_csv)

__all__ = [
    "CheckReport", "Classification", "ProblemRange", "Rect", "ScanResult", "TheoremConstants",
    "ZeroRecord", "classify", "conjugate_pairs_ok", "density_count_check",
    "deuring_heilbronn_check", "dirichlet_partial_sum", "eta_condition", "gulp_region_check",
    "has_zero", "iwaniec_condition_check", "k0_value", "l_value", "l_value_regular",
    "problem_range_rectangle", "scan_zeros", "theorem1_constants", "winding_number",
    "xi_index", "zero_free_region_check", "zeros_csv",
]
