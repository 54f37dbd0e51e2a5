"""Exact cohomology of 1D tiling spaces, Cantor Z^d systems and exact couples."""

from .abelian import GroupPresentation, IntMatrix, Status, direct_limit_fg, invariant_factors, smith_normal_form
from .approximants import build_proper_sequence, cech_cohomology_of_hull
from .delta_complex import DeltaComplex, simplicial_cohomology
from .errors import PVCohError
from .koszul import build_koszul_complex, koszul_cohomology
from .pv import cantor_circle_normal_form, frequency_module, pv_cohomology_hull
from .spectral import cofiltration_couple, couple_from_skeleton_filtration, derive_couple, pages
from .tiling import cut_and_project_sample, golden, parse_alpha, silver

__all__ = [
    "GroupPresentation", "IntMatrix", "Status", "direct_limit_fg", "invariant_factors", "smith_normal_form",
    "build_proper_sequence", "cech_cohomology_of_hull", "DeltaComplex", "simplicial_cohomology", "PVCohError",
    "build_koszul_complex", "koszul_cohomology", "cantor_circle_normal_form", "frequency_module",
    "pv_cohomology_hull", "cofiltration_couple", "couple_from_skeleton_filtration", "derive_couple", "pages",
    "cut_and_project_sample", "golden", "parse_alpha", "silver",
]
