"""Crossed homomorphisms on Lie algebras and on the group of 2x2 upper
triangular matrices with positive diagonal: verification, twisted
Chevalley-Eilenberg cohomology, and rigidity of deformations."""

from .algebra_core import LieAlgebraSpec, AlgebraAction, adjoint_action, borel_sl2, bracket, check_jacobi
from .crossed_alg import AlgCrossedHom, classify_2d, crossed_residual, solve_numeric, twisted_representation
from .ce_cohomology import build_coboundary, coboundary_witness, cohomology_dims, verify_complex
from .matrix_group import Gamma1, Gamma2, Gamma3, UT2Element, check_crossed_hom_group, eval_family, tangent_map
from .deformation import DeformationPath, moser_flow, rigidity_verdict
from .errors import FlowError, InputError, PathError

__version__ = "0.1.0"

__all__ = [
    "LieAlgebraSpec", "AlgebraAction", "adjoint_action", "borel_sl2", "bracket", "check_jacobi",
    "AlgCrossedHom", "classify_2d", "crossed_residual", "solve_numeric", "twisted_representation",
    "build_coboundary", "coboundary_witness", "cohomology_dims", "verify_complex",
    "Gamma1", "Gamma2", "Gamma3", "UT2Element", "check_crossed_hom_group", "eval_family", "tangent_map",
    "DeformationPath", "moser_flow", "rigidity_verdict",
    "FlowError", "InputError", "PathError",
]
