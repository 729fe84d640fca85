"""Numerical analysis of sub-Riemannian surfaces on 3-space.

A sub-Riemannian surface is a 2-plane distribution (the kernel of a 1-form)
with a metric on the planes.  This package constructs adapted frames,
computes the scalar invariants M and K, evaluates the symmetry obstruction
system and reconstructs symmetry fields, and analyzes the singular locus
where the distribution fails to be contact.
"""

from .jets import (BudgetExhausted, Jet, JetError, MAX_ORDER, MIN_ORDER,
                   jet_seed, multi_indices, n_coeffs)
from .fields import (DEFAULT_ORDER, FieldProgram, MetricField, OneForm,
                     ParseError, ScalarField, TwoFormValue, contact_defect,
                     exterior_derivative)
from .frame import (AdaptedFrame, NoncontactError, StructureFunctions,
                    build_contact_frame, delta_basis, lie_bracket,
                    nonholonomity, nonholonomity_program)
from .invariants import (InvariantValues, directional_derivative, invariant_K,
                         invariant_M, invariants_at,
                         torsion_and_connection_coeffs)
from .symmetry import (DegeneratePointError, SymmetryField, SymmetrySystem,
                       assemble_and_verify_V, build_system,
                       frame_to_coordinate_gradient, integrability_residuals,
                       reconstruct_lnf)
from .singular import (SigmaInvariants, SigmaPoint, SingularFrameError,
                       build_singular_frame, characteristic_field,
                       check_special_rescale, lambda_identities, locate_sigma,
                       sigma_invariant_derivative, sigma_invariants)
from .report import PointReport, RunConfig

__version__ = "1.0.0"

__all__ = [
    "AdaptedFrame", "BudgetExhausted", "DEFAULT_ORDER",
    "DegeneratePointError", "FieldProgram", "InvariantValues", "Jet",
    "JetError", "MAX_ORDER", "MIN_ORDER", "MetricField", "NoncontactError",
    "OneForm", "ParseError", "PointReport", "RunConfig", "ScalarField",
    "SigmaInvariants", "SigmaPoint", "SingularFrameError",
    "StructureFunctions", "SymmetryField", "SymmetrySystem", "TwoFormValue",
    "assemble_and_verify_V", "build_contact_frame", "build_singular_frame",
    "build_system", "characteristic_field", "check_special_rescale",
    "contact_defect", "delta_basis", "directional_derivative",
    "exterior_derivative", "frame_to_coordinate_gradient",
    "integrability_residuals", "invariant_K", "invariant_M", "invariants_at",
    "jet_seed", "lambda_identities", "lie_bracket", "locate_sigma",
    "multi_indices", "n_coeffs", "nonholonomity", "nonholonomity_program",
    "reconstruct_lnf", "sigma_invariant_derivative", "sigma_invariants",
    "torsion_and_connection_coeffs",
]
