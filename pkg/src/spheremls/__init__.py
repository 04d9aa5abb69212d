"""Moving least squares approximation of scattered data on the unit sphere.

The package provides four families of local ansatz spaces (full and
parity-reduced spherical harmonics, a center-rotated monomial basis of
the reduced space, and tangent-plane polynomials), a per-center weighted
least squares solver with optimal-recovery diagnostics, quasi-uniform
Fibonacci node families, and a benchmark harness measuring convergence
order, Gram conditioning and Lebesgue constants.
"""

from ._validation import is_rotation
from .bases import (ANSATZ_KINDS, AnsatzSpec, BasisEvaluator,
                    NearZeroBasisError, UnsupportedAnsatzError,
                    build_evaluator, eval_monomial, eval_real_harmonics,
                    monomial_matrix, parity_multiindices, rescale_unit_diagonal,
                    tangent_multiindices)
from .benchmark import (OrderEstimate, SweepConfig, SweepRecord,
                        TestFunctionParams, default_r_factors,
                        default_test_function, estimate_order,
                        random_uniform_sphere, run_sweep, stable_records,
                        write_sweep_csvs)
from .estimator import SphericalMLS
from .geometry import (SphereDomainError, cap_contains, geodesic_distance,
                       geodesic_distances, inverse_projection, north_pole,
                       project_to_sphere, rotation_to_north)
from .nodes import (FillEstimate, NodeSet, fibonacci_grid, load_nodes,
                    node_count_in_cap_bound)
from .solver import (FieldDiagnostics, FixedDelta, MlsConfig, MlsError,
                     MlsFit, MultipleOfFill, NotEnoughNodesError,
                     NotUnisolventError, active_nodes,
                     backus_gilbert_coefficients, evaluate_field_diagnostics,
                     gram_condition, lebesgue_constant, mls_evaluate_field,
                     solve_local)
from .taylor import (TaylorMatrix, TruncatedPolynomial, pullback_polynomial,
                     sqrt_series, taylor_matrix)
from .weights import (ProfileReport, WeightProfile, custom_profile,
                      hat_power, hat_squared, validate_profile, weight)

__version__ = "0.1.0"

__all__ = [
    "ANSATZ_KINDS",
    "AnsatzSpec",
    "BasisEvaluator",
    "FieldDiagnostics",
    "FillEstimate",
    "FixedDelta",
    "MlsConfig",
    "MlsError",
    "MlsFit",
    "MultipleOfFill",
    "NearZeroBasisError",
    "NodeSet",
    "NotEnoughNodesError",
    "NotUnisolventError",
    "OrderEstimate",
    "ProfileReport",
    "SphereDomainError",
    "SphericalMLS",
    "SweepConfig",
    "SweepRecord",
    "TaylorMatrix",
    "TestFunctionParams",
    "TruncatedPolynomial",
    "UnsupportedAnsatzError",
    "WeightProfile",
    "active_nodes",
    "backus_gilbert_coefficients",
    "build_evaluator",
    "cap_contains",
    "custom_profile",
    "default_r_factors",
    "default_test_function",
    "estimate_order",
    "eval_monomial",
    "eval_real_harmonics",
    "evaluate_field_diagnostics",
    "fibonacci_grid",
    "geodesic_distance",
    "geodesic_distances",
    "gram_condition",
    "hat_power",
    "hat_squared",
    "inverse_projection",
    "is_rotation",
    "lebesgue_constant",
    "load_nodes",
    "mls_evaluate_field",
    "monomial_matrix",
    "node_count_in_cap_bound",
    "north_pole",
    "parity_multiindices",
    "project_to_sphere",
    "pullback_polynomial",
    "random_uniform_sphere",
    "rescale_unit_diagonal",
    "rotation_to_north",
    "run_sweep",
    "solve_local",
    "sqrt_series",
    "stable_records",
    "tangent_multiindices",
    "taylor_matrix",
    "validate_profile",
    "weight",
    "write_sweep_csvs",
]
