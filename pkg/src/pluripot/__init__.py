"""Numerical pluripotential theory on real compact sets.

Extremal-function approximation from admissible polynomial meshes,
transfinite-diameter estimation from calibrated Gram determinants,
equilibrium-measure densities from the complex Hessian of the log-Bergman
function, approximate Fekete points, and rho-algorithm extrapolation.
"""

from .acceleration import RhoTable, rho_scalar, rho_vector, select
from .basis import (AffineMap, BasisSpec, dimension, eval_basis,
                    eval_basis_derivatives, graded_lex_index, multi_index_list)
from .equilibrium import (DensityField, DerivativeBundle, FeketeSelection,
                          afp_extract, density_adjugate, density_qr,
                          derivative_bundles, discrete_measure_moments,
                          equilibrium_density, fd_hessian_density,
                          weighted_mesh_moments)
from .exceptions import (ConditioningWarning, DegenerateWeightError,
                         DomainError, FlatMeshError, GridConfigError,
                         IllConditioningError, NoAccelerantAvailableError,
                         NonUnisolventMeshError, NoReferenceAvailableError,
                         OraclePrecisionWarning, PluripotError, SizeError,
                         UndersamplingError, UsageError)
from .extremal import (ErrorReport, EvalGrid, SiciakExtremal, error_metrics,
                       inverse_joukowski_abs, ratio_sequence,
                       reference_extremal, szef_values)
from .meshes import (Mesh, mesh_disk, mesh_for_set, mesh_polygon,
                     mesh_simplex, mesh_square, mesh_square_cl, mesh_union,
                     read_mesh_csv, write_mesh_csv)
from .orthon import (OrthoState, bergman, bergman_weights, build_state,
                     evaluate_onb, evaluate_weighted_onb, kernel_l1,
                     orthonormalize, weighted_bergman, weighted_kernel_l1,
                     weighted_orthonormalize)
from .sets import (AffineImage, Box, CompactSet, Disk, Product,
                   RegularPolygon, Simplex, membership)
from .transfinite import (GramSpectrum, TDEstimate, brute_force_gram_integral,
                          calibration_factor, gram_det_exponent,
                          gram_spectrum, td_estimate)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
