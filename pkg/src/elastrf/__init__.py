"""Random fields of rank-4 elasticity tensors.

Construction, validation, evaluation, and spectral simulation of homogeneous
random fields of stiffness tensors that are isotropic with respect to one of
the sixteen admissible symmetry-group cases.
"""

from .covariance import (FieldSpec, SpectralAtom, atom_from_u, f_from_u,
                         j_functions, kernel, kernel_O2_bessel,
                         kernel_O3_quadrature, mean_tensor, u_from_f,
                         validate_f, validate_spec)
from .estimate import EstimatorReport, mc_estimate
from .groups import (enumerate_elements, group_case, isotropy_subgroups,
                     orbit_strata, stratum_of, wigner_to_gordienko)
from .reps import (adapted_basis, coupled_basis, fixed_point_basis,
                   isotypic_decomposition, m_to_l_expansion,
                   structure_summary)
from .simulate import (RealizationField, SimulationPlan, cholesky_psd,
                       sample_field, u_basis_functions)
from .tensors import (L_function, ogden_tensor, rep_matrix_21, rotate_tensor,
                      tensor_to_vec, to_voigt, vec_to_tensor)

__all__ = [
    "FieldSpec", "SpectralAtom", "atom_from_u", "f_from_u", "j_functions",
    "kernel", "kernel_O2_bessel", "kernel_O3_quadrature", "mean_tensor",
    "u_from_f", "validate_f", "validate_spec", "EstimatorReport",
    "mc_estimate", "enumerate_elements", "group_case", "isotropy_subgroups",
    "orbit_strata", "stratum_of", "wigner_to_gordienko", "adapted_basis",
    "coupled_basis", "fixed_point_basis", "isotypic_decomposition",
    "m_to_l_expansion", "structure_summary", "RealizationField",
    "SimulationPlan", "cholesky_psd", "sample_field", "u_basis_functions",
    "L_function", "ogden_tensor", "rep_matrix_21", "rotate_tensor",
    "tensor_to_vec", "to_voigt", "vec_to_tensor",
]

__version__ = "0.1.0"
