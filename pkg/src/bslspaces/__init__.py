"""Numerics for bilateral Grand Lebesgue spaces G(psi) and their associate
Small Lebesgue spaces SL(psi): norms, fundamental functions, duality
certificates, chi-integrals and dilation indices."""
from ._kernels import BACKEND
from .chiest import (SimpleFunction, chi_distance, chi_from_psi, chi_integral_general,
                     chi_integral_simple, chi_power, chi_seminorm)
from .fundamental import (fundamental_profile, phi_asymptote, phi_grand_closed,
                          phi_grand_numeric, phi_small)
from .grandnorm import NormReport, grand_norm, holder_check, in_g0_test, sup_over_exponents
from .indices import boyd_indices_grand, dilation_norm_bounds, index_report, indices_small
from .measure import (DomainError, MeasureSpace, SampledFunction, conjugate_exponent,
                      integrate_product, log_lp_norms, lp_norm)
from .psi import PsiFunction, legendre_transform, young_fenchel_psi, zeta_root_h
from .smallnorm import (Decomposition, acn_check, sharpness_witness, sl_norm, sl_norm_dual,
                        sl_norm_primal, sl_upper_single, verify_decomposition)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Decomposition", "DomainError", "MeasureSpace", "NormReport", "PsiFunction",
    "SampledFunction", "SimpleFunction", "acn_check", "boyd_indices_grand", "chi_distance",
    "chi_from_psi", "chi_integral_general", "chi_integral_simple", "chi_power", "chi_seminorm",
    "conjugate_exponent", "dilation_norm_bounds", "fundamental_profile", "grand_norm",
    "holder_check", "in_g0_test", "index_report", "indices_small", "integrate_product",
    "legendre_transform", "log_lp_norms", "lp_norm", "phi_asymptote", "phi_grand_closed",
    "phi_grand_numeric", "phi_small", "sharpness_witness", "sl_norm", "sl_norm_dual",
    "sl_norm_primal", "sl_upper_single", "sup_over_exponents", "verify_decomposition",
    "young_fenchel_psi", "zeta_root_h",
]
