"""
quadhardy: symplectic flows of quadratic Hamiltonians and a Hardy-type
uniqueness certificate for the associated Schrödinger evolutions.
"""

from .errors import (
    AliasingError, DecayBoundViolation, DefinitenessError, DimensionError,
    LatticeError, NotFreeError, NotSymplecticError, NumericOverflowError,
    QuadHardyError, SingularMatrixError, UnsupportedRegimeError, ValidationError,
)
from .expm import expm
from .hamiltonian import (
    AlgebraElement, FlowPoint, QuadraticHamiltonian, closed_form_flow, flow,
    generator, preset,
)
from .hardy import (
    DecayPair, GammaPair, HardyCertificate, Verdict, ZReduction, certificate,
    critical_product, gamma_pm, oscillator_certificate, z_reduction,
)
from .symplectic import (
    GeneratingFunction, SymplecticMatrix, free_matrix_from_generating,
    generating_from_free, is_free, is_symplectic, random_symplectic,
    symplectic_form, symplectic_inverse,
)
from .wigner import (
    GaussianState, GridSpec, WignerGrid, covariance_check, cross_wigner,
    hardy_saturation_probe, propagate_gaussian, quadratic_fourier_1d,
    wigner_decay_bound,
)
from .williamson import (
    WilliamsonDecomposition, cross_term_basis, exp_via_williamson, paper_basis_cross_term,
    williamson,
)

__all__ = [
    "AliasingError", "DecayBoundViolation", "DefinitenessError", "DimensionError",
    "LatticeError", "NotFreeError", "NotSymplecticError", "NumericOverflowError",
    "QuadHardyError", "SingularMatrixError", "UnsupportedRegimeError",
    "ValidationError", "expm", "AlgebraElement", "FlowPoint", "QuadraticHamiltonian",
    "closed_form_flow", "flow", "generator", "preset", "DecayPair", "GammaPair",
    "HardyCertificate", "Verdict", "ZReduction", "certificate", "critical_product",
    "gamma_pm", "oscillator_certificate", "z_reduction", "GeneratingFunction",
    "SymplecticMatrix", "free_matrix_from_generating", "generating_from_free",
    "is_free", "is_symplectic", "random_symplectic", "symplectic_form",
    "symplectic_inverse", "GaussianState", "GridSpec", "WignerGrid",
    "covariance_check", "cross_wigner", "hardy_saturation_probe", "propagate_gaussian",
    "quadratic_fourier_1d", "wigner_decay_bound", "WilliamsonDecomposition",
    "cross_term_basis", "exp_via_williamson", "paper_basis_cross_term", "williamson",
]

__version__ = "0.1.0"
