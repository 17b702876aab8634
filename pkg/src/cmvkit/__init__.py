"""Orthogonal polynomials on the unit circle, CMV matrices and their inverse spectral problems."""

from .cmv import (
    CmvMatrix,
    TruncatedCmv,
    alternate_cmv,
    assemble_cmv,
    blocks,
    defect_data,
    livsic_matrix,
    lm_factors,
    params_from_truncated,
    rotate_conjugate,
    submatrix_k,
    truncate,
    truncated_cmv,
)
from .errors import (
    ArgumentError,
    CapabilityError,
    CMVError,
    ConsistencyError,
    ExistenceNotFound,
    NoSolution,
    NumericError,
    SingularMatrixError,
    StructureError,
    TerminalParameterReached,
)
from .inverse import (
    FamilyDescriptor,
    MixedFirstData,
    MixedLastData,
    blaschke_condition,
    mixed_first,
    mixed_first_zero_reduction,
    mixed_last,
    reconstruct_from_spectrum,
)
from .numkernel import DEFAULT_TOL, Poly, Tolerances, eig, roots, solve, star
from .opuc import (
    MonicOpucChain,
    TrivialMeasure,
    extend_zeros_numeric,
    khrushchev_params,
    measure_from_blaschke,
    theorem_ttt_build,
    verblunsky_from_measure,
    verblunsky_from_monic,
)
from .schurfun import (
    BlaschkeProduct,
    RationalSchur,
    SchurParams,
    blaschke_from_schur_params,
    param_product_check,
    schur_params_of_blaschke,
    schur_params_of_rational,
    schur_step,
    wall_pair,
)
from .spectra import charfun_schur, charpoly_check, nagy_foias_charfun, schur_iterate_check, spectrum

__version__ = "0.1.0"

_ESTIMATORS = ("InverseSpectralCMV", "MixedFirstCMV", "MixedLastCMV")


def __getattr__(name):
    # scikit-learn is only imported when an estimator is requested
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module 'cmvkit' has no attribute {name!r}")
