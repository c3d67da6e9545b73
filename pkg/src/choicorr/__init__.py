"""Choi matrices, complete positivity, and substitutes for the matrix units."""

from .basis import (
    BasisReport,
    OrderedBasis,
    basis_correspondence,
    basis_from_zeta,
    c_basis_matrix,
    m_basis_map,
    matrix_unit_basis,
    pauli_basis,
    recover_zeta,
    sigma_of_basis,
)
from .correspondence import (
    SigmaReport,
    WitnessRecord,
    coi_verdict,
    eta_for_xi,
    extract_s,
    find_witness,
    sigma_correspondence,
    validate_witness,
)
from .linalg import (
    DEFAULT_TOL,
    NotHermitianError,
    SchmidtDecomposition,
    ToleranceConfig,
    hermitian_eig,
    numeric_rank,
    pairing,
    psd_verdict,
    schmidt_decompose,
    tensor,
    unvec_row,
    vec_row,
)
from .maps import (
    ChoiLikeMatrix,
    CpVerdict,
    KrausSet,
    LinearMap,
    ad_map,
    adjoint_map,
    apply_map,
    choi_from_kraus,
    choi_of_map,
    compose,
    cp_verdict,
    generalized_choi,
    identity_map,
    inverse_map,
    kraus_from_choi,
    map_of_choi,
    map_pairing,
    tilde_vector,
    transpose_map,
)

__version__ = "0.1.0"
