"""Distinguishability of orthogonal multipartite states by separable
operations: deciders, POVM certificates, and state-family constructions."""

from .config import DEFAULT, Tolerances
from .states import (
    MagicBasisCoords,
    PureState,
    QUBIT_PAIR,
    StateSpace,
    basis_state,
    coeff_matrix,
    concurrence,
    ket,
    magic_basis,
    magic_coords,
    orthocomplement_basis,
    orthonormal_completion,
    phi_plus,
    product_state,
)
from .tensor_rank import (
    ProductVector,
    Schmidt2Class,
    Schmidt2Decomposition,
    Schmidt2Kind,
    SchmidtInfo,
    SpanProducts,
    entry_distance,
    is_product,
    product_vectors_in_span,
    schmidt2_classify,
    schmidt_decompose,
)
from .separability import (
    AntiparallelResult,
    FeasibilityOutcome,
    FeasibilityProblem,
    Lemma1Result,
    ProductDecomposition,
    PptRecord,
    PtWitness,
    Rank2Case,
    SeparabilityVerdict,
    SepStatus,
    antiparallel_test,
    feasibility_solve,
    lemma1_check,
    ppt_oracle,
    rank2_separability,
)
from .discrimination import (
    DiscriminationInstance,
    LoccFlag,
    PovmCertificate,
    SeparableState,
    SubspaceKind,
    Verdict,
    VerdictStatus,
    build_separable_operation,
    decide,
    decide_2x2_basis,
    decide_h3,
    decide_max_ent_basis,
    decide_multipartite_sch2,
    subspace_verdict,
    validate_certificate,
)
from .constructions import (
    FamilyParams,
    SubspaceFamily,
    SubspaceSpec,
    TetraPoint,
    basis_for_targets,
    basis_from_unitary,
    family_sep_not_locc,
    indistinguishable_subspace,
    locc_basis_sch2,
    tetra_unitary,
    verify_subspace_properties,
)

__version__ = "0.1.0"
