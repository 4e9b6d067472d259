"""Certified numerics for uncertainty principles between p-orthonormal bases."""

__version__ = "0.1.0"

from .spaces import (
    DomainError,
    Exponent,
    PreconditionError,
    StructuralError,
    conjugate_exponent,
    functional_norm,
    p_norm,
)
from .bases import (
    BasisPair,
    IsometryError,
    ValidationReport,
    canonical_basis,
    dft_basis,
    embed_to_lp,
    from_isometry,
    isometry_between,
    random_basis,
    validate,
)
from .grams import (
    AdmissibilityReport,
    CrossGram,
    SubsetPair,
    admissibility,
    admissibility_swapped,
    cross_gram,
    mu_global,
    mu_local,
)
from .operators import (
    NormEstimate,
    composite_matrix,
    dense_sampling_norm,
    opnorm_p,
    paper_norm_bound,
    project,
    restricted_norm,
)
from .uncertainty import (
    AnnihilationReport,
    Certificate,
    TheoremViolation,
    annihilation_test,
    hilbert_reduction_check,
    verify,
    verify_fgj,
    verify_fgj_local,
    verify_fgj_swapped,
    verify_fgj_swapped_local,
    verify_inp,
)
from .search import (
    ExtremalResult,
    SearchConfig,
    enumerate_admissible,
    extremal_ratio_search,
    sharpness_report,
)
