"""Exact computational algebra for framed quiver varieties, Kleinian McKay
quivers, symplectic reflection algebras, and type-A transversal slices.

Everything is exact: rational, cyclotomic, or dual-number arithmetic, never
floating point.  See the README for the module map.
"""

from .scalars import (
    CycScalar,
    DomainError,
    Jet,
    Matrix,
    NoSolution,
    Rational,
    cyc_conjugate,
    mat_kernel,
    mat_solve,
)
from .quiver import (
    CharacterTheta,
    FramedQuiver,
    NotReflectable,
    Quiver,
    QuiverRep,
    SampleFailed,
    is_semistable_det,
    moment_differential_kernel,
    moment_is,
    moment_map,
    reflect,
    sample_fiber,
    sample_lambda0,
    sample_tangent,
    trace_invariant,
)
from .roots import (
    CartanData,
    IndefiniteType,
    NonDominantHighestWeight,
    Root,
    WeightVector,
    cb_flatness_check,
    dominance_check,
    is_generic,
    p_value,
    positive_roots_below,
    weight_multiplicity,
)
from .mckay import (
    BinaryDihedral,
    BinaryIcosahedral,
    BinaryOctahedral,
    BinaryTetrahedral,
    Cyclic,
    Family,
    KleinianGroup,
    NonIntegralMultiplicity,
    SymplecticReflection,
    TableValidationFailed,
    WreathGroup,
    build_group,
    identify_affine_type,
    mckay_quiver,
    omega_s,
    symplectic_reflections,
)
from .ncalg import (
    AlgebraCtx,
    ConfluenceNotCertified,
    NCElement,
    ParamPoly,
    averaging_idempotent,
    confluence_check,
    coordinate_action,
    framed_weyl_ctx,
    graded_dimension,
    molien_dim,
    nc_mul,
    nc_pow,
    parity_antiauto,
    quantum_comoment,
    spherical_product,
    sra_ctx,
    weyl_ctx,
)
from .params import (
    NonRationalTrace,
    NonTraceZero,
    NotInvertible,
    ParamMap,
    ParamSpace,
    ParamVec,
    RelationViolated,
    a_to_zstar,
    astar_space,
    build_upsilon,
    build_upsilon0,
    hstar_to_z0,
    sigma_flip,
    sra_klein_space,
    sra_wreath_space,
    weyl_act,
    zhat0_space,
    zhat_space,
)
from .typea import (
    BlockRep,
    FlagDimensionMismatch,
    InvalidPartition,
    LiftInconsistent,
    NonPositiveDimension,
    PreconditionMomentMap,
    Sl2Triple,
    SlodowySlice,
    TypeAData,
    build_typea,
    flag_iso_e0,
    grad_degree,
    kazhdan_action_check,
    maffei_lift,
    maffei_verify,
    sl2_for_blocks,
    slodowy_slice,
    symplectic_pullback_check,
)

__all__ = [
    "AlgebraCtx",
    "BinaryDihedral",
    "BinaryIcosahedral",
    "BinaryOctahedral",
    "BinaryTetrahedral",
    "BlockRep",
    "CartanData",
    "CharacterTheta",
    "ConfluenceNotCertified",
    "CycScalar",
    "Cyclic",
    "DomainError",
    "Family",
    "FlagDimensionMismatch",
    "FramedQuiver",
    "IndefiniteType",
    "InvalidPartition",
    "Jet",
    "KleinianGroup",
    "LiftInconsistent",
    "Matrix",
    "NCElement",
    "NoSolution",
    "NonDominantHighestWeight",
    "NonIntegralMultiplicity",
    "NonPositiveDimension",
    "NonRationalTrace",
    "NonTraceZero",
    "NotInvertible",
    "NotReflectable",
    "ParamMap",
    "ParamPoly",
    "ParamSpace",
    "ParamVec",
    "PreconditionMomentMap",
    "Quiver",
    "QuiverRep",
    "Rational",
    "RelationViolated",
    "Root",
    "SampleFailed",
    "Sl2Triple",
    "SlodowySlice",
    "SymplecticReflection",
    "TableValidationFailed",
    "TypeAData",
    "WeightVector",
    "WreathGroup",
    "a_to_zstar",
    "astar_space",
    "averaging_idempotent",
    "build_group",
    "build_typea",
    "build_upsilon",
    "build_upsilon0",
    "cb_flatness_check",
    "confluence_check",
    "coordinate_action",
    "cyc_conjugate",
    "dominance_check",
    "flag_iso_e0",
    "framed_weyl_ctx",
    "grad_degree",
    "graded_dimension",
    "hstar_to_z0",
    "identify_affine_type",
    "is_generic",
    "is_semistable_det",
    "kazhdan_action_check",
    "maffei_lift",
    "maffei_verify",
    "mat_kernel",
    "mat_solve",
    "mckay_quiver",
    "molien_dim",
    "moment_differential_kernel",
    "moment_is",
    "moment_map",
    "nc_mul",
    "nc_pow",
    "omega_s",
    "p_value",
    "parity_antiauto",
    "positive_roots_below",
    "quantum_comoment",
    "reflect",
    "sample_fiber",
    "sample_lambda0",
    "sample_tangent",
    "sigma_flip",
    "sl2_for_blocks",
    "slodowy_slice",
    "spherical_product",
    "sra_ctx",
    "sra_klein_space",
    "sra_wreath_space",
    "symplectic_reflections",
    "trace_invariant",
    "weight_multiplicity",
    "weyl_act",
    "weyl_ctx",
    "zhat0_space",
    "zhat_space",
]

__version__ = "0.1.0"
