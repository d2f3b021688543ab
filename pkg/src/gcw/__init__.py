"""gcw: an exact-arithmetic workbench for internally connected graph complexes,
their Lie-theoretic shadows, and certificate solvers for the interpolating
Kashiwara-Vergne Lie algebras."""

__version__ = "0.1.0"

from .graphs import (  # noqa: F401
    GC2,
    GRAPHS,
    ICG,
    AdmissibleGraph,
    BasisSlice,
    BudgetError,
    CanonicalGraph,
    GraphError,
    GraphSum,
    ParseError,
    aux_grade,
    basis_for_grading,
    canonicalize,
    degree_of,
    enumerate_basis,
    grading,
    internal_loop_order,
    parse_graph,
    parse_graph_sum,
    serialize_graph,
    slice_for,
)
from .ops import (  # noqa: F401
    codegeneracy_s_j,
    cosimplicial_delta,
    cosimplicial_delta_j,
    d_component,
    differential_d,
    dot_action,
    f_map,
    gc2_action,
    gc2_bracket,
    gc2_pre_lie,
    insert_internal,
    insert_internal_all,
    mark_one,
    merge_externals,
    operadic_insert,
    wedge,
)
from .linalg import (  # noqa: F401
    AssemblyError,
    ComplexSlice,
    InvariantError,
    SparseRationalMatrix,
    assemble,
    build_complex_slice,
    cohomology_dim,
    gc2_complex_slice,
    spectral_e1,
    spectral_er00,
    sum_to_vector,
    vector_to_sum,
)
from .homotopy import (  # noqa: F401
    FiniteComplex,
    GradedMap,
    NilpotencyError,
    SplitError,
    Splitting,
    equivariant_average,
    from_complex_slice,
    perturb,
    random_filtered_complex,
    split,
)
from .lie import (  # noqa: F401
    AssElement,
    CutoffError,
    LieElement,
    LieError,
    TangentialDerivation,
    TraceElement,
    delta_at,
    derive,
    divergence,
    dk_embed,
    grt_relations_check,
    lie_bracket,
    lyndon_words,
    partial_k,
    sder_dimension,
    tder_bracket,
    tr1_dimension,
    trace_action,
)
from .bridge import (  # noqa: F401
    BridgeError,
    Certificate,
    KrvCertificate,
    MembershipError,
    bracket_certificate,
    certificate_from_json,
    certificate_to_json,
    closed_tree_basis,
    div_diagram_check,
    div_kernel_space,
    grt_extract,
    ihara_bracket_trees,
    krv_hat_membership,
    krv_member_space,
    krv_membership,
    krvhat_member_space,
    normalize_certificate,
    oneloop_class_to_tr,
    oneloop_to_tr,
    total_grade,
    trees_to_sder,
    verify_certificate,
)
