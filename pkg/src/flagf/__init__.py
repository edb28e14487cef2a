"""flagf: canonical f-structures on the oriented flag manifolds
SO(n)/SO(2)xSO(n-3), viewed as homogeneous spaces of even finite order.

The package builds the generating inner automorphisms, the reductive
decomposition so(n) = h (+) m, all canonical f-structures and almost product
structures as polynomials in theta, the two-parameter family g(s, t) of
invariant Riemannian metrics, and decides membership of each f-structure in
the Killing, nearly-Kaehler and G1 classes as a function of (s, t).
"""

from .liealg import (
    EndoOnM,
    LieElement,
    Subspace,
    ad_matrix,
    basis_element,
    bracket,
    decompose_orthogonal,
    image,
    lie_coords,
    lie_from_coords,
    nullspace,
    poly_in,
    project,
    random_skew,
    skew,
    trace_form,
)
from .phispace import (
    AutomorphismSpec,
    PhiSpace,
    RegularityReport,
    build_automorphism,
    build_phi_space,
    check_regularity,
    fixed_subalgebra_dim,
)
from .canonical import (
    CanonicalStructure,
    GoldenActionReport,
    StructureCheck,
    expected_flag_action,
    generate_f_structures,
    generate_product_structures,
    golden_action_check,
    structure_by_label,
    u_of_k,
    verify_structure,
)
from .metricgeom import (
    MetricParams,
    TripleSplit,
    build_split,
    check_naturally_reductive,
    metric_eval,
    naturally_reductive_residual,
    nomizu,
    u_tensor_closed,
    u_tensor_solved,
)
from .classify import (
    CharacteristicSet,
    ClassEvaluator,
    ClassReport,
    MembershipResult,
    build_grid,
    characteristic_set,
    check_metric_compat,
    default_grid,
    membership,
    metric_compat_residual,
    product_compat_residual,
    sweep,
)

__version__ = "0.1.0"
