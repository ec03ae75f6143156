"""lacdisc: lacunary (binary-shift) point sets, exact star discrepancy,
bracketing covers with dyadic snapping, probabilistic discrepancy bounds,
and a Monte Carlo verification harness."""

from .bounds import (
    AuditReport,
    BoundParams,
    BudgetReport,
    ChainInfeasibleError,
    TheoremBound,
    bernstein_tail,
    ceil_log2,
    chaining_depth,
    constants,
    constants_audit,
    derived_tail_constants,
    hnww_bound,
    kappa,
    layer_tail_bound,
    layer_thresholds,
    modulo_classes,
    theorem_bound,
    union_budget,
)
from .covers import (
    Bracket,
    BracketingCover,
    ChainingDecomposition,
    build_base_cover,
    build_chain,
    cover_cardinality_bound,
    dyadic_snap,
    explicit_cover,
    probe_cover,
)
from .discrepancy import (
    DiscrepancyBounds,
    GridBudgetExceeded,
    LocalDiscrepancy,
    box_count,
    bracket_bounds,
    critical_grid_size,
    exact_star_discrepancy,
    local_discrepancy,
    star_discrepancy_1d,
)
from .harness import (
    BitCostReport,
    ExceedanceEstimate,
    ExperimentConfig,
    InfeasibleInstanceError,
    TrialRecord,
    bitcost_report,
    clopper_pearson,
    exceedance_ci,
    records_to_csv,
    run_trials,
    scaling_study,
)
from .independence import (
    EnumerationGuardExceeded,
    JointDistribution,
    LayerFunction,
    exact_joint,
    exact_joint_kwise,
    factorization_gap,
    kwise_factorization_gap,
)
from .points import (
    DyadicCoord,
    PointSet,
    SeedBits,
    derive_seed,
    from_fractions,
    generate_iid,
    generate_lacunary,
    read_points_csv,
    write_points_csv,
)

__version__ = "0.1.0"
