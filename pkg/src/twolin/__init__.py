"""Two-part dynamic linear benchmark and two-dimensional drift analysis.

A bit string is split into a left and a right part; two linear fitness
functions put the heavy weight n on one part each, and every generation the
(1+1)-EA selects according to one of them at random. The toolkit provides
the exact closed-form drift matrix of the zero-count pair, its eigen-based
efficiency classifier, exact per-state drift computations with independent
oracles, and seeded simulation for reproducing the efficiency phase
transition in the mutation strength.
"""
from .params import Params, State, split_point
from .environment import BitString, Env, compare, draw_environment, fitness
from .drift_matrix import (
    DegenerateMatrixError,
    DriftMatrix,
    EigenSystem,
    Verdict,
    build_matrix,
    classify,
    classifier_sign_changes,
    eigen_analysis,
    symmetric_threshold,
)
from .ea import (
    AllZerosStart,
    ExplicitStart,
    RunConfig,
    TotalZerosStart,
    Trajectory,
    UniformStart,
    batch_run,
    batch_summary,
    mutate,
    reference_run,
    run,
    run_hit_only,
    wilson_interval,
)
from .exact_drift import (
    ConditionalDriftTable,
    DriftVector,
    brute_force_drift,
    check_domination,
    conditional_drift,
    conformance_report,
    drift_table,
    exact_drift,
    mc_drift,
    multiflip_contribution,
    multiflip_flip_bound,
)
from .potential import (
    Potential,
    build_potential,
    expected_potential_after_step,
    potential_drift_check,
    step_tail_diagnostic,
    y_statistic,
    y_summary,
)
from .experiments import (
    SweepConfig,
    SweepResult,
    asymmetric_spotcheck,
    scaling_fit,
    sweep,
    threshold_crossing,
)

__version__ = "0.1.0"
