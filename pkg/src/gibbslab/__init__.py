"""Query-model laboratory for Gibbs states and partition-function estimation.

Submodules:
    statevector  dense simulation primitives and the query ledger
    gibbs        bit-string Hamiltonians, partition functions, overlaps
    stateprep    fixed-point search, Gibbs preparation, reflections
    estimators   reflection-counted and sample-counted weight estimators
    bounds       closed-form bound expressions and feasibility checks
    harness      experiment driver with CSV/JSON output
"""

from . import bounds, errors, estimators, gibbs, harness, statevector, stateprep
from .bounds import (
    BoundReport,
    chernoff_tails,
    classical_instance_conditions,
    corollary_bound,
    hamming_query_bound,
    reflection_bound_summary,
    separation_margin,
)
from .estimators import (
    AmplificationPlan,
    CoinVerdict,
    DistinguishResult,
    EstimateResult,
    WeightVerdict,
    biased_coin_distinguish,
    classical_estimate_z,
    hamming_distinguish_quantum,
    quantum_estimate_z,
)
from .gibbs import (
    INFINITY,
    BitStringInstance,
    GibbsModel,
    PairedInstance,
    build_instance,
    gibbs_distribution,
    gibbs_state_exact,
    hamiltonian_eval,
    overlap_wrong_weight_closed,
    partition_function_bruteforce,
    partition_function_closed,
)
from .harness import ExperimentConfig, SweepResult, fit_loglog_slope, run_experiment
from .statevector import (
    QueryLedger,
    StateVector,
    apply_marked_phase_flip,
    apply_reflection_about,
    inner_product,
    init_uniform,
    measure_sample,
    trial_rng,
)
from .stateprep import (
    PhaseSchedule,
    PrepSpec,
    fixed_point_phase_schedule,
    fixed_point_search,
    prepare_gibbs,
    reflect_through_gibbs,
)

__version__ = "0.1.0"
