"""derivd: storage-vs-computation accounting for knowledge systems.

Library layers: kb (Horn rules, depth, decomposition), metrics (entropies
and content), thermo (energy and cost formulas), workload (distributions,
streams), policies (caches and selectors), simulator (stream replay and
sweeps), experiments (reports and calculators).
"""

__version__ = "0.1.0"

from .kb import (  # noqa: F401
    DerivationResult,
    HornRule,
    KBConstructionError,
    KnowledgeBase,
    Query,
    atomic_decomposition,
    forward_closure,
    generate_kb,
    is_derivable,
    kb_from_text,
    kb_to_text,
    load_kb,
    logical_depth,
    proof_tree_atoms,
    sample_queries,
    save_kb,
)
from .metrics import (  # noqa: F401
    BoundsCheck,
    ContentEstimate,
    InfoModel,
    bits_to_nats,
    derivation_bounds_check,
    derivation_entropy,
    mutual_info,
    nats_to_bits,
    residual_content,
    semantic_content,
    shannon_entropy,
    storage_efficiency,
)
from .plan import EMPTY_PLAN, StoragePlan, make_plan  # noqa: F401
from .policies import (  # noqa: F401
    FreqDepthCache,
    LFUCache,
    LRUCache,
    PolicyKind,
    RoutingDecision,
    StepResult,
    cache_step,
    make_cache,
    plan_from_atoms,
    plan_from_queries,
    route_query,
    stratify_queries,
    threshold_decide,
    top_frequency_plan,
    truemi_select,
)
from .simulator import (  # noqa: F401
    SimConfig,
    SimMetrics,
    SweepResult,
    detect_transition,
    run_stream,
    sweep_storage,
)
from .thermo import (  # noqa: F401
    CapacityBounds,
    CostBreakdown,
    CostWeights,
    MultiQueryCost,
    ThermoParams,
    TrialityResult,
    amortized_access_cost,
    amortized_lower_bound,
    capacity_bounds,
    critical_frequency,
    critical_storage,
    entropy_production_min,
    landauer_compute_energy,
    multi_query_costs,
    phase_alpha_critical,
    storage_maintenance_energy,
    triality_check,
    weighted_strategy_cost,
)
from .workload import (  # noqa: F401
    QueryDistribution,
    WorkloadSpec,
    build_distribution,
    sample_stream,
    zipf_weights,
)
