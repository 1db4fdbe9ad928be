"""Simulation, exact computation and verification for the labeled coupon
collector with pair drawings."""
from .exact import ClassState, ExactExpectations, exact_expected_times, transition_distribution
from .oracle import DrawLog, KnowledgeVariant, check_rule_equivalence, count_consistent_bijections, deducible
from .rng import StreamRng
from .simulator import (
    ClassicRecord,
    ExperimentConfig,
    RunRecord,
    run_experiment,
    sample_group,
    simulate_classic_from_k,
    simulate_labeled_run,
    simulate_pair_remaining,
)
from .stats import (
    EstimateSummary,
    SeedSpec,
    TheoryValues,
    ci,
    classic_expected_remaining,
    derive_stream_seed,
    harmonic,
    merge_estimates,
    theory_values,
    update_estimate,
)
from .tracker import ComponentTracker, new_tracker

__version__ = "0.1.0"
