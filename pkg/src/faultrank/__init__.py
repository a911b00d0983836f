"""Bayesian ranking of failure-inducing factor-level combinations from
combinatorial test outcomes."""

from .classify import Category, Partition, category_of, classify_combinations
from .covers import (
    CoverCollection,
    Incidence,
    brute_force_minimal_covers,
    build_incidence,
    enumerate_minimal_covers,
)
from .design import CoverageReport, simulate_outcomes, simulate_suite, verify_coverage_strength
from .model import (
    Combination,
    FactorSpace,
    InconsistentData,
    PriorSpec,
    RootCauseScenario,
    TestSuite,
    combination_space_size,
    contains,
    enumerate_combinations,
    prior_probability,
)
from .posterior import (
    PosteriorEntry,
    brute_force_posterior,
    posterior_probability,
    prob_explained,
    rank_root_causes,
)

__version__ = "0.1.0"
