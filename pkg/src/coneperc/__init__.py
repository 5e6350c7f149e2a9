"""Cone percolation on homogeneous trees.

Each informed vertex informs every vertex within its random radius of
influence, once, then goes quiet. This package computes whether the rumour
reaches infinitely many vertices: exact mean criteria and fixed-point
survival bounds, Monte Carlo estimation of the true dynamics, and
supercriticality certificates for depth-dependent radius laws.
"""
from .bounds import (
    DIES_OUT,
    INCONCLUSIVE,
    SURVIVES,
    SurvivalBounds,
    Verdict,
    bernoulli_exact,
    classify_plus,
    survival_bounds_full,
    survival_bounds_plus,
)
from .distributions import DistSpecError, RadiusDistribution, parse_dist
from .gf import (
    LOWER,
    UPPER,
    FixedPointError,
    FixedPointResult,
    GeneratingFunction,
    extinction_by_generation,
    smallest_fixed_point,
)
from .hetero import (
    CertificationReport,
    CertificationWindowError,
    HeteroEnvironment,
    certify_survival,
    certify_survival_sweep,
    crossing_lower_bound,
    load_environment,
    mean_lower_bound,
    parse_environment,
)
from .sim import (
    CAP_HIT,
    FRONTIER_DIED,
    REACHED_DEPTH,
    EpisodeResult,
    NodeCapReached,
    StopPolicy,
    SurvivalEstimate,
    TreeArena,
    compiled_available,
    episode_rng,
    estimate_survival,
    run_episode,
    wilson_interval,
)

__version__ = "0.1.0"
