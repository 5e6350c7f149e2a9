"""Monte Carlo simulation of the ball-growth dynamics on lazy trees."""
from .arena import GRAPHS, NodeCapReached, TreeArena, root_child_count
from .base import (
    CAP_HIT,
    FRONTIER_DIED,
    REACHED_DEPTH,
    EpisodeResult,
    StopPolicy,
    SurvivalEstimate,
    wilson_interval,
)
from .engine import compiled_available, episode_rng, estimate_survival, run_episode

__all__ = [
    "GRAPHS",
    "NodeCapReached",
    "TreeArena",
    "root_child_count",
    "CAP_HIT",
    "FRONTIER_DIED",
    "REACHED_DEPTH",
    "EpisodeResult",
    "StopPolicy",
    "SurvivalEstimate",
    "wilson_interval",
    "compiled_available",
    "episode_rng",
    "estimate_survival",
    "run_episode",
]
