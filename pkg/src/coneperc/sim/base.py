"""Stop policy, episode outcomes, and estimate types shared by all engines."""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "REACHED_DEPTH",
    "FRONTIER_DIED",
    "CAP_HIT",
    "OUTCOME_BY_CODE",
    "StopPolicy",
    "EpisodeResult",
    "SurvivalEstimate",
    "wilson_interval",
]

REACHED_DEPTH = "reached_depth"
FRONTIER_DIED = "frontier_died"
CAP_HIT = "cap_hit"

# Kernel return codes (shared with the compiled module).
OUTCOME_BY_CODE = (REACHED_DEPTH, FRONTIER_DIED, CAP_HIT)


@dataclass(frozen=True)
class StopPolicy:
    """Finite stopping proxy for the infinite-survival event.

    ``depth_target`` is the primary proxy (survival forces unbounded depth);
    the generation and node caps are guards against runaway episodes. Cap
    hits are reported separately and counted as survival by the estimator,
    since a process that large is overwhelmingly a survivor.
    """

    depth_target: int = 40
    generation_cap: int = 160  # 4 * default depth target
    node_cap: int = 2**22

    def __post_init__(self):
        for name in ("depth_target", "generation_cap", "node_cap"):
            value = getattr(self, name)
            if value != int(value) or value < 1:
                raise ValueError(f"{name}={value} must be an integer >= 1")
        if self.node_cap > 2**31 - 64:
            raise ValueError("node_cap too large for 32-bit node ids")


@dataclass(frozen=True)
class EpisodeResult:
    """Outcome of a single ball-growth episode."""

    outcome: str
    generations_run: int
    informed_count: int
    max_depth: int


@dataclass(frozen=True)
class SurvivalEstimate:
    """Point estimate of the survival probability with a 95% Wilson interval.

    ``cap_hits`` are counted as successes in ``point`` (documented upward
    bias knob); they are reported so callers can bound the distortion.
    """

    point: float
    ci_low: float
    ci_high: float
    n_runs: int
    cap_hits: int


_Z95 = 1.959963984540054  # Phi^{-1}(0.975)


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError(f"sample size {n} must be >= 1")
    if not 0 <= successes <= n:
        raise ValueError(f"successes {successes} outside 0..{n}")
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)
