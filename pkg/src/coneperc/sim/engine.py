"""Engine selection, episode driving, and survival estimation.

Two kernels exist (a per-generation count process for radius laws on
{0, 1}, and a general lazy-arena ball-growth engine), each in a compiled
and a pure-Python implementation. The compiled variant is selected at
import time when available; both consume the per-episode PCG64 stream
identically, so a given (config, master_seed) produces the same numbers
under either implementation.

Episode i draws from ``PCG64(SeedSequence(master_seed, spawn_key=(i,)))``,
which makes estimates reproducible regardless of execution order, chunking,
or worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..distributions import RadiusDistribution
from ..hetero import HeteroEnvironment
from . import _pycore
from .arena import GRAPHS, TreeArena, root_child_count
from .base import (
    CAP_HIT,
    FRONTIER_DIED,
    OUTCOME_BY_CODE,
    REACHED_DEPTH,
    EpisodeResult,
    StopPolicy,
    SurvivalEstimate,
    wilson_interval,
)

try:
    from . import _cycore
except ImportError:  # pure-Python fallback
    _cycore = None

__all__ = [
    "run_episode",
    "estimate_survival",
    "compiled_available",
    "episode_rng",
]

# below this many episodes the pool overhead outweighs the speedup
_MIN_PARALLEL_RUNS = 512


def compiled_available() -> bool:
    """True when the Cython kernels are importable."""
    return _cycore is not None


def episode_rng(master_seed, index: int) -> np.random.Generator:
    """Deterministic per-episode generator keyed by (master_seed, index)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class _DepthMap:
    """Total depth -> radius-law mapping (finite prefix + periodic tail)."""

    slots: tuple[RadiusDistribution, ...]
    prefix_len: int
    period_len: int

    @classmethod
    def from_source(cls, source) -> "_DepthMap":
        if isinstance(source, RadiusDistribution):
            return cls((source,), 0, 1)
        if isinstance(source, HeteroEnvironment):
            return cls(source.prefix + source.period,
                       source.prefix_len, source.period_len)
        raise TypeError(
            f"radius_source must be a RadiusDistribution or HeteroEnvironment, "
            f"got {type(source).__name__}"
        )

    @property
    def homogeneous(self) -> bool:
        return self.prefix_len == 0 and self.period_len == 1

    def dist_at(self, z: int) -> RadiusDistribution:
        if z < self.prefix_len:
            return self.slots[z]
        return self.slots[self.prefix_len
                          + (z - self.prefix_len) % self.period_len]


def _compiled_map(dmap: _DepthMap):
    families, geo_ps, offsets, lengths, tables = [], [], [], [], []
    cursor = 0
    for dist in dmap.slots:
        if dist.family == "geometric":
            families.append(1)
            geo_ps.append(dist.p)
            offsets.append(0)
            lengths.append(0)
        else:
            families.append(0)
            geo_ps.append(0.0)
            cdf = dist._cdf  # the exact table the Python sampler searches
            offsets.append(cursor)
            lengths.append(len(cdf))
            tables.append(cdf)
            cursor += len(cdf)
    concat = np.concatenate(tables) if tables else np.zeros(0)
    return _cycore.CompiledDepthMap(
        families, geo_ps, offsets, lengths, concat,
        dmap.prefix_len, dmap.period_len,
    )


@dataclass(frozen=True)
class _EngineSpec:
    """Picklable episode configuration handed to worker processes."""

    graph: str
    d: int
    source: object
    policy: StopPolicy
    depth_offset: int
    method: str
    impl: str

    def validate(self) -> None:
        if self.graph not in GRAPHS:
            raise ValueError(f"graph must be one of {GRAPHS}, got {self.graph!r}")
        if self.d < 2 or self.d != int(self.d):
            raise ValueError(f"branching number d={self.d} must be an integer >= 2")
        if self.depth_offset < 0:
            raise ValueError(f"depth_offset={self.depth_offset} must be >= 0")
        if self.depth_offset > 0 and self.graph != "tdplus":
            raise ValueError("depth_offset > 0 only makes sense on tdplus "
                             "(episodes start inside a one-ended subtree)")
        if self.method not in ("auto", "level", "arena"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.impl not in ("auto", "compiled", "python"):
            raise ValueError(f"unknown impl {self.impl!r}")


class _Engine:
    """Resolved kernel + prepared per-config state."""

    def __init__(self, spec: _EngineSpec):
        spec.validate()
        self.spec = spec
        dmap = _DepthMap.from_source(spec.source)
        self.dmap = dmap
        level_ok = dmap.homogeneous and dmap.slots[0].radius_at_most_one
        method = spec.method
        if method == "auto":
            method = "level" if level_ok else "arena"
        elif method == "level" and not level_ok:
            raise ValueError(
                "level kernel requires a homogeneous radius law on {0, 1}"
            )
        impl = spec.impl
        if impl == "auto":
            impl = "compiled" if compiled_available() else "python"
        elif impl == "compiled" and not compiled_available():
            raise RuntimeError("compiled kernels are not available")
        self.method = method
        self.impl = impl
        self.root_children = root_child_count(spec.graph, spec.d)
        if method == "level":
            self.spread_prob = 1.0 - dmap.slots[0].p0
        elif impl == "compiled":
            self.cmap = _compiled_map(dmap)
            self.cy_arena = _cycore.CyArena(spec.d, self.root_children)

    def run(self, rng: np.random.Generator) -> EpisodeResult:
        policy = self.spec.policy
        if self.method == "level":
            args = (self.spread_prob, self.root_children, self.spec.d,
                    policy.depth_target, policy.generation_cap,
                    policy.node_cap)
            if self.impl == "compiled":
                code, gens, informed, maxd = _cycore.level_episode(
                    rng.bit_generator, *args)
            else:
                code, gens, informed, maxd = _pycore.level_episode(rng, *args)
        else:
            if self.impl == "compiled":
                code, gens, informed, maxd = self.cy_arena.arena_episode(
                    self.cmap, rng.bit_generator, self.spec.depth_offset,
                    policy.depth_target, policy.generation_cap,
                    policy.node_cap)
            else:
                code, gens, informed, maxd = _pycore.arena_episode(
                    self.spec.graph, self.spec.d, self.dmap.dist_at, rng,
                    self.spec.depth_offset, policy.depth_target,
                    policy.generation_cap, policy.node_cap)
        return EpisodeResult(OUTCOME_BY_CODE[code], gens, informed, maxd)


def run_episode(graph, d, radius_source, policy, rng, *,
                depth_offset: int = 0, method: str = "auto",
                impl: str = "auto") -> EpisodeResult:
    """Run one ball-growth episode.

    The frontier starts at the origin; each generation draws one radius per
    frontier vertex (at the moment it spreads) and the newly informed
    vertices form the next frontier. Re-expanding older informed vertices
    would be idempotent, so processing only the frontier realizes the full
    informed-set recursion. Ends at the first satisfied stop condition.
    """
    spec = _EngineSpec(graph, int(d), radius_source, policy,
                       int(depth_offset), method, impl)
    return _Engine(spec).run(rng)


def _episode_block(spec: _EngineSpec, master_seed, lo: int, hi: int):
    engine = _Engine(spec)
    successes = 0
    cap_hits = 0
    for i in range(lo, hi):
        result = engine.run(episode_rng(master_seed, i))
        if result.outcome == REACHED_DEPTH:
            successes += 1
        elif result.outcome == CAP_HIT:
            successes += 1
            cap_hits += 1
    return successes, cap_hits


def estimate_survival(graph, d, radius_source, policy=None, *,
                      n_runs: int, master_seed, depth_offset: int = 0,
                      workers: int = 1, method: str = "auto",
                      impl: str = "auto") -> SurvivalEstimate:
    """Monte Carlo estimate of the survival probability.

    Runs ``n_runs`` independent episodes with per-episode streams derived
    from (master_seed, episode index); the result is bit-identical for any
    worker count or chunking. Cap hits count as survival in the point
    estimate and are reported in ``cap_hits``.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs={n_runs} must be >= 1")
    if workers < 1:
        raise ValueError(f"workers={workers} must be >= 1")
    policy = StopPolicy() if policy is None else policy
    spec = _EngineSpec(graph, int(d), radius_source, policy,
                       int(depth_offset), method, impl)
    _Engine(spec)  # validate configuration before forking workers

    if workers == 1 or n_runs < _MIN_PARALLEL_RUNS:
        successes, cap_hits = _episode_block(spec, master_seed, 0, n_runs)
    else:
        bounds = np.linspace(0, n_runs, workers + 1, dtype=int)
        jobs = [(spec, master_seed, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_episode_block_star, jobs))
        successes = sum(p[0] for p in parts)
        cap_hits = sum(p[1] for p in parts)

    ci_low, ci_high = wilson_interval(successes, n_runs)
    return SurvivalEstimate(
        point=successes / n_runs,
        ci_low=ci_low,
        ci_high=ci_high,
        n_runs=n_runs,
        cap_hits=cap_hits,
    )


def _episode_block_star(args):
    return _episode_block(*args)
