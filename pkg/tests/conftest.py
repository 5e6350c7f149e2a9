"""Shared helpers: random law generators and independent graph oracles."""
import math

import numpy as np

from coneperc import RadiusDistribution


def random_engine_dist(rng: np.random.Generator) -> RadiusDistribution:
    """Random radius law with 0 < P[R=0] < 1 (valid for every analysis op)."""
    family = rng.choice(["bernoulli", "geometric", "binomial", "pmf"])
    if family == "bernoulli":
        return RadiusDistribution.bernoulli(rng.uniform(0.05, 0.95))
    if family == "geometric":
        return RadiusDistribution.geometric(rng.uniform(0.02, 0.6))
    if family == "binomial":
        return RadiusDistribution.binomial(int(rng.integers(1, 7)),
                                           rng.uniform(0.05, 0.95))
    size = int(rng.integers(2, 7))
    weights = rng.uniform(0.05, 1.0, size=size)
    return RadiusDistribution.explicit(weights / weights.sum())


def arena_adjacency(arena):
    """Adjacency of the materialized arena, built only from public fields."""
    adj = {u: [] for u in range(arena.num_nodes)}
    for u in range(arena.num_nodes):
        for slot in range(arena.child_count(u)):
            c = arena.child_id(u, slot)
            if c is not None:
                adj[u].append(c)
                adj[c].append(u)
    return adj


def bfs_distances(adj, source):
    """Plain BFS distances; the oracle for ball-membership checks."""
    dist = {source: 0}
    queue = [source]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def three_sigma(p: float, n: int) -> float:
    return 3.0 * math.sqrt(max(p * (1.0 - p), 1e-12) / n)
