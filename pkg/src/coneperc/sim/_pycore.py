"""Pure-Python episode kernels (reference implementation and fallback).

The compiled kernels in ``_cycore`` mirror these draw for draw: one uniform
per radius draw in frontier order, one binomial per generation in the level
kernel, identical stop-rule ordering. Any change to draw order must be
applied to both.
"""
from __future__ import annotations

from .arena import TreeArena

# Return codes shared with the compiled kernels:
# 0 = reached depth target, 1 = frontier died, 2 = cap hit.


def level_episode(rng, spread_prob, root_children, d,
                  depth_target, generation_cap, node_cap):
    """Episode kernel for radius laws supported on {0, 1}.

    A radius-1 ball informs only the parent (already informed) and the
    children, so sibling subtrees never interact and the per-generation
    frontier count is a sufficient statistic: one binomial draw per
    generation replaces the per-vertex expansion, with the same joint law
    of (outcome, generations, max depth). Informed counts are generation
    atomic here, whereas the arena kernel stops mid-generation at the depth
    target; count laws agree on episodes that run their final generation to
    completion (died or generation-capped ones).
    """
    z = 1
    informed = 1
    gen = 0
    depth = 0
    while True:
        if z == 0:
            return 1, gen, informed, depth
        if gen >= generation_cap:
            return 2, gen, informed, depth
        gen += 1
        if spread_prob <= 0.0:
            s = 0
        elif spread_prob >= 1.0:
            s = z
        else:
            s = int(rng.binomial(z, spread_prob))
        newly = s * (root_children if depth == 0 else d)
        if newly == 0:
            z = 0
            continue
        informed += newly
        depth += 1
        z = newly
        if depth >= depth_target:
            return 0, gen, informed, depth
        if informed > node_cap:
            return 2, gen, informed, depth


def arena_episode(graph, d, dist_at, rng, depth_offset,
                  depth_target, generation_cap, node_cap):
    """General episode kernel: explicit ball growth on a lazy arena.

    ``dist_at`` maps absolute depth to a radius law. Radii are drawn at
    spread time, one per frontier vertex in frontier order.
    """
    arena = TreeArena(graph, d, node_cap=node_cap)
    frontier = [0]
    gens = 0
    maxd = 0
    while True:
        if not frontier:
            return 1, gens, arena.informed_count, maxd
        if gens >= generation_cap:
            return 2, gens, arena.informed_count, maxd
        gens += 1
        nxt = []
        stop = -1
        for u in frontier:
            r = dist_at(depth_offset + arena.depth[u]).sample(rng)
            if r <= 0:
                continue
            newly, ball_maxd, reached, capped = arena._expand(
                u, r, depth_target
            )
            nxt.extend(newly)
            if ball_maxd > maxd:
                maxd = ball_maxd
            if reached:
                stop = 0
                break
            if capped:
                stop = 2
                break
        if stop >= 0:
            return stop, gens, arena.informed_count, maxd
        frontier = nxt
