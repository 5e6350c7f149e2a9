"""Lazily materialized rooted view of the tree for ball-growth episodes.

The arena roots the tree at the origin: the origin has d+1 child slots on
the full tree ("td") and d on the pruned tree ("tdplus"); every other node
has its parent plus d child slots. Children are materialized on first
touch, so memory tracks the informed set rather than the (infinite) tree.
Balls are undirected: expansion walks through the parent as well as the
children.
"""
from __future__ import annotations

__all__ = ["TreeArena", "NodeCapReached", "GRAPHS", "root_child_count"]

GRAPHS = ("td", "tdplus")


def root_child_count(graph: str, d: int) -> int:
    if graph not in GRAPHS:
        raise ValueError(f"graph must be one of {GRAPHS}, got {graph!r}")
    return d + 1 if graph == "td" else d


class NodeCapReached(RuntimeError):
    """Ball expansion hit the arena node cap (episode drivers report cap_hit)."""


class TreeArena:
    """Growable node store with per-ball breadth-first expansion.

    Nodes are integer ids; the origin is node 0 and is informed from the
    start. The compiled kernel mirrors `_expand` exactly (visit order:
    parent first, then child slots in order), so any change here must be
    applied there as well.
    """

    def __init__(self, graph: str = "td", d: int = 2, node_cap: int | None = None):
        if d < 2 or d != int(d):
            raise ValueError(f"branching number d={d} must be an integer >= 2")
        self.graph = graph
        self.d = int(d)
        self.root_children = root_child_count(graph, self.d)
        self.node_cap = node_cap
        self.parent = [-1]
        self.depth = [0]
        self.slot_in_parent = [-1]
        self.informed = [True]
        self.informed_count = 1
        self._kids: list[list[int] | None] = [None]
        self._stamp = [0]
        self._ball = 0

    @property
    def num_nodes(self) -> int:
        return len(self.parent)

    def child_count(self, u: int) -> int:
        return self.root_children if u == 0 else self.d

    def child_id(self, u: int, slot: int) -> int | None:
        """Materialized child in the given slot, or None."""
        kids = self._kids[u]
        if kids is None or kids[slot] < 0:
            return None
        return kids[slot]

    def path_key(self, u: int) -> tuple[int, ...]:
        """Slot path from the origin; a structural id independent of
        materialization order (used for common-random-number coupling)."""
        slots = []
        while u != 0:
            slots.append(self.slot_in_parent[u])
            u = self.parent[u]
        return tuple(reversed(slots))

    def _new_node(self, parent: int, slot: int) -> int:
        idx = len(self.parent)
        self.parent.append(parent)
        self.depth.append(self.depth[parent] + 1)
        self.slot_in_parent.append(slot)
        self.informed.append(False)
        self._kids.append(None)
        self._stamp.append(0)
        return idx

    def expand_ball(self, u: int, r: int) -> list[int]:
        """Inform everything within distance r of the (informed) node u.

        Returns exactly the newly informed node ids, in breadth-first
        discovery order; r = 0 informs nobody new. Raises
        :class:`NodeCapReached` if materialization would exceed the cap
        (the partially expanded ball stays recorded).
        """
        if not 0 <= u < self.num_nodes:
            raise ValueError(f"node {u} is not materialized")
        if not self.informed[u]:
            raise ValueError(f"node {u} is not informed")
        newly, _, _, capped = self._expand(u, int(r), None)
        if capped:
            raise NodeCapReached(
                f"node cap {self.node_cap} exceeded while expanding a "
                f"radius-{r} ball around node {u}"
            )
        return newly

    def _expand(self, u, r, depth_stop):
        """Shared BFS core; returns (newly, max_new_depth, reached, capped).

        ``depth_stop`` aborts as soon as a node at that depth is informed
        (episode drivers' depth target); the cap aborts mid-ball, so a
        single huge-radius ball cannot blow past the node budget.
        """
        newly: list[int] = []
        maxd = -1
        if r <= 0:
            return newly, maxd, False, False
        self._ball += 1
        bid = self._ball
        stamp = self._stamp
        parent = self.parent
        depth = self.depth
        informed = self.informed
        cap = self.node_cap
        stamp[u] = bid
        queue = [(u, 0)]
        head = 0
        while head < len(queue):
            v, dist = queue[head]
            head += 1
            if dist == r:
                continue
            nd = dist + 1
            pv = parent[v]
            if pv >= 0 and stamp[pv] != bid:
                stamp[pv] = bid
                if not informed[pv]:
                    informed[pv] = True
                    self.informed_count += 1
                    newly.append(pv)
                    if depth[pv] > maxd:
                        maxd = depth[pv]
                    if depth_stop is not None and depth[pv] >= depth_stop:
                        return newly, maxd, True, False
                queue.append((pv, nd))
            kids = self._kids[v]
            if kids is None:
                kids = [-1] * self.child_count(v)
                self._kids[v] = kids
            for slot in range(len(kids)):
                c = kids[slot]
                if c < 0:
                    c = self._new_node(v, slot)
                    kids[slot] = c
                    stamp[c] = bid
                    informed[c] = True
                    self.informed_count += 1
                    newly.append(c)
                    if depth[c] > maxd:
                        maxd = depth[c]
                    if depth_stop is not None and depth[c] >= depth_stop:
                        return newly, maxd, True, False
                    if cap is not None and self.num_nodes > cap:
                        return newly, maxd, False, True
                    queue.append((c, nd))
                elif stamp[c] != bid:
                    stamp[c] = bid
                    if not informed[c]:
                        informed[c] = True
                        self.informed_count += 1
                        newly.append(c)
                        if depth[c] > maxd:
                            maxd = depth[c]
                        if depth_stop is not None and depth[c] >= depth_stop:
                            return newly, maxd, True, False
                    queue.append((c, nd))
        return newly, maxd, False, False
