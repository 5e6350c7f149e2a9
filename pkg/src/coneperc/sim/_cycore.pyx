"""Compiled episode kernels.

Mirrors ``coneperc.sim._pycore`` draw for draw: one uniform per radius draw
in frontier order, one binomial per generation in the level kernel,
identical stop-rule ordering. Uniforms and binomials come from numpy's C
distribution library driven by a caller-supplied bit generator, so results
are bit-identical to the pure-Python kernels for the same PCG64 state.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport floor, log, log1p
from libc.stdint cimport int32_t, int64_t
from libc.string cimport memset

import numpy as np

from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport binomial_t, random_binomial


cdef bitgen_t *_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


def level_episode(bit_generator, double spread_prob, long root_children,
                  long d, long depth_target, long generation_cap,
                  long node_cap):
    """Radius-<=1 kernel: one binomial spreader count per generation."""
    cdef bitgen_t *bg = _bitgen(bit_generator)
    cdef binomial_t binom
    memset(&binom, 0, sizeof(binom))
    cdef int64_t z = 1, informed = 1, newly, s
    cdef long gen = 0, depth = 0
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
            s = random_binomial(bg, spread_prob, z, &binom)
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


cdef class CompiledDepthMap:
    """Depth-indexed radius laws flattened for C sampling.

    Finite-support laws carry their cumulative PMF (the same float64 table
    the Python sampler searches); geometric laws carry their parameter and
    sample by inversion. Depth z maps to slot z inside the prefix and
    cycles through the tail period beyond it.
    """
    cdef long prefix_len, period_len
    cdef long[::1] family        # 0 = finite cdf table, 1 = geometric
    cdef double[::1] geo_p
    cdef long[::1] off
    cdef long[::1] length
    cdef double[::1] cdf

    def __init__(self, families, geo_ps, offsets, lengths, cdf_concat,
                 long prefix_len, long period_len):
        self.family = np.ascontiguousarray(families, dtype=np.int64)
        self.geo_p = np.ascontiguousarray(geo_ps, dtype=np.float64)
        self.off = np.ascontiguousarray(offsets, dtype=np.int64)
        self.length = np.ascontiguousarray(lengths, dtype=np.int64)
        self.cdf = np.ascontiguousarray(cdf_concat, dtype=np.float64)
        self.prefix_len = prefix_len
        self.period_len = period_len

    cdef long sample(self, long z, double u):
        cdef long slot, o, n, k
        cdef double p
        if z < self.prefix_len:
            slot = z
        else:
            slot = self.prefix_len + (z - self.prefix_len) % self.period_len
        if self.family[slot] == 1:
            p = self.geo_p[slot]
            if p <= 0.0:
                return 0
            return <long>floor(log1p(-u) / log(p))
        o = self.off[slot]
        n = self.length[slot]
        k = 0
        while k < n and u >= self.cdf[o + k]:
            k += 1
        if k >= n:
            k = n - 1
        return k


cdef class CyArena:
    """Episode-only arena: every materialized node is informed, so the
    informed count equals the node count and no informed flags are kept.
    Buffers persist across episodes; ``arena_episode`` resets indices."""
    cdef long d, root_children, node_cap, n_nodes, cap_nodes
    cdef int32_t[::1] parent
    cdef int32_t[::1] depth
    cdef int64_t[::1] kids_off
    cdef int32_t[::1] stamp
    cdef long ball
    cdef int32_t[::1] kids
    cdef long kids_len, kids_cap
    cdef int32_t[::1] qnode
    cdef int32_t[::1] qdist
    cdef long q_cap
    cdef int32_t[::1] frontier
    cdef int32_t[::1] nxt
    cdef long frontier_cap, nxt_cap, frontier_len, nxt_len

    def __init__(self, long d, long root_children):
        self.d = d
        self.root_children = root_children
        self.cap_nodes = 4096
        self.parent = np.empty(self.cap_nodes, dtype=np.int32)
        self.depth = np.empty(self.cap_nodes, dtype=np.int32)
        self.kids_off = np.empty(self.cap_nodes, dtype=np.int64)
        self.stamp = np.empty(self.cap_nodes, dtype=np.int32)
        self.kids_cap = 4 * self.cap_nodes
        self.kids = np.empty(self.kids_cap, dtype=np.int32)
        self.q_cap = 4096
        self.qnode = np.empty(self.q_cap, dtype=np.int32)
        self.qdist = np.empty(self.q_cap, dtype=np.int32)
        self.frontier_cap = 1024
        self.nxt_cap = 1024
        self.frontier = np.empty(self.frontier_cap, dtype=np.int32)
        self.nxt = np.empty(self.nxt_cap, dtype=np.int32)

    cdef void _grow_nodes(self):
        cdef long new_cap = self.cap_nodes * 2
        parent = np.empty(new_cap, dtype=np.int32)
        parent[:self.cap_nodes] = np.asarray(self.parent)
        self.parent = parent
        depth = np.empty(new_cap, dtype=np.int32)
        depth[:self.cap_nodes] = np.asarray(self.depth)
        self.depth = depth
        kids_off = np.empty(new_cap, dtype=np.int64)
        kids_off[:self.cap_nodes] = np.asarray(self.kids_off)
        self.kids_off = kids_off
        stamp = np.empty(new_cap, dtype=np.int32)
        stamp[:self.cap_nodes] = np.asarray(self.stamp)
        self.stamp = stamp
        self.cap_nodes = new_cap

    cdef void _grow_kids(self, long needed):
        cdef long new_cap = self.kids_cap
        while new_cap < needed:
            new_cap *= 2
        kids = np.empty(new_cap, dtype=np.int32)
        kids[:self.kids_len] = np.asarray(self.kids)[:self.kids_len]
        self.kids = kids
        self.kids_cap = new_cap

    cdef void _grow_queue(self, long needed):
        cdef long new_cap = self.q_cap
        while new_cap < needed:
            new_cap *= 2
        qnode = np.empty(new_cap, dtype=np.int32)
        qnode[:self.q_cap] = np.asarray(self.qnode)
        self.qnode = qnode
        qdist = np.empty(new_cap, dtype=np.int32)
        qdist[:self.q_cap] = np.asarray(self.qdist)
        self.qdist = qdist
        self.q_cap = new_cap

    cdef void _grow_nxt(self):
        cdef long new_cap = self.nxt_cap * 2
        nxt = np.empty(new_cap, dtype=np.int32)
        nxt[:self.nxt_len] = np.asarray(self.nxt)[:self.nxt_len]
        self.nxt = nxt
        self.nxt_cap = new_cap

    cdef long _new_node(self, long parent):
        if self.n_nodes >= self.cap_nodes:
            self._grow_nodes()
        cdef long idx = self.n_nodes
        self.parent[idx] = <int32_t>parent
        self.depth[idx] = self.depth[parent] + 1
        self.kids_off[idx] = -1
        self.stamp[idx] = 0
        self.n_nodes += 1
        return idx

    cdef int64_t _alloc_kids(self, long v, long deg):
        if self.kids_len + deg > self.kids_cap:
            self._grow_kids(self.kids_len + deg)
        cdef int64_t off = self.kids_len
        cdef long s
        for s in range(deg):
            self.kids[off + s] = -1
        self.kids_off[v] = off
        self.kids_len += deg
        return off

    cdef long _expand(self, long u, long r, long depth_target, long *maxd):
        """BFS ball; appends fresh nodes to ``nxt``. Returns -1 to keep
        going, 0 on reaching the depth target, 2 on hitting the node cap."""
        cdef long head = 0, qlen = 0
        cdef long v, dist, nd, pv, deg, s, c
        cdef int64_t koff
        self.ball += 1
        cdef int32_t bid = <int32_t>self.ball
        self.stamp[u] = bid
        self.qnode[0] = <int32_t>u
        self.qdist[0] = 0
        qlen = 1
        while head < qlen:
            v = self.qnode[head]
            dist = self.qdist[head]
            head += 1
            if dist == r:
                continue
            nd = dist + 1
            pv = self.parent[v]
            if pv >= 0 and self.stamp[pv] != bid:
                self.stamp[pv] = bid
                # parent is already informed (ancestor-closed informed set)
                if qlen >= self.q_cap:
                    self._grow_queue(qlen + 1)
                self.qnode[qlen] = <int32_t>pv
                self.qdist[qlen] = <int32_t>nd
                qlen += 1
            deg = self.root_children if v == 0 else self.d
            koff = self.kids_off[v]
            if koff < 0:
                koff = self._alloc_kids(v, deg)
            for s in range(deg):
                c = self.kids[koff + s]
                if c < 0:
                    c = self._new_node(v)
                    self.kids[koff + s] = <int32_t>c
                    self.stamp[c] = bid
                    if self.nxt_len >= self.nxt_cap:
                        self._grow_nxt()
                    self.nxt[self.nxt_len] = <int32_t>c
                    self.nxt_len += 1
                    if self.depth[c] > maxd[0]:
                        maxd[0] = self.depth[c]
                    if self.depth[c] >= depth_target:
                        return 0
                    if self.n_nodes > self.node_cap:
                        return 2
                    if qlen >= self.q_cap:
                        self._grow_queue(qlen + 1)
                    self.qnode[qlen] = <int32_t>c
                    self.qdist[qlen] = <int32_t>nd
                    qlen += 1
                elif self.stamp[c] != bid:
                    self.stamp[c] = bid
                    if qlen >= self.q_cap:
                        self._grow_queue(qlen + 1)
                    self.qnode[qlen] = <int32_t>c
                    self.qdist[qlen] = <int32_t>nd
                    qlen += 1
        return -1

    def arena_episode(self, CompiledDepthMap env, bit_generator,
                      long depth_offset, long depth_target,
                      long generation_cap, long node_cap):
        """Run one episode; returns (code, generations, informed, max_depth)."""
        cdef bitgen_t *bg = _bitgen(bit_generator)
        self.node_cap = node_cap
        # reset: node 0 is the informed origin
        self.n_nodes = 1
        self.parent[0] = -1
        self.depth[0] = 0
        self.kids_off[0] = -1
        self.stamp[0] = 0
        self.kids_len = 0
        self.ball = 0
        self.frontier[0] = 0
        self.frontier_len = 1
        cdef long gens = 0, maxd = 0, stop, fi, u, r
        cdef double u01
        cdef int32_t[::1] tmp
        cdef long tmp_cap
        while True:
            if self.frontier_len == 0:
                return 1, gens, self.n_nodes, maxd
            if gens >= generation_cap:
                return 2, gens, self.n_nodes, maxd
            gens += 1
            self.nxt_len = 0
            stop = -1
            for fi in range(self.frontier_len):
                u = self.frontier[fi]
                u01 = bg.next_double(bg.state)
                r = env.sample(depth_offset + self.depth[u], u01)
                if r <= 0:
                    continue
                stop = self._expand(u, r, depth_target, &maxd)
                if stop >= 0:
                    break
            if stop >= 0:
                return stop, gens, self.n_nodes, maxd
            tmp = self.frontier
            self.frontier = self.nxt
            self.nxt = tmp
            tmp_cap = self.frontier_cap
            self.frontier_cap = self.nxt_cap
            self.nxt_cap = tmp_cap
            self.frontier_len = self.nxt_len
