"""Hot all-pairs shortest-path kernels over CSR adjacency.

The same source functions run in two modes:

* JIT-compiled with numba (default, when numba is importable), or
* as plain python/numpy, selected by setting ``NETMECH_NUMBA=0``.

``benchmarks/bench_kernels.py`` compares the two paths.

Determinism: node extraction breaks distance ties by smallest node index,
predecessor updates break equal-length ties by smallest edge id, so repeated
runs (and both execution modes) produce identical predecessor trees.
"""
from __future__ import annotations

import os

import numpy as np

INF = np.inf


def _identity_jit(func=None, **kwargs):
    if func is None:
        return lambda f: f
    return func


NUMBA_ENABLED = False
if os.environ.get("NETMECH_NUMBA", "1") != "0":
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is normally installed
        _njit = _identity_jit
else:
    _njit = _identity_jit


def _dijkstra_all_impl(indptr, nbr, wt, eid, n):
    """All-pairs Dijkstra on an undirected CSR graph.

    Returns (dist, pred) where pred[s, v] is the id of the edge entering v
    on the shortest path from s, or -1 for the source / unreachable nodes.
    O(n^2) node extraction per source; the networks here are small and the
    quadratic scan keeps tie-breaking exact and branch-free of heap order.
    """
    dist = np.full((n, n), INF)
    pred = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        d = dist[s]
        p = pred[s]
        d[s] = 0.0
        done = np.zeros(n, dtype=np.bool_)
        for _ in range(n):
            u = -1
            best = INF
            for v in range(n):
                if not done[v] and d[v] < best:
                    best = d[v]
                    u = v
            if u < 0:
                break
            done[u] = True
            for k in range(indptr[u], indptr[u + 1]):
                v = nbr[k]
                nd = d[u] + wt[k]
                if nd < d[v]:
                    d[v] = nd
                    p[v] = eid[k]
                elif nd == d[v] and eid[k] < p[v]:
                    p[v] = eid[k]
    return dist, pred


def _region_lengths_impl(pred, dist, e_other, e_from, e_len, e_ra, e_rb, n_regions):
    """Per-region path lengths along the predecessor trees.

    For every (source, target) pair with a finite distance, walks the
    predecessor chain and credits each edge's length half to each endpoint
    region (a full credit when both endpoints share a region).
    """
    n = pred.shape[0]
    out = np.zeros((n, n, n_regions))
    for s in range(n):
        for t in range(n):
            if t == s or dist[s, t] == INF:
                continue
            v = t
            while v != s:
                e = pred[s, v]
                out[s, t, e_ra[e]] += 0.5 * e_len[e]
                out[s, t, e_rb[e]] += 0.5 * e_len[e]
                if e_from[e] == v:
                    v = e_other[e]
                else:
                    v = e_from[e]
    return out


dijkstra_all = _njit(cache=True)(_dijkstra_all_impl)
region_lengths = _njit(cache=True)(_region_lengths_impl)

# Uncompiled references kept for equivalence tests and benchmarks.
dijkstra_all_py = _dijkstra_all_impl
region_lengths_py = _region_lengths_impl
