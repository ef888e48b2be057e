"""Compare the compiled and plain-python shortest-path kernels.

Usage: python benchmarks/bench_kernels.py [--sizes 20,40,80] [--repeat 3]

Generates random connected rail networks, times the all-pairs kernel and
the per-region path-length walk in both execution modes, and prints a
table with the speedup. Run with NETMECH_NUMBA=0 to confirm the fallback
is what the package actually uses when numba is disabled.
"""
import argparse
import time

import numpy as np

from netmech import _kernels
from netmech.network import CityNode, Mode, NetEdge, _csr_arrays, build_network


def make_network(n: int, seed: int):
    rng = np.random.default_rng(seed)
    cities = [
        CityNode(f"N{i}", f"R{i % 4}", {Mode.RAIL: 1.0}, 1e5) for i in range(n)
    ]
    edges = [
        NetEdge(f"E{i}", f"N{i}", f"N{i + 1}", Mode.RAIL,
                length=float(rng.integers(10, 200)), speed=148.0)
        for i in range(n - 1)
    ]
    extra = n * 2
    k = len(edges)
    while k < n - 1 + extra:
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        edges.append(
            NetEdge(f"E{k}", f"N{i}", f"N{j}", Mode.RAIL,
                    length=float(rng.integers(10, 200)), speed=148.0)
        )
        k += 1
    return build_network(cities, edges)


def bench_once(net, repeat: int):
    usable = net.traversable(Mode.RAIL)
    node_of, edges, indptr, nbr, wt, eid = _csr_arrays(net, usable)
    n = len(node_of)
    region_of = net.region_index()
    e_from = np.array([node_of[e.u] for e in edges], dtype=np.int64)
    e_other = np.array([node_of[e.v] for e in edges], dtype=np.int64)
    e_len = np.array([e.length for e in edges])
    e_ra = np.array([region_of[net.city(e.u).region] for e in edges], dtype=np.int64)
    e_rb = np.array([region_of[net.city(e.v).region] for e in edges], dtype=np.int64)

    def run(dijkstra, lengths):
        start = time.perf_counter()
        for _ in range(repeat):
            dist, pred = dijkstra(indptr, nbr, wt, eid, n)
            lengths(pred, dist, e_other, e_from, e_len, e_ra, e_rb, len(region_of))
        return (time.perf_counter() - start) / repeat

    # warm-up triggers JIT compilation outside the timed region
    _kernels.dijkstra_all(indptr, nbr, wt, eid, n)
    compiled = run(_kernels.dijkstra_all, _kernels.region_lengths)
    python = run(_kernels.dijkstra_all_py, _kernels.region_lengths_py)
    return compiled, python


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="20,40,80")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    mode = "numba" if _kernels.NUMBA_ENABLED else "python-only"
    print(f"kernel mode: {mode}")
    print(f"{'cities':>8} {'compiled s':>12} {'python s':>12} {'speedup':>9}")
    for n in sizes:
        net = make_network(n, seed=n)
        compiled, python = bench_once(net, args.repeat)
        speedup = python / compiled if compiled > 0 else float("inf")
        print(f"{n:>8} {compiled:>12.4f} {python:>12.4f} {speedup:>8.1f}x")


if __name__ == "__main__":
    main()
