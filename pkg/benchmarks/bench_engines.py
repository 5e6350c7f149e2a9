#!/usr/bin/env python3
"""Episode-throughput benchmark: compiled kernels vs pure-Python fallback.

Times matched workloads through both implementations and prints episodes
per second and the speedup. Usage: python benchmarks/bench_engines.py
[--runs N].
"""
import argparse
import time

from coneperc import (
    HeteroEnvironment,
    RadiusDistribution,
    StopPolicy,
    compiled_available,
    estimate_survival,
)

WORKLOADS = [
    ("level / bernoulli(0.7) td d=2 L=40",
     dict(graph="td", d=2, radius_source=RadiusDistribution.bernoulli(0.7),
          policy=StopPolicy(depth_target=40, generation_cap=160,
                            node_cap=2**22))),
    ("arena / geometric(0.3) td d=2 L=20",
     dict(graph="td", d=2, radius_source=RadiusDistribution.geometric(0.3),
          policy=StopPolicy(depth_target=20, generation_cap=80,
                            node_cap=100_000))),
    ("arena / binomial(3,0.35) tdplus d=3 L=12",
     dict(graph="tdplus", d=3,
          radius_source=RadiusDistribution.binomial(3, 0.35),
          policy=StopPolicy(depth_target=12, generation_cap=48,
                            node_cap=100_000))),
    ("arena / periodic hetero tdplus d=2 L=12",
     dict(graph="tdplus", d=2,
          radius_source=HeteroEnvironment.periodic(
              [RadiusDistribution.bernoulli(0.8),
               RadiusDistribution.geometric(0.25)], 2),
          policy=StopPolicy(depth_target=12, generation_cap=48,
                            node_cap=100_000))),
]


def time_impl(config, impl, runs):
    start = time.perf_counter()
    estimate_survival(impl=impl, n_runs=runs, master_seed=1234, **config)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=3000,
                        help="episodes per (workload, implementation) cell")
    args = parser.parse_args()

    if not compiled_available():
        print("compiled kernels are not built; nothing to compare")
        return

    print(f"{args.runs} episodes per cell; identical seeds, identical draws\n")
    header = f"{'workload':45s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for label, config in WORKLOADS:
        t_py = time_impl(config, "python", args.runs)
        t_cy = time_impl(config, "compiled", args.runs)
        print(f"{label:45s} {args.runs / t_py:9.0f}/s {args.runs / t_cy:9.0f}/s "
              f"{t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
