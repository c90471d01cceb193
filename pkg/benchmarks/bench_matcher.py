"""Benchmark: compiled vs pure bag-matching kernel.

The matcher decides whether a signed neighborhood splits into triples
consumed by a triple expression plus wildcard remainder; the subset DP
behind it is the one hot loop in ShEx validation.  Two workloads:

  pairs   a starred alternation of two-triple sequences that must tile
          the whole neighborhood; worst-case subset exploration
  bounded an at-most-k repetition under an open closure; the typical
          shape of validation constraints

Usage: python benchmarks/bench_matcher.py [--sizes 8,10,12,14] [--repeat 3]
"""

import argparse
import statistics
import time

from triform._kernel import available_kernels
from triform.model import EdgeTriple, Node, build_graph
from triform.shex import (
    Alt,
    HalfOpen,
    Seq,
    StarE,
    TC,
    desugar_repetition,
    match_triple_expr,
    open_closure,
    top_shape,
)


def star_graph(n):
    edges = [EdgeTriple("c", "p", f"a{i}") for i in range(n // 2)]
    edges += [EdgeTriple("c", "q", f"b{i}") for i in range(n - n // 2)]
    return build_graph(edges, [])


def workload_pairs(n):
    top = top_shape()
    expr = StarE(
        Alt(
            Seq(TC("p", "fwd", top), TC("q", "fwd", top)),
            Seq(TC("q", "fwd", top), TC("p", "fwd", top)),
        )
    )
    return star_graph(n), expr, HalfOpen(frozenset({"p", "q"}))


def workload_bounded(n):
    top = top_shape()
    shape = open_closure(desugar_repetition(TC("p", "fwd", top), "at-most", max(1, n // 2)))
    return star_graph(n), shape.expr, shape.openness


WORKLOADS = {"pairs": workload_pairs, "bounded": workload_bounded}


def time_once(kernel, g, expr, openness, n):
    start = time.perf_counter()
    result = match_triple_expr(g, Node("c"), expr, openness, cap=n, kernel=kernel)
    return result, (time.perf_counter() - start) * 1000.0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,10,12,14", help="neighborhood sizes")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    kernels = available_kernels()
    names = [k.KERNEL_NAME for k in kernels]
    if len(kernels) == 1:
        print("compiled kernel not built; timing the pure kernel only")

    print(f"{'workload':<9} {'n':>3} " + " ".join(f"{name:>12}" for name in names) + "  speedup")
    for wname, factory in WORKLOADS.items():
        for n in sizes:
            g, expr, openness = factory(n)
            medians = {}
            verdicts = set()
            for kernel in kernels:
                samples = []
                for _ in range(args.repeat):
                    result, ms = time_once(kernel, g, expr, openness, n)
                    verdicts.add(result)
                    samples.append(ms)
                medians[kernel.KERNEL_NAME] = statistics.median(samples)
            assert len(verdicts) == 1, "kernels disagree"
            row = " ".join(f"{medians[name]:>10.2f}ms" for name in names)
            speedup = ""
            if "compiled" in medians and "pure" in medians and medians["compiled"] > 0:
                speedup = f"{medians['pure'] / medians['compiled']:>6.1f}x"
            print(f"{wname:<9} {n:>3} {row}  {speedup}")


if __name__ == "__main__":
    main()
