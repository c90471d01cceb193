"""Both matcher backends decide the same language.

The compiled kernel is optional; when the extension is missing these
tests compare the pure kernel against itself and still validate the
program encoding.
"""

import random

import pytest

from triform import _bagmatch_py
from triform._bagmatch_py import OP_ALT, OP_EPS, OP_LEAF, OP_SEQ, OP_STAR, OP_WILDSTAR
from triform._kernel import available_kernels, get_kernel, kernel_name
from triform.harness import GenParams, gen_graph, gen_openness, gen_triple_expr
from triform.model import Node
from triform.shex import match_triple_expr


def gen_program(rng, n_bits, size):
    ops, lefts, rights, masks, support = [], [], [], [], []

    def emit(op, a, b, mask):
        sup = mask
        if a >= 0:
            sup |= support[a]
        if b >= 0:
            sup |= support[b]
        ops.append(op)
        lefts.append(a)
        rights.append(b)
        masks.append(mask)
        support.append(sup)
        return len(ops) - 1

    def build(depth):
        if depth == 0 or rng.random() < 0.35:
            roll = rng.random()
            if roll < 0.2:
                return emit(OP_EPS, -1, -1, 0)
            mask = rng.getrandbits(n_bits)
            op = OP_LEAF if roll < 0.8 else OP_WILDSTAR
            return emit(op, -1, -1, mask)
        roll = rng.randrange(3)
        if roll == 0:
            return emit(OP_SEQ, build(depth - 1), build(depth - 1), 0)
        if roll == 1:
            return emit(OP_ALT, build(depth - 1), build(depth - 1), 0)
        return emit(OP_STAR, build(depth - 1), -1, 0)

    root = build(size)
    return ops, lefts, rights, masks, support, root


def test_kernels_agree_on_random_programs():
    kernels = available_kernels()
    rng = random.Random(97)
    for _ in range(300):
        n_bits = rng.randrange(0, 9)
        program = gen_program(rng, max(n_bits, 1), 3)
        for mask in range(1 << n_bits):
            results = {k.KERNEL_NAME: k.bag_match(*program, mask) for k in kernels}
            assert len(set(results.values())) == 1, (program, mask, results)


def test_witness_matches_decision():
    rng = random.Random(101)
    for _ in range(200):
        n_bits = rng.randrange(1, 7)
        program = gen_program(rng, n_bits, 3)
        full = (1 << n_bits) - 1
        decided = _bagmatch_py.bag_match(*program, full)
        witness = _bagmatch_py.bag_match_witness(*program, full)
        assert (witness is not None) == decided
        if witness is not None:
            covered = 0
            for _, mask in witness:
                assert covered & mask == 0  # pairwise disjoint
                covered |= mask
            assert covered == full


def test_matcher_same_verdicts_across_kernels():
    kernels = available_kernels()
    if len(kernels) < 2:
        pytest.skip("compiled kernel not built")
    rng = random.Random(103)
    for seed in range(60):
        p = GenParams(seed=seed, node_count=4, edge_density=0.3, prop_density=0.4)
        g = gen_graph(p)
        expr = gen_triple_expr(rng, p, 2)
        openness = gen_openness(rng, p)
        for u in sorted(g.nodes):
            got = {
                k.KERNEL_NAME: match_triple_expr(g, Node(u), expr, openness, kernel=k)
                for k in kernels
            }
            assert len(set(got.values())) == 1


def test_kernel_selection(monkeypatch):
    monkeypatch.setenv("TRIFORM_KERNEL", "pure")
    assert kernel_name() == "pure"
    monkeypatch.delenv("TRIFORM_KERNEL")
    assert get_kernel("pure").KERNEL_NAME == "pure"
    with pytest.raises(ValueError):
        get_kernel("banana")


def test_compiled_kernel_present_when_built():
    names = [k.KERNEL_NAME for k in available_kernels()]
    assert "pure" in names
    # informational: the default build compiles the extension
    assert kernel_name(get_kernel()) in names


def test_wide_neighborhoods_route_to_pure():
    # the compiled kernel is limited to 32 triples; wider neighborhoods
    # fall back to the pure kernel regardless of the selected backend
    from triform.model import EdgeTriple, build_graph
    from triform.shex import HalfOpen, StarE, TC, top_shape

    g = build_graph([EdgeTriple("c", "p", f"t{i}") for i in range(35)], [])
    expr = StarE(TC("p", "fwd", top_shape()))
    for kernel in available_kernels():
        assert match_triple_expr(
            g, Node("c"), expr, HalfOpen(frozenset()), cap=40, kernel=kernel
        )
    drop_one = StarE(TC("q", "fwd", top_shape()))
    for kernel in available_kernels():
        assert not match_triple_expr(
            g, Node("c"), drop_one, HalfOpen(frozenset()), cap=40, kernel=kernel
        )
