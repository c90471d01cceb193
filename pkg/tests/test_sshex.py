import random

import pytest

from triform.harness import (
    GenParams,
    gen_graph,
    gen_shex_shape,
    gen_sshex_shape,
    sshex_satisfies_oracle,
)
from triform.model import FWD, INV, InstanceTooLarge, Node, NotNormalized, Val
from triform.shex import (
    NO_NAMES,
    Alt,
    Eps,
    HalfOpen,
    Open,
    Seq,
    SNeigh,
    StarE,
    TC,
    shex_satisfies,
    top_shape,
)
from triform.sshex import (
    NO_EXTRA,
    XAlt,
    XAnd,
    XNot,
    XRepeat,
    XSeq,
    XShape,
    XTC,
    eliminate_extra,
    intervals_normalized,
    normalize_eps,
    normalize_intervals,
    normalize_shape_intervals,
    preds_sshex,
    shex_to_sshex,
    sshex_to_shex,
    x_top,
)


def tc(q, d=FWD, shape=None):
    return XTC(q, d, shape)


def test_normalize_bounded_interval():
    te = XRepeat(tc("p"), 2, 3)
    out = normalize_intervals(te)
    # te ; te ; te[0;1]
    assert out == XSeq(XSeq(tc("p"), tc("p")), XRepeat(tc("p"), 0, 1))
    assert intervals_normalized(out)


def test_normalize_unbounded_interval():
    te = XRepeat(tc("p"), 1, None)
    out = normalize_intervals(te)
    # te[0;*] ; te
    assert out == XSeq(XRepeat(tc("p"), 0, None), tc("p"))


def test_normalize_already_normal():
    te = XRepeat(tc("p"), 0, None)
    assert normalize_intervals(te) == te
    zero = XRepeat(tc("p"), 0, 0)
    assert normalize_intervals(zero) == zero


def test_normalize_preserves_oracle_verdict():
    rng = random.Random(41)
    checked = 0
    for seed in range(120):
        p = GenParams(seed=seed, node_count=3, edge_density=0.3, prop_density=0.4)
        g = gen_graph(p)
        se = gen_sshex_shape(rng, p, 2, allow_extra=False)
        se_n = normalize_shape_intervals(se)
        for u in sorted(g.nodes):
            try:
                assert sshex_satisfies_oracle(g, Node(u), se) == sshex_satisfies_oracle(
                    g, Node(u), se_n
                )
            except InstanceTooLarge:
                continue
            checked += 1
    assert checked > 150


def test_preds_sshex():
    assert preds_sshex(tc("p")) == {("p", FWD)}
    assert preds_sshex(None) == set()
    te = XSeq(tc("p"), XAlt(tc("q", INV), tc("p")))
    assert preds_sshex(te) == {("p", FWD), ("q", INV)}
    assert preds_sshex(XRepeat(te, 0, None)) == {("p", FWD), ("q", INV)}


def test_eliminate_extra_worked_example():
    # extra {p1, p2} with te = p1 [p.] ; p1 [p'.] ; p3 .
    sub_p = XShape(False, NO_EXTRA, tc("p"))
    sub_p2 = XShape(False, NO_EXTRA, tc("pp"))
    te = XSeq(XSeq(tc("p1", FWD, sub_p), tc("p1", FWD, sub_p2)), tc("p3"))
    se = XShape(False, frozenset({("p1", FWD), ("p2", FWD)}), te)
    out = eliminate_extra(se)
    assert isinstance(out, XShape)
    assert out.extra == NO_EXTRA
    suffix_p1 = XRepeat(XTC("p1", FWD, XAnd(XNot(sub_p), XNot(sub_p2))), 0, None)
    suffix_p2 = XRepeat(XTC("p2", FWD, None), 0, None)
    assert out.expr == XSeq(XSeq(te, suffix_p1), suffix_p2)


def test_eliminate_extra_noop():
    se = XShape(True, NO_EXTRA, tc("p"))
    assert eliminate_extra(se) == se


def test_eliminate_extra_matches_direct_semantics():
    rng = random.Random(43)
    checked = 0
    for seed in range(150):
        p = GenParams(seed=seed, node_count=3, edge_density=0.3, prop_density=0.4)
        g = gen_graph(p)
        se = normalize_shape_intervals(gen_sshex_shape(rng, p, 2, allow_extra=True))
        free = eliminate_extra(se)
        shape = sshex_to_shex(free)
        for u in sorted(g.nodes):
            try:
                want = sshex_satisfies_oracle(g, Node(u), se)
                mid = sshex_satisfies_oracle(g, Node(u), free)
            except InstanceTooLarge:
                continue
            got = shex_satisfies(g, Node(u), shape)
            assert want == mid == got
            checked += 1
    assert checked > 200


def test_translate_closed_shape():
    se = XShape(True, NO_EXTRA, XSeq(tc("p"), tc("q", INV)))
    shape = sshex_to_shex(se)
    assert isinstance(shape, SNeigh)
    assert shape.openness == HalfOpen(frozenset({"q"}))


def test_translate_open_shape():
    se = XShape(False, NO_EXTRA, XSeq(tc("p"), tc("q", INV)))
    shape = sshex_to_shex(se)
    assert shape.openness == Open(frozenset({"q"}), frozenset({"p"}))


def test_translate_dot_is_top():
    se = XShape(False, NO_EXTRA, tc("p", FWD, None))
    shape = sshex_to_shex(se)
    assert shape.expr == TC("p", FWD, top_shape())


def test_translate_requires_normal_intervals():
    with pytest.raises(NotNormalized):
        sshex_to_shex(XShape(False, NO_EXTRA, XRepeat(tc("p"), 2, 3)))


def test_translate_requires_no_extra():
    with pytest.raises(NotNormalized):
        sshex_to_shex(XShape(False, frozenset({("p", FWD)}), tc("p")))


def test_tau_agrees_with_direct_oracle():
    rng = random.Random(47)
    checked = 0
    for seed in range(150):
        p = GenParams(seed=seed, node_count=3, edge_density=0.3, prop_density=0.4)
        g = gen_graph(p)
        se = normalize_shape_intervals(gen_sshex_shape(rng, p, 2, allow_extra=False))
        shape = sshex_to_shex(se)
        for u in sorted(g.nodes):
            try:
                want = sshex_satisfies_oracle(g, Node(u), se)
            except InstanceTooLarge:
                continue
            assert shex_satisfies(g, Node(u), shape) == want
            checked += 1
    assert checked > 200


def test_normalize_eps():
    e = Seq(Eps(), TC("p", FWD, top_shape()))
    assert normalize_eps(e) == TC("p", FWD, top_shape())
    assert normalize_eps(StarE(Eps())) == Eps()
    assert normalize_eps(Alt(Eps(), Eps())) == Eps()
    opt = normalize_eps(Alt(Eps(), TC("p", FWD, top_shape())))
    assert opt == Alt(TC("p", FWD, top_shape()), Eps())


def test_sigma_identity_cases():
    assert shex_to_sshex(top_shape()) == x_top()
    back = sshex_to_shex(x_top())
    assert back == top_shape()


def test_sigma_emits_forbidding_zero_intervals():
    # open shape whose wildcard excludes a name not used in the expression
    shape = SNeigh(TC("p", FWD, top_shape()), Open(NO_NAMES, frozenset({"z"})))
    se = shex_to_sshex(shape)
    assert isinstance(se, XShape)
    assert not se.closed
    reps = [t for t in _flatten_seq(se.expr) if isinstance(t, XRepeat)]
    intervals = {(r.min, r.max) for r in reps}
    assert (0, 0) in intervals  # z is forbidden
    assert (0, None) in intervals  # surplus p-triples are absorbed


def _flatten_seq(te):
    if isinstance(te, XSeq):
        return _flatten_seq(te.left) + _flatten_seq(te.right)
    return [te]


def test_round_trip_preserves_verdicts():
    rng = random.Random(53)
    checked = 0
    for seed in range(150):
        p = GenParams(seed=seed, node_count=3, edge_density=0.3, prop_density=0.4)
        g = gen_graph(p)
        shape = gen_shex_shape(rng, p, 2)
        back = sshex_to_shex(shex_to_sshex(shape))
        foci = [Node(u) for u in sorted(g.nodes)] + [Val(w) for w in g.values]
        for v in foci:
            assert shex_satisfies(g, v, shape) == shex_satisfies(g, v, back)
            checked += 1
    assert checked > 300
