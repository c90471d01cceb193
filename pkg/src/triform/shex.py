"""ShEx core: triple expressions, shapes, selectors, and validation.

A triple expression generates the allowed signed neighborhoods of a
focus: each triple constraint consumes exactly one signed triple whose
far endpoint satisfies the nested shape, sequence parts must consume
disjoint triple sets, and the openness suffix says which unmatched
triples are tolerated (any incoming with name outside R; for open
shapes also any outgoing with name outside Q).

Matching is decided by a memoized subset DP over neighborhood bitmasks
(see ``_bagmatch_py``/``_bagmatch``).  Cost is exponential only in the
neighborhood size, which is bounded by a hard cap: exceeding the cap
raises ``NeighborhoodTooLarge`` rather than approximating.

Counting is by triples, not by endpoints: a node with two parallel
p-edges to the same target offers two distinct signed triples.  This is
the semantic split with SHACL and PG-Schema exercised by the harness's
counting-divergence suite.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple, Union

from . import _bagmatch_py
from ._bagmatch_py import OP_ALT, OP_EPS, OP_LEAF, OP_SEQ, OP_STAR, OP_WILDSTAR
from ._kernel import get_kernel
from .model import (
    FWD,
    INV,
    CommonGraph,
    Focus,
    NeighborhoodTooLarge,
    Node,
    SignedTriple,
    TriformError,
    Val,
    Value,
    ValueTypeRegistry,
    neigh_signed,
    signed_triple_sort_key,
    sorted_foci,
    value_type_member,
)
from .report import ValidationReport, make_report

DEFAULT_CAP = 24


def default_cap() -> int:
    raw = os.environ.get("TRIFORM_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise TriformError(f"TRIFORM_CAP must be an integer, got {raw!r}") from None
    if cap < 0:
        raise TriformError("TRIFORM_CAP must be non-negative")
    return cap


# ---------------------------------------------------------------------------
# ASTs


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class TC:
    """Triple constraint: consumes one signed triple named ``q`` in the
    given direction whose far endpoint satisfies ``shape``."""

    q: str
    direction: str
    shape: "ShexShape"


@dataclass(frozen=True)
class Seq:
    left: "TripleExpr"
    right: "TripleExpr"


@dataclass(frozen=True)
class Alt:
    left: "TripleExpr"
    right: "TripleExpr"


@dataclass(frozen=True)
class StarE:
    inner: "TripleExpr"


@dataclass(frozen=True)
class WildOut:
    """Wildcard: one unmatched outgoing triple with name outside ``excluded``.

    Only appears in openness suffixes; user-built closed expressions may
    not contain it.
    """

    excluded: FrozenSet[str]


@dataclass(frozen=True)
class WildIn:
    excluded: FrozenSet[str]


TripleExpr = Union[Eps, TC, Seq, Alt, StarE, WildOut, WildIn]


@dataclass(frozen=True)
class HalfOpen:
    """Tolerate unmatched incoming triples with name outside ``r``; no
    unmatched outgoing triples."""

    r: FrozenSet[str]


@dataclass(frozen=True)
class Open:
    """Additionally tolerate unmatched outgoing triples with name outside ``q``."""

    r: FrozenSet[str]
    q: FrozenSet[str]


Openness = Union[HalfOpen, Open]


def is_closed_expr(e: TripleExpr) -> bool:
    if isinstance(e, (WildOut, WildIn)):
        return False
    if isinstance(e, (Seq, Alt)):
        return is_closed_expr(e.left) and is_closed_expr(e.right)
    if isinstance(e, StarE):
        return is_closed_expr(e.inner)
    if isinstance(e, TC):
        return True  # nested shapes carry their own closed expressions
    return isinstance(e, Eps)


@dataclass(frozen=True)
class STestConst:
    c: Value


@dataclass(frozen=True)
class STestType:
    t: str


@dataclass(frozen=True)
class SNeigh:
    expr: TripleExpr
    openness: Openness

    def __post_init__(self):
        if not is_closed_expr(self.expr):
            raise TriformError("SNeigh requires a closed triple expression (no wildcards)")


@dataclass(frozen=True)
class SAnd:
    left: "ShexShape"
    right: "ShexShape"


@dataclass(frozen=True)
class SOr:
    left: "ShexShape"
    right: "ShexShape"


@dataclass(frozen=True)
class SNot:
    inner: "ShexShape"


ShexShape = Union[STestConst, STestType, SNeigh, SAnd, SOr, SNot]


@dataclass(frozen=True)
class SelTestConst:
    c: Value


@dataclass(frozen=True)
class SelOutConst:
    q: str
    c: Value


@dataclass(frozen=True)
class SelOut:
    q: str


@dataclass(frozen=True)
class SelIn:
    q: str


ShexSelector = Union[SelTestConst, SelOutConst, SelOut, SelIn]

ShexRule = Tuple[ShexSelector, ShexShape]

NO_NAMES: FrozenSet[str] = frozenset()


def top_shape() -> ShexShape:
    """The shape satisfied by every node and every value."""
    return SNeigh(Eps(), Open(NO_NAMES, NO_NAMES))


def seq_all(exprs: List[TripleExpr]) -> TripleExpr:
    if not exprs:
        return Eps()
    out = exprs[0]
    for e in exprs[1:]:
        out = Seq(out, e)
    return out


def alt_all(exprs: List[TripleExpr]) -> TripleExpr:
    if not exprs:
        raise TriformError("empty alternation")
    out = exprs[0]
    for e in exprs[1:]:
        out = Alt(out, e)
    return out


def sand_all(shapes: List[ShexShape]) -> ShexShape:
    if not shapes:
        return top_shape()
    out = shapes[0]
    for s in shapes[1:]:
        out = SAnd(out, s)
    return out


def sor_all(shapes: List[ShexShape]) -> ShexShape:
    if not shapes:
        raise TriformError("empty disjunction")
    out = shapes[0]
    for s in shapes[1:]:
        out = SOr(out, s)
    return out


# ---------------------------------------------------------------------------
# Derived syntax


def desugar_repetition(e: TripleExpr, kind: str, n: int) -> TripleExpr:
    """Expand e^n, e^{<=n}, e^{>=n} into the core combinators."""
    if n < 0:
        raise TriformError("repetition bound must be non-negative")
    if kind == "exactly":
        if n == 0:
            return Eps()
        out = e
        for _ in range(n - 1):
            out = Seq(out, e)
        return out
    if kind == "at-most":
        if n == 0:
            return Eps()
        out: TripleExpr = Eps()
        for i in range(1, n + 1):
            out = Alt(out, desugar_repetition(e, "exactly", i))
        return out
    if kind == "at-least":
        if n == 0:
            return StarE(e)
        return Seq(desugar_repetition(e, "exactly", n), StarE(e))
    raise TriformError(f"unknown repetition kind {kind!r}")


def preds_triple_expr(e: TripleExpr) -> Set[Tuple[str, str]]:
    """Names appearing directly in the expression, with their direction.

    Names inside nested shapes of triple constraints do not count.
    """
    if isinstance(e, Eps):
        return set()
    if isinstance(e, TC):
        return {(e.q, e.direction)}
    if isinstance(e, (Seq, Alt)):
        return preds_triple_expr(e.left) | preds_triple_expr(e.right)
    if isinstance(e, StarE):
        return preds_triple_expr(e.inner)
    if isinstance(e, WildOut) or isinstance(e, WildIn):
        return set()
    raise TriformError(f"unknown triple expression {e!r}")


def open_closure(e: TripleExpr) -> ShexShape:
    """The floor-bracket notation: wrap ``e`` with wildcards excluding the
    names that appear directly in it."""
    direct = preds_triple_expr(e)
    q = frozenset(name for name, d in direct if d == FWD)
    r = frozenset(name for name, d in direct if d == INV)
    return SNeigh(e, Open(r, q))


# ---------------------------------------------------------------------------
# Evaluation


@dataclass
class EvalContext:
    cap: int
    registry: Optional[ValueTypeRegistry] = None
    kernel: object = None
    cache: Dict[Tuple[Focus, int], bool] = field(default_factory=dict)

    def __post_init__(self):
        if self.kernel is None:
            self.kernel = get_kernel()


def _wild_mask(triples: List[SignedTriple], openness: Openness) -> int:
    mask = 0
    for i, t in enumerate(triples):
        if t.direction == INV:
            if t.name not in openness.r:
                mask |= 1 << i
        elif isinstance(openness, Open):
            if t.name not in openness.q:
                mask |= 1 << i
    return mask


def _compile_expr(
    ctx: EvalContext,
    g: CommonGraph,
    expr: TripleExpr,
    triples: List[SignedTriple],
    wild_mask: int,
):
    """Flatten ``expr ; wildcards`` into the kernel program format."""
    ops: List[int] = []
    lefts: List[int] = []
    rights: List[int] = []
    masks: List[int] = []
    support: List[int] = []

    def emit(op: int, a: int, b: int, mask: int, sup: int) -> int:
        ops.append(op)
        lefts.append(a)
        rights.append(b)
        masks.append(mask)
        support.append(sup)
        return len(ops) - 1

    def walk(e: TripleExpr) -> int:
        if isinstance(e, Eps):
            return emit(OP_EPS, -1, -1, 0, 0)
        if isinstance(e, TC):
            mask = 0
            for i, t in enumerate(triples):
                if t.name == e.q and t.direction == e.direction:
                    if _satisfies(ctx, g, t.endpoint, e.shape):
                        mask |= 1 << i
            return emit(OP_LEAF, -1, -1, mask, mask)
        if isinstance(e, WildOut):
            mask = 0
            for i, t in enumerate(triples):
                if t.direction == FWD and t.name not in e.excluded:
                    mask |= 1 << i
            return emit(OP_LEAF, -1, -1, mask, mask)
        if isinstance(e, WildIn):
            mask = 0
            for i, t in enumerate(triples):
                if t.direction == INV and t.name not in e.excluded:
                    mask |= 1 << i
            return emit(OP_LEAF, -1, -1, mask, mask)
        if isinstance(e, Seq):
            a = walk(e.left)
            b = walk(e.right)
            return emit(OP_SEQ, a, b, 0, support[a] | support[b])
        if isinstance(e, Alt):
            a = walk(e.left)
            b = walk(e.right)
            return emit(OP_ALT, a, b, 0, support[a] | support[b])
        if isinstance(e, StarE):
            a = walk(e.inner)
            if ops[a] == OP_LEAF:
                # star of a single constraint consumes any subset of its mask
                return emit(OP_WILDSTAR, -1, -1, masks[a], masks[a])
            return emit(OP_STAR, a, -1, 0, support[a])
        raise TriformError(f"unknown triple expression {e!r}")

    body = walk(expr)
    wild = emit(OP_WILDSTAR, -1, -1, wild_mask, wild_mask)
    root = emit(OP_SEQ, body, wild, 0, support[body] | wild_mask)
    return ops, lefts, rights, masks, support, root


def _sorted_neigh(g: CommonGraph, v: Focus, cap: int) -> List[SignedTriple]:
    triples = sorted(neigh_signed(g, v), key=signed_triple_sort_key)
    if len(triples) > cap:
        raise NeighborhoodTooLarge(
            f"signed neighborhood of {v!r} has {len(triples)} triples (cap {cap})"
        )
    return triples


def _match(ctx: EvalContext, g: CommonGraph, v: Focus, expr: TripleExpr, openness: Openness) -> bool:
    if (
        isinstance(expr, Eps)
        and isinstance(openness, Open)
        and not openness.r
        and not openness.q
    ):
        return True  # the top shape matches every neighborhood
    triples = _sorted_neigh(g, v, ctx.cap)
    wild = _wild_mask(triples, openness)
    program = _compile_expr(ctx, g, expr, triples, wild)
    full = (1 << len(triples)) - 1
    kernel = ctx.kernel
    if len(triples) > getattr(kernel, "MAX_BITS", 10**9):
        kernel = _bagmatch_py
    return kernel.bag_match(*program, full)


def _satisfies(ctx: EvalContext, g: CommonGraph, v: Focus, shape: ShexShape) -> bool:
    key = (v, id(shape))
    cached = ctx.cache.get(key)
    if cached is not None:
        return cached
    if isinstance(shape, STestConst):
        result = isinstance(v, Val) and v.value == shape.c
    elif isinstance(shape, STestType):
        result = isinstance(v, Val) and value_type_member(v.value, shape.t, ctx.registry)
    elif isinstance(shape, SNeigh):
        result = _match(ctx, g, v, shape.expr, shape.openness)
    elif isinstance(shape, SAnd):
        result = _satisfies(ctx, g, v, shape.left) and _satisfies(ctx, g, v, shape.right)
    elif isinstance(shape, SOr):
        result = _satisfies(ctx, g, v, shape.left) or _satisfies(ctx, g, v, shape.right)
    elif isinstance(shape, SNot):
        result = not _satisfies(ctx, g, v, shape.inner)
    else:
        raise TriformError(f"unknown ShEx shape {shape!r}")
    ctx.cache[key] = result
    return result


def match_triple_expr(
    g: CommonGraph,
    v: Focus,
    expr: TripleExpr,
    openness: Openness,
    cap: Optional[int] = None,
    registry: Optional[ValueTypeRegistry] = None,
    kernel=None,
) -> bool:
    """True iff the signed neighborhood of ``v`` is generated by
    ``expr`` followed by the openness wildcards."""
    ctx = EvalContext(cap if cap is not None else default_cap(), registry, kernel)
    return _match(ctx, g, v, expr, openness)


def match_witness(
    g: CommonGraph,
    v: Focus,
    expr: TripleExpr,
    openness: Openness,
    cap: Optional[int] = None,
    registry: Optional[ValueTypeRegistry] = None,
) -> Optional[List[Tuple[int, List[SignedTriple]]]]:
    """Reconstruct one consumption witness (always on the pure kernel).

    Returns (program node, consumed triples) pairs or None; used to
    check the sequence-disjointness invariant.
    """
    ctx = EvalContext(cap if cap is not None else default_cap(), registry, _bagmatch_py)
    triples = _sorted_neigh(g, v, ctx.cap)
    wild = _wild_mask(triples, openness)
    program = _compile_expr(ctx, g, expr, triples, wild)
    full = (1 << len(triples)) - 1
    raw = _bagmatch_py.bag_match_witness(*program, full)
    if raw is None:
        return None
    out = []
    for node, mask in raw:
        consumed = [triples[i] for i in range(len(triples)) if mask & (1 << i)]
        out.append((node, consumed))
    return out


def shex_satisfies(
    g: CommonGraph,
    v: Focus,
    shape: ShexShape,
    cap: Optional[int] = None,
    registry: Optional[ValueTypeRegistry] = None,
    kernel=None,
) -> bool:
    ctx = EvalContext(cap if cap is not None else default_cap(), registry, kernel)
    return _satisfies(ctx, g, v, shape)


def selector_shape(sel: ShexSelector) -> ShexShape:
    """The selector as an ordinary shape (its defining form)."""
    if isinstance(sel, SelTestConst):
        return STestConst(sel.c)
    if isinstance(sel, SelOutConst):
        return SNeigh(TC(sel.q, FWD, STestConst(sel.c)), Open(NO_NAMES, NO_NAMES))
    if isinstance(sel, SelOut):
        return SNeigh(TC(sel.q, FWD, top_shape()), Open(NO_NAMES, NO_NAMES))
    if isinstance(sel, SelIn):
        return SNeigh(TC(sel.q, INV, top_shape()), Open(NO_NAMES, NO_NAMES))
    raise TriformError(f"unknown ShEx selector {sel!r}")


def shex_select(g: CommonGraph, sel: ShexSelector) -> List[Focus]:
    """Foci picked by a selector, computed directly from the graph.

    Equivalent to evaluating :func:`selector_shape` at every graph
    element (the openness wildcards absorb everything beyond the one
    required triple), but never hits the neighborhood cap.
    """
    out: Set[Focus] = set()
    if isinstance(sel, SelTestConst):
        out.add(Val(sel.c))
    elif isinstance(sel, SelOutConst):
        for (n, k), w in g.props.items():
            if k == sel.q and w == sel.c:
                out.add(Node(n))
        # predicate endpoints are nodes and never equal a value constant
    elif isinstance(sel, SelOut):
        for e in g.edges:
            if e.p == sel.q:
                out.add(Node(e.s))
        for (n, k) in g.props:
            if k == sel.q:
                out.add(Node(n))
    elif isinstance(sel, SelIn):
        for e in g.edges:
            if e.p == sel.q:
                out.add(Node(e.o))
        for (n, k), w in g.props.items():
            if k == sel.q:
                out.add(Val(w))
    else:
        raise TriformError(f"unknown ShEx selector {sel!r}")
    return sorted_foci(out)


def shex_validate(
    g: CommonGraph,
    rules: List[ShexRule],
    cap: Optional[int] = None,
    registry: Optional[ValueTypeRegistry] = None,
    kernel=None,
) -> ValidationReport:
    """Validate; one evaluation context (and shape cache) per run."""
    ctx = EvalContext(cap if cap is not None else default_cap(), registry, kernel)
    per_rule = []
    for sel, shape in rules:
        selected = shex_select(g, sel)
        failing = [v for v in selected if not _satisfies(ctx, g, v, shape)]
        per_rule.append((selected, failing))
    return make_report(per_rule)
