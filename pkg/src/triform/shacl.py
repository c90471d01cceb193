"""SHACL core: path expressions, shapes, selectors, and validation.

Path expressions denote binary relations over nodes and values; shapes
are unary formulas evaluated at a focus.  The denoted relation of a path
can be infinite (``id`` relates every element of the universe to itself)
but its image at a focus is always contained in the graph's elements
plus the focus itself, because edge and property steps only ever relate
graph elements.  Evaluation therefore works on that finite domain; this
restriction is the load-bearing fact of this module and is exercised
against a full relational oracle in the test harness.

Everything is pure: a shared (graph, schema) pair may be validated by
concurrent workers partitioned by rule index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Set, Tuple, Union

from .model import (
    CommonGraph,
    Focus,
    Node,
    TriformError,
    Val,
    Value,
    ValueTypeRegistry,
    sorted_foci,
    value_type_member,
)
from .report import ValidationReport, make_report

# ---------------------------------------------------------------------------
# ASTs


@dataclass(frozen=True)
class Id:
    pass


@dataclass(frozen=True)
class Step:
    q: str


@dataclass(frozen=True)
class Inverse:
    inner: "PathExpr"


@dataclass(frozen=True)
class Concat:
    left: "PathExpr"
    right: "PathExpr"


@dataclass(frozen=True)
class PathUnion:
    left: "PathExpr"
    right: "PathExpr"


@dataclass(frozen=True)
class Star:
    inner: "PathExpr"


PathExpr = Union[Id, Step, Inverse, Concat, PathUnion, Star]


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class TestConst:
    __test__ = False  # AST node named after the grammar, not a test case

    c: Value


@dataclass(frozen=True)
class TestType:
    __test__ = False

    t: str


@dataclass(frozen=True)
class Closed:
    allowed: FrozenSet[str]


@dataclass(frozen=True)
class Eq:
    path: PathExpr
    p: str


@dataclass(frozen=True)
class Disj:
    path: PathExpr
    p: str


@dataclass(frozen=True)
class Not:
    inner: "ShaclShape"


@dataclass(frozen=True)
class And:
    left: "ShaclShape"
    right: "ShaclShape"


@dataclass(frozen=True)
class Or:
    left: "ShaclShape"
    right: "ShaclShape"


@dataclass(frozen=True)
class GeqCount:
    n: int
    path: PathExpr
    body: "ShaclShape"


@dataclass(frozen=True)
class LeqCount:
    n: int
    path: PathExpr
    body: "ShaclShape"


ShaclShape = Union[Top, TestConst, TestType, Closed, Eq, Disj, Not, And, Or, GeqCount, LeqCount]


@dataclass(frozen=True)
class ExistsOut:
    q: str


@dataclass(frozen=True)
class ExistsIn:
    q: str


@dataclass(frozen=True)
class SelConst:
    c: Value


ShaclSelector = Union[ExistsOut, ExistsIn, SelConst]

ShaclRule = Tuple[ShaclSelector, ShaclShape]


def exists(path: PathExpr, body: Optional[ShaclShape] = None) -> ShaclShape:
    """Sugar: at least one path successor satisfying the body."""
    return GeqCount(1, path, body if body is not None else Top())


def forall(path: PathExpr, body: ShaclShape) -> ShaclShape:
    """Sugar: every path successor satisfies the body."""
    return LeqCount(0, path, Not(body))


def count_eq(n: int, path: PathExpr, body: Optional[ShaclShape] = None) -> ShaclShape:
    """Sugar: exactly ``n`` path successors satisfying the body."""
    b = body if body is not None else Top()
    return And(LeqCount(n, path, b), GeqCount(n, path, b))


def and_all(shapes: List[ShaclShape]) -> ShaclShape:
    if not shapes:
        return Top()
    out = shapes[0]
    for s in shapes[1:]:
        out = And(out, s)
    return out


def or_all(shapes: List[ShaclShape]) -> ShaclShape:
    if not shapes:
        raise TriformError("empty disjunction")
    out = shapes[0]
    for s in shapes[1:]:
        out = Or(out, s)
    return out


# ---------------------------------------------------------------------------
# Path evaluation

def _push_inverse(path: PathExpr, flipped: bool) -> PathExpr:
    """Normalize so that Inverse only wraps Step atoms."""
    if isinstance(path, Id):
        return path
    if isinstance(path, Step):
        return Inverse(path) if flipped else path
    if isinstance(path, Inverse):
        return _push_inverse(path.inner, not flipped)
    if isinstance(path, Concat):
        l = _push_inverse(path.left, flipped)
        r = _push_inverse(path.right, flipped)
        return Concat(r, l) if flipped else Concat(l, r)
    if isinstance(path, PathUnion):
        return PathUnion(_push_inverse(path.left, flipped), _push_inverse(path.right, flipped))
    if isinstance(path, Star):
        return Star(_push_inverse(path.inner, flipped))
    raise TriformError(f"unknown path node {path!r}")


def _step_image(g: CommonGraph, q: str, sources: Set[Focus]) -> Set[Focus]:
    out: Set[Focus] = set()
    for v in sources:
        if not isinstance(v, Node):
            continue  # values have no outgoing triples
        for e in g.out_edges(v.id):
            if e.p == q:
                out.add(Node(e.o))
        w = g.prop(v.id, q)
        if w is not None:
            out.add(Val(w))
    return out


def _inv_step_image(g: CommonGraph, q: str, sources: Set[Focus]) -> Set[Focus]:
    out: Set[Focus] = set()
    for v in sources:
        if isinstance(v, Node):
            for e in g.in_edges(v.id):
                if e.p == q:
                    out.add(Node(e.s))
        else:
            for (n, k) in g.value_owners(v.value):
                if k == q:
                    out.add(Node(n))
    return out


def _image(g: CommonGraph, path: PathExpr, sources: Set[Focus]) -> Set[Focus]:
    if isinstance(path, Id):
        return set(sources)
    if isinstance(path, Step):
        return _step_image(g, path.q, sources)
    if isinstance(path, Inverse):
        # after normalization the inner is always a Step
        assert isinstance(path.inner, Step)
        return _inv_step_image(g, path.inner.q, sources)
    if isinstance(path, Concat):
        return _image(g, path.right, _image(g, path.left, sources))
    if isinstance(path, PathUnion):
        return _image(g, path.left, sources) | _image(g, path.right, sources)
    if isinstance(path, Star):
        reached = set(sources)
        frontier = set(sources)
        while frontier:
            nxt = _image(g, path.inner, frontier) - reached
            reached |= nxt
            frontier = nxt
        return reached
    raise TriformError(f"unknown path node {path!r}")


def eval_path(g: CommonGraph, v: Focus, path: PathExpr) -> Set[Focus]:
    """The image of ``v`` under the path's relation.

    Always a subset of the graph's nodes and values plus ``v`` itself
    (the focus enters only through ``id``).
    """
    return _image(g, _push_inverse(path, False), {v})


# ---------------------------------------------------------------------------
# Shape satisfaction


def shacl_satisfies(
    g: CommonGraph,
    v: Focus,
    shape: ShaclShape,
    registry: Optional[ValueTypeRegistry] = None,
) -> bool:
    if isinstance(shape, Top):
        return True
    if isinstance(shape, TestConst):
        return isinstance(v, Val) and v.value == shape.c
    if isinstance(shape, TestType):
        return isinstance(v, Val) and value_type_member(v.value, shape.t, registry)
    if isinstance(shape, Closed):
        # only outgoing triples are constrained; values have none
        if not isinstance(v, Node):
            return True
        for e in g.out_edges(v.id):
            if e.p not in shape.allowed:
                return False
        for k in g.node_props(v.id):
            if k not in shape.allowed:
                return False
        return True
    if isinstance(shape, Eq):
        return eval_path(g, v, shape.path) == eval_path(g, v, Step(shape.p))
    if isinstance(shape, Disj):
        return not (eval_path(g, v, shape.path) & eval_path(g, v, Step(shape.p)))
    if isinstance(shape, Not):
        return not shacl_satisfies(g, v, shape.inner, registry)
    if isinstance(shape, And):
        return shacl_satisfies(g, v, shape.left, registry) and shacl_satisfies(
            g, v, shape.right, registry
        )
    if isinstance(shape, Or):
        return shacl_satisfies(g, v, shape.left, registry) or shacl_satisfies(
            g, v, shape.right, registry
        )
    if isinstance(shape, GeqCount):
        image = eval_path(g, v, shape.path)
        hits = 0
        for u in image:
            if shacl_satisfies(g, u, shape.body, registry):
                hits += 1
                if hits >= shape.n:
                    return True
        return hits >= shape.n
    if isinstance(shape, LeqCount):
        image = eval_path(g, v, shape.path)
        hits = 0
        for u in image:
            if shacl_satisfies(g, u, shape.body, registry):
                hits += 1
                if hits > shape.n:
                    return False
        return True
    raise TriformError(f"unknown SHACL shape {shape!r}")


def shacl_select(g: CommonGraph, sel: ShaclSelector) -> List[Focus]:
    """The finite set of foci picked by a selector, in deterministic order.

    ``SelConst`` contributes its constant even when it does not occur in
    the graph; the other forms ground to the graph's triples.
    """
    out: Set[Focus] = set()
    if isinstance(sel, ExistsOut):
        for e in g.edges:
            if e.p == sel.q:
                out.add(Node(e.s))
        for (n, k) in g.props:
            if k == sel.q:
                out.add(Node(n))
    elif isinstance(sel, ExistsIn):
        for e in g.edges:
            if e.p == sel.q:
                out.add(Node(e.o))
        for (n, k), w in g.props.items():
            if k == sel.q:
                out.add(Val(w))
    elif isinstance(sel, SelConst):
        out.add(Val(sel.c))
    else:
        raise TriformError(f"unknown SHACL selector {sel!r}")
    return sorted_foci(out)


def shacl_validate(
    g: CommonGraph,
    rules: List[ShaclRule],
    registry: Optional[ValueTypeRegistry] = None,
) -> ValidationReport:
    """Check every selected focus against its shape; valid iff no failures."""
    per_rule = []
    for sel, shape in rules:
        selected = shacl_select(g, sel)
        failing = [v for v in selected if not shacl_satisfies(g, v, shape, registry)]
        per_rule.append((selected, failing))
    return make_report(per_rule)
