"""PG-Schema core: content types, PG-path expressions, shapes, and the
graph-type layer.

Content types describe node records; membership is decided through a
disjunctive normal form where each disjunct lists required keys (a key
required twice must satisfy all its value types at once, forced by the
functional record union) and is either closed (exact key set) or open
(superset).  PG-paths are sorted: the node-to-node sub-grammar may be
starred, while key steps appear only at the two ends, turning a path
into one of four sorts (node/value to node/value).  Filters are
sub-identities on graph nodes only; a focus outside the graph never
passes a filter.

The graph-type layer mirrors the database view: node types, edge types
with a compatible-union value semantics, and constraint pairs, all
three checked.  The permissive reading that only enforces constraints
is the special case with trivial type sets.

Evaluation is pure over immutable inputs, same sharing contract as the
other dialect modules.  Ill-sorted schemas are rejected at load time,
before any focus is evaluated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .model import (
    CommonGraph,
    EdgeTriple,
    Focus,
    Node,
    Record,
    SortError,
    TriformError,
    Val,
    Value,
    ValueTypeRegistry,
    content,
    sorted_foci,
    value_type_member,
)
from .report import ValidationReport, make_report

NODE_SORT = "node"
VALUE_SORT = "value"

# ---------------------------------------------------------------------------
# Content types


@dataclass(frozen=True)
class CAny:
    pass


@dataclass(frozen=True)
class CEmpty:
    pass


@dataclass(frozen=True)
class CField:
    k: str
    t: str


@dataclass(frozen=True)
class CBoth:
    left: "ContentType"
    right: "ContentType"


@dataclass(frozen=True)
class CEither:
    left: "ContentType"
    right: "ContentType"


ContentType = Union[CAny, CEmpty, CField, CBoth, CEither]


@dataclass(frozen=True)
class ContentDisjunct:
    """One disjunct of a content-type DNF.

    ``reqs`` is a multimap of required key/value-type pairs; a record
    matches when every required key is present with a value in all of
    its listed types, and, for closed disjuncts, carries no other keys.
    """

    reqs: Tuple[Tuple[str, str], ...]
    open: bool

    def req_keys(self) -> FrozenSet[str]:
        return frozenset(k for k, _ in self.reqs)


@lru_cache(maxsize=8192)
def _content_dnf(t: ContentType) -> Tuple[ContentDisjunct, ...]:
    if isinstance(t, CAny):
        return (ContentDisjunct((), True),)
    if isinstance(t, CEmpty):
        return (ContentDisjunct((), False),)
    if isinstance(t, CField):
        return (ContentDisjunct(((t.k, t.t),), False),)
    if isinstance(t, CEither):
        return _content_dnf(t.left) + _content_dnf(t.right)
    if isinstance(t, CBoth):
        out = []
        for d1 in _content_dnf(t.left):
            for d2 in _content_dnf(t.right):
                reqs = tuple(sorted(d1.reqs + d2.reqs))
                out.append(ContentDisjunct(reqs, d1.open or d2.open))
        return tuple(out)
    raise TriformError(f"unknown content type {t!r}")


def content_dnf(t: ContentType) -> List[ContentDisjunct]:
    """Distribute & over |; the union of disjunct semantics equals the
    semantics of ``t``."""
    return list(_content_dnf(t))


def disjunct_member(r: Record, d: ContentDisjunct, registry: Optional[ValueTypeRegistry] = None) -> bool:
    for k, vt in d.reqs:
        w = r.get(k)
        if w is None or not value_type_member(w, vt, registry):
            return False
    if not d.open and set(r) != set(d.req_keys()):
        return False
    return True


def content_member(r: Record, t: ContentType, registry: Optional[ValueTypeRegistry] = None) -> bool:
    """Record membership in a content type, via the DNF."""
    return any(disjunct_member(r, d, registry) for d in content_dnf(t))


def is_open_type(t: ContentType) -> bool:
    """True for types of the form tau & top (every DNF disjunct open)."""
    return all(d.open for d in content_dnf(t))


def is_closed_type(t: ContentType) -> bool:
    """True when top does not occur anywhere in the type."""
    if isinstance(t, CAny):
        return False
    if isinstance(t, (CEmpty, CField)):
        return True
    if isinstance(t, (CBoth, CEither)):
        return is_closed_type(t.left) and is_closed_type(t.right)
    raise TriformError(f"unknown content type {t!r}")


def disjunct_to_content(d: ContentDisjunct) -> ContentType:
    """A union-free content type with the disjunct's semantics."""
    fields: List[ContentType] = [CField(k, vt) for k, vt in d.reqs]
    if d.open:
        fields.append(CAny())
    elif not fields:
        return CEmpty()
    out = fields[0]
    for f in fields[1:]:
        out = CBoth(out, f)
    return out


# ---------------------------------------------------------------------------
# PG-path expressions


@dataclass(frozen=True)
class FKeyIs:
    k: str
    c: Value


@dataclass(frozen=True)
class FNotKeyIs:
    k: str
    c: Value


@dataclass(frozen=True)
class FOfType:
    t: ContentType


@dataclass(frozen=True)
class FNotOfType:
    t: ContentType


FilterKind = Union[FKeyIs, FNotKeyIs, FOfType, FNotOfType]


@dataclass(frozen=True)
class PFilter:
    kind: FilterKind


@dataclass(frozen=True)
class PPred:
    p: str


@dataclass(frozen=True)
class PNotPreds:
    excluded: FrozenSet[str]


@dataclass(frozen=True)
class PInv:
    inner: "NodePath"


@dataclass(frozen=True)
class PConcat:
    left: "NodePath"
    right: "NodePath"


@dataclass(frozen=True)
class PUnion:
    left: "NodePath"
    right: "NodePath"


@dataclass(frozen=True)
class PStar:
    inner: "NodePath"


NodePath = Union[PFilter, PPred, PNotPreds, PInv, PConcat, PUnion, PStar]


@dataclass(frozen=True)
class PgPath:
    """A sorted PG-path: optional inverse key step in, node-to-node body,
    optional key step out.  ``body`` None stands for the trivial filter."""

    src_key: Optional[str]
    body: Optional[NodePath]
    dst_key: Optional[str]

    def __post_init__(self):
        if self.src_key is None and self.body is None and self.dst_key is None:
            raise TriformError("empty PG-path")

    @property
    def src_sort(self) -> str:
        return VALUE_SORT if self.src_key is not None else NODE_SORT

    @property
    def dst_sort(self) -> str:
        return VALUE_SORT if self.dst_key is not None else NODE_SORT


def key_path(k: str) -> PgPath:
    return PgPath(None, None, k)


def inv_key_path(k: str) -> PgPath:
    return PgPath(k, None, None)


def pred_path(p: str) -> PgPath:
    return PgPath(None, PPred(p), None)


def filter_path(kind: FilterKind) -> PgPath:
    return PgPath(None, PFilter(kind), None)


def concat_all(parts: Sequence[NodePath]) -> Optional[NodePath]:
    if not parts:
        return None
    out = parts[0]
    for p in parts[1:]:
        out = PConcat(out, p)
    return out


def union_all(parts: Sequence[NodePath]) -> NodePath:
    """Union folded as a balanced tree (large unions stay shallow)."""
    if not parts:
        raise TriformError("empty path union")
    layer = list(parts)
    while len(layer) > 1:
        nxt = []
        for i in range(0, len(layer) - 1, 2):
            nxt.append(PUnion(layer[i], layer[i + 1]))
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def _push_inv(path: NodePath, flipped: bool) -> NodePath:
    """Normalize so PInv only wraps PPred/PNotPreds atoms."""
    if isinstance(path, PFilter):
        return path  # filters are sub-identities, hence self-inverse
    if isinstance(path, (PPred, PNotPreds)):
        return PInv(path) if flipped else path
    if isinstance(path, PInv):
        return _push_inv(path.inner, not flipped)
    if isinstance(path, PConcat):
        l = _push_inv(path.left, flipped)
        r = _push_inv(path.right, flipped)
        return PConcat(r, l) if flipped else PConcat(l, r)
    if isinstance(path, PUnion):
        return PUnion(_push_inv(path.left, flipped), _push_inv(path.right, flipped))
    if isinstance(path, PStar):
        return PStar(_push_inv(path.inner, flipped))
    raise TriformError(f"unknown PG-path node {path!r}")


def _filter_holds(g: CommonGraph, u: str, kind: FilterKind, registry) -> bool:
    if isinstance(kind, FKeyIs):
        return g.prop(u, kind.k) == kind.c
    if isinstance(kind, FNotKeyIs):
        return g.prop(u, kind.k) != kind.c
    if isinstance(kind, FOfType):
        return content_member(content(g, u), kind.t, registry)
    if isinstance(kind, FNotOfType):
        return not content_member(content(g, u), kind.t, registry)
    raise TriformError(f"unknown filter {kind!r}")


def _node_image(g: CommonGraph, path: NodePath, sources: Set[str], registry) -> Set[str]:
    if isinstance(path, PFilter):
        return {u for u in sources if u in g.nodes and _filter_holds(g, u, path.kind, registry)}
    if isinstance(path, PPred):
        return {e.o for u in sources for e in g.out_edges(u) if e.p == path.p}
    if isinstance(path, PNotPreds):
        return {e.o for u in sources for e in g.out_edges(u) if e.p not in path.excluded}
    if isinstance(path, PInv):
        inner = path.inner
        if isinstance(inner, PPred):
            return {e.s for u in sources for e in g.in_edges(u) if e.p == inner.p}
        if isinstance(inner, PNotPreds):
            return {e.s for u in sources for e in g.in_edges(u) if e.p not in inner.excluded}
        raise TriformError("inverse not normalized")
    if isinstance(path, PConcat):
        return _node_image(g, path.right, _node_image(g, path.left, sources, registry), registry)
    if isinstance(path, PUnion):
        return _node_image(g, path.left, sources, registry) | _node_image(
            g, path.right, sources, registry
        )
    if isinstance(path, PStar):
        reached = {u for u in sources if u in g.nodes}
        frontier = set(reached)
        while frontier:
            nxt = _node_image(g, path.inner, frontier, registry) - reached
            reached |= nxt
            frontier = nxt
        return reached
    raise TriformError(f"unknown PG-path node {path!r}")


def eval_pg_path(
    g: CommonGraph,
    v: Focus,
    path: PgPath,
    registry: Optional[ValueTypeRegistry] = None,
) -> Set[Focus]:
    """The image of ``v`` under the path's relation.

    Raises :class:`SortError` when the focus kind does not match the
    path's source sort.
    """
    if path.src_key is not None:
        if not isinstance(v, Val):
            raise SortError(f"value-sorted path evaluated at node focus {v!r}")
        nodes = {n for (n, k) in g.value_owners(v.value) if k == path.src_key}
    else:
        if not isinstance(v, Node):
            raise SortError(f"node-sorted path evaluated at value focus {v!r}")
        nodes = {v.id}
    if path.body is not None:
        nodes = _node_image(g, _push_inv(path.body, False), nodes, registry)
    if path.dst_key is not None:
        out: Set[Focus] = set()
        for u in nodes:
            w = g.prop(u, path.dst_key)
            if w is not None:
                out.add(Val(w))
        return out
    return {Node(u) for u in nodes}


# ---------------------------------------------------------------------------
# PG-shapes


@dataclass(frozen=True)
class PgLeq:
    n: int
    path: PgPath


@dataclass(frozen=True)
class PgGeq:
    n: int
    path: PgPath


@dataclass(frozen=True)
class PgAnd:
    left: "PgShape"
    right: "PgShape"


PgShape = Union[PgLeq, PgGeq, PgAnd]

PgSelector = PgGeq  # restricted at load time to the form exists(path)

PgRule = Tuple[PgSelector, PgShape]


def pg_and_all(shapes: Sequence[PgShape]) -> PgShape:
    if not shapes:
        raise TriformError("empty PG conjunction")
    out = shapes[0]
    for s in shapes[1:]:
        out = PgAnd(out, s)
    return out


def exists_path(path: PgPath) -> PgGeq:
    return PgGeq(1, path)


def not_exists(path: PgPath) -> PgLeq:
    return PgLeq(0, path)


def shape_atoms(shape: PgShape) -> List[Union[PgLeq, PgGeq]]:
    """Flatten a conjunction into its counting atoms, left to right."""
    if isinstance(shape, PgAnd):
        return shape_atoms(shape.left) + shape_atoms(shape.right)
    if isinstance(shape, (PgLeq, PgGeq)):
        return [shape]
    raise TriformError(f"unknown PG-shape {shape!r}")


def shape_src_sort(shape: PgShape) -> str:
    sorts = {a.path.src_sort for a in shape_atoms(shape)}
    if len(sorts) > 1:
        raise SortError("conjunction mixes node-sorted and value-sorted paths")
    return sorts.pop()


def pg_satisfies(
    g: CommonGraph,
    v: Focus,
    shape: PgShape,
    registry: Optional[ValueTypeRegistry] = None,
) -> bool:
    if isinstance(shape, PgLeq):
        return len(eval_pg_path(g, v, shape.path, registry)) <= shape.n
    if isinstance(shape, PgGeq):
        return len(eval_pg_path(g, v, shape.path, registry)) >= shape.n
    if isinstance(shape, PgAnd):
        return pg_satisfies(g, v, shape.left, registry) and pg_satisfies(g, v, shape.right, registry)
    raise TriformError(f"unknown PG-shape {shape!r}")


def check_rule_sorts(rules: Sequence[PgRule]) -> None:
    """Load-time sort check: selectors are existentials and every shape
    evaluates at the sort its selector selects."""
    for i, (sel, shape) in enumerate(rules):
        if not isinstance(sel, PgGeq) or sel.n != 1:
            raise TriformError(f"rule {i}: PG-selector must be an existential shape")
        if shape_src_sort(shape) != sel.path.src_sort:
            raise SortError(f"rule {i}: selector and shape disagree on focus sort")


def pg_select(
    g: CommonGraph,
    sel: PgSelector,
    registry: Optional[ValueTypeRegistry] = None,
) -> List[Focus]:
    """Graph elements of the selector's sort with a nonempty path image."""
    candidates: List[Focus]
    if sel.path.src_sort == VALUE_SORT:
        candidates = [Val(w) for w in g.values]
    else:
        candidates = [Node(u) for u in g.nodes]
    out = [v for v in candidates if eval_pg_path(g, v, sel.path, registry)]
    return sorted_foci(out)


def pg_validate(
    g: CommonGraph,
    rules: Sequence[PgRule],
    registry: Optional[ValueTypeRegistry] = None,
) -> ValidationReport:
    check_rule_sorts(rules)
    per_rule = []
    for sel, shape in rules:
        selected = pg_select(g, sel, registry)
        failing = [v for v in selected if not pg_satisfies(g, v, shape, registry)]
        per_rule.append((selected, failing))
    return make_report(per_rule)


# ---------------------------------------------------------------------------
# Edge types


@dataclass(frozen=True)
class ET:
    """Primitive edge type: source content, allowed labels (None is the
    wildcard), target content."""

    src: ContentType
    labels: Optional[FrozenSet[str]]
    dst: ContentType


@dataclass(frozen=True)
class EBoth:
    left: "EdgeType"
    right: "EdgeType"


@dataclass(frozen=True)
class EEither:
    left: "EdgeType"
    right: "EdgeType"


EdgeType = Union[ET, EBoth, EEither]


def _record_splits(r: Record) -> Iterable[Tuple[Record, Record]]:
    """All pairs (r1, r2) with r1 and r2 subrecords of r and r1 | r2 == r.

    Shared keys are allowed: the union of compatible records need not be
    disjoint.
    """
    keys = sorted(r)
    for assignment in itertools.product((0, 1, 2), repeat=len(keys)):
        r1: Record = {}
        r2: Record = {}
        for k, side in zip(keys, assignment):
            if side in (0, 2):
                r1[k] = r[k]
            if side in (1, 2):
                r2[k] = r[k]
        yield r1, r2


def _edge_member(
    src: Record, label: str, dst: Record, t: EdgeType, registry: Optional[ValueTypeRegistry]
) -> bool:
    if isinstance(t, ET):
        if t.labels is not None and label not in t.labels:
            return False
        return content_member(src, t.src, registry) and content_member(dst, t.dst, registry)
    if isinstance(t, EEither):
        return _edge_member(src, label, dst, t.left, registry) or _edge_member(
            src, label, dst, t.right, registry
        )
    if isinstance(t, EBoth):
        for s1, s2 in _record_splits(src):
            for d1, d2 in _record_splits(dst):
                if _edge_member(s1, label, d1, t.left, registry) and _edge_member(
                    s2, label, d2, t.right, registry
                ):
                    return True
        return False
    raise TriformError(f"unknown edge type {t!r}")


def edge_type_member(
    g: CommonGraph,
    e: EdgeTriple,
    t: EdgeType,
    registry: Optional[ValueTypeRegistry] = None,
) -> bool:
    """Does (content(source), label, content(target)) belong to the type's
    value semantics?"""
    return _edge_member(content(g, e.s), e.p, content(g, e.o), t, registry)


def _label_meet(a: Optional[FrozenSet[str]], b: Optional[FrozenSet[str]]) -> Optional[FrozenSet[str]]:
    if a is None:
        return b
    if b is None:
        return a
    return a & b


def normalize_edge_type(t: EdgeType) -> List[ET]:
    """Rewrite to a union of primitives: union-free contents and a label
    part that is the wildcard, a singleton, or empty."""
    prims = _normalize(t)
    out: List[ET] = []
    for prim in prims:
        if prim.labels is None or len(prim.labels) <= 1:
            out.append(prim)
        else:
            out.extend(ET(prim.src, frozenset({p}), prim.dst) for p in sorted(prim.labels))
    return out


def _normalize(t: EdgeType) -> List[ET]:
    if isinstance(t, ET):
        return [
            ET(disjunct_to_content(ds), t.labels, disjunct_to_content(dd))
            for ds in content_dnf(t.src)
            for dd in content_dnf(t.dst)
        ]
    if isinstance(t, EEither):
        return _normalize(t.left) + _normalize(t.right)
    if isinstance(t, EBoth):
        return [
            ET(CBoth(a.src, b.src), _label_meet(a.labels, b.labels), CBoth(a.dst, b.dst))
            for a in _normalize(t.left)
            for b in _normalize(t.right)
        ]
    raise TriformError(f"unknown edge type {t!r}")


_EMPTY_REL = PFilter(FNotOfType(CAny()))  # empty relation: the negated trivial filter


def edge_type_to_path(t: EdgeType, negated: bool = False) -> NodePath:
    """Express an edge type (or its negation) as a node-to-node path.

    Positive: one filter-step-filter concatenation per primitive, joined
    by union.  Negated: one term per way of refuting every primitive
    (source filter fails, label misses, or target filter fails), with
    label misses merged into a single negated label set.  The negated
    grid has 3^k terms for k primitives and is refused beyond 9.
    """
    prims = normalize_edge_type(t)
    if negated and len(prims) > 9:
        from .model import InstanceTooLarge

        raise InstanceTooLarge(
            f"negated expansion of {len(prims)} primitives would need 3^{len(prims)} terms"
        )
    if not negated:
        parts: List[NodePath] = []
        for prim in prims:
            if prim.labels is not None and not prim.labels:
                parts.append(_EMPTY_REL)
                continue
            step: NodePath
            if prim.labels is None:
                step = PNotPreds(frozenset())
            else:
                step = PPred(next(iter(prim.labels)))
            parts.append(
                PConcat(PFilter(FOfType(prim.src)), PConcat(step, PFilter(FOfType(prim.dst))))
            )
        return union_all(parts)
    terms: List[NodePath] = []
    for choice in itertools.product(("src", "label", "dst"), repeat=len(prims)):
        src_filters: List[NodePath] = []
        dst_filters: List[NodePath] = []
        excluded: Set[str] = set()
        impossible = False
        for prim, why in zip(prims, choice):
            if why == "src":
                src_filters.append(PFilter(FNotOfType(prim.src)))
            elif why == "dst":
                dst_filters.append(PFilter(FNotOfType(prim.dst)))
            else:
                if prim.labels is None:
                    impossible = True  # wildcard labels cannot miss
                    break
                excluded |= prim.labels
        if impossible:
            continue
        step = PNotPreds(frozenset(excluded))
        folded = concat_all(src_filters + [step] + dst_filters)
        assert folded is not None
        terms.append(folded)
    if not terms:
        return _EMPTY_REL
    return union_all(terms)


# ---------------------------------------------------------------------------
# Graph types


@dataclass(frozen=True)
class GraphType:
    node_types: Tuple[ContentType, ...]
    edge_types: Tuple[EdgeType, ...]
    constraints: Tuple[PgRule, ...]


def loose_graph_type(constraints: Sequence[PgRule]) -> GraphType:
    """The permissive reading: trivial node and edge type sets, so only
    the constraints bite."""
    return GraphType((CAny(),), (ET(CAny(), None, CAny()),), tuple(constraints))


@dataclass
class GraphTypeReport:
    node_violations: List[str]
    edge_violations: List[EdgeTriple]
    constraints: ValidationReport

    @property
    def valid(self) -> bool:
        return not self.node_violations and not self.edge_violations and self.constraints.valid


def validate_graph_type(
    g: CommonGraph,
    gt: GraphType,
    registry: Optional[ValueTypeRegistry] = None,
) -> GraphTypeReport:
    """Full check: every node in some node type, every edge in some
    edge type, and every constraint pair holds."""
    node_bad = sorted(
        u
        for u in g.nodes
        if not any(content_member(content(g, u), nt, registry) for nt in gt.node_types)
    )
    edge_bad = sorted(
        (e for e in g.edges if not any(edge_type_member(g, e, et, registry) for et in gt.edge_types)),
        key=lambda e: (e.s, e.p, e.o),
    )
    report = pg_validate(g, list(gt.constraints), registry)
    return GraphTypeReport(node_bad, edge_bad, report)
