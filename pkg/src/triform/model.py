"""Common graph data model.

A common graph is a finite set of predicate edges between nodes plus a
functional map from (node, key) pairs to atomic values.  It is the shared
sub-model of RDF triple stores and property graphs: nodes are opaque,
edges carry a single predicate, and node properties are single-valued.

Everything here is immutable after construction.  Validators in the
dialect modules only ever read a ``CommonGraph``, so one graph can be
shared freely between concurrent evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

FWD = "fwd"
INV = "inv"


class TriformError(Exception):
    """Base class for all engine errors."""


class DuplicateKeyValue(TriformError):
    """Two property triples assign distinct values to the same (node, key)."""


class SortClash(TriformError):
    """A name is used both as a predicate and as a key."""


class UnknownValueType(TriformError):
    """A value-type identifier has no registered membership test."""


class NeighborhoodTooLarge(TriformError):
    """A signed neighborhood exceeds the configured matcher cap."""


class InstanceTooLarge(TriformError):
    """A brute-force oracle was handed an instance above its hard bound."""


class NotInFragment(TriformError):
    """A schema was passed to a compiler without passing the fragment check."""


class NotNormalized(TriformError):
    """A translation input is not in the required normal form."""


class EdgeNotInGraph(TriformError):
    """An edge argument does not occur in the graph."""


class SortError(TriformError):
    """A path expression was evaluated at a focus of the wrong sort."""


class FormatError(TriformError):
    """A JSON document does not match the expected wire format."""


@dataclass(frozen=True)
class Value:
    """Tagged atomic value: a 64-bit signed integer, a string, or a boolean.

    Equality is (tag, payload) equality: the integer ``1`` never equals
    the string ``"1"`` or the boolean ``True``.
    """

    tag: str
    payload: Union[bool, int, str]

    def __post_init__(self):
        if self.tag == "bool":
            if not isinstance(self.payload, bool):
                raise TriformError(f"bool value with non-bool payload {self.payload!r}")
        elif self.tag == "int":
            # bool is an int subclass in Python; reject it explicitly
            if isinstance(self.payload, bool) or not isinstance(self.payload, int):
                raise TriformError(f"int value with non-int payload {self.payload!r}")
            if not (INT64_MIN <= self.payload <= INT64_MAX):
                raise TriformError(f"integer {self.payload} outside the 64-bit signed range")
        elif self.tag == "str":
            if not isinstance(self.payload, str):
                raise TriformError(f"str value with non-str payload {self.payload!r}")
        else:
            raise TriformError(f"unknown value tag {self.tag!r}")


def int_v(n: int) -> Value:
    return Value("int", n)


def str_v(s: str) -> Value:
    return Value("str", s)


def bool_v(b: bool) -> Value:
    return Value("bool", b)


@dataclass(frozen=True)
class Node:
    """Focus variant: a node, identified by an opaque non-empty string."""

    id: str

    def __post_init__(self):
        if not self.id:
            raise TriformError("node identifiers must be non-empty")


@dataclass(frozen=True)
class Val:
    """Focus variant: an atomic value."""

    value: Value


Focus = Union[Node, Val]


@dataclass(frozen=True)
class EdgeTriple:
    s: str
    p: str
    o: str


@dataclass(frozen=True)
class PropTriple:
    n: str
    k: str
    v: Value


Triple = Union[EdgeTriple, PropTriple]


@dataclass(frozen=True)
class SignedTriple:
    """One element of a signed neighborhood, oriented away from the focus.

    ``direction`` is "fwd" for triples leaving the focus and "inv" for
    incoming triples flipped toward the focus.  ``endpoint`` is the far
    end (a value for forward key triples, a node otherwise).
    """

    name: str
    is_key: bool
    direction: str
    endpoint: Focus


Record = Dict[str, Value]


class ValueTypeRegistry:
    """Named value types with membership tests.

    The builtins int/str/bool test the value tag and ``any`` accepts
    everything, so every value belongs to at least one registered type.
    """

    def __init__(self):
        self._members: Dict[str, Callable[[Value], bool]] = {
            "int": lambda w: w.tag == "int",
            "str": lambda w: w.tag == "str",
            "bool": lambda w: w.tag == "bool",
            "any": lambda w: True,
        }

    def register(self, type_id: str, member: Callable[[Value], bool]) -> None:
        if not type_id:
            raise TriformError("value-type identifiers must be non-empty")
        self._members[type_id] = member

    def known(self, type_id: str) -> bool:
        return type_id in self._members

    def member(self, w: Value, type_id: str) -> bool:
        try:
            test = self._members[type_id]
        except KeyError:
            raise UnknownValueType(f"value type {type_id!r} is not registered") from None
        return bool(test(w))


DEFAULT_TYPES = ValueTypeRegistry()


def value_type_member(w: Value, type_id: str, registry: Optional[ValueTypeRegistry] = None) -> bool:
    """True iff ``w`` belongs to the named value type."""
    return (registry or DEFAULT_TYPES).member(w, type_id)


class CommonGraph:
    """Immutable common graph with precomputed adjacency indexes.

    Use :func:`build_graph`; the constructor assumes already-validated
    inputs (deduplicated edges, functional property map, disjoint
    predicate/key namespaces).
    """

    __slots__ = (
        "edges",
        "props",
        "nodes",
        "keys",
        "values",
        "preds",
        "_out_edges",
        "_in_edges",
        "_node_props",
        "_value_owners",
        "_hash",
    )

    def __init__(self, edges: FrozenSet[EdgeTriple], props: Dict[Tuple[str, str], Value]):
        self.edges = edges
        self.props = dict(props)
        nodes = set()
        keys = set()
        values = set()
        preds = set()
        out_edges: Dict[str, List[EdgeTriple]] = {}
        in_edges: Dict[str, List[EdgeTriple]] = {}
        node_props: Dict[str, Dict[str, Value]] = {}
        value_owners: Dict[Value, List[Tuple[str, str]]] = {}
        for e in edges:
            nodes.add(e.s)
            nodes.add(e.o)
            preds.add(e.p)
            out_edges.setdefault(e.s, []).append(e)
            in_edges.setdefault(e.o, []).append(e)
        for (n, k), w in self.props.items():
            nodes.add(n)
            keys.add(k)
            values.add(w)
            node_props.setdefault(n, {})[k] = w
            value_owners.setdefault(w, []).append((n, k))
        self.nodes = frozenset(nodes)
        self.keys = frozenset(keys)
        self.values = frozenset(values)
        self.preds = frozenset(preds)
        self._out_edges = out_edges
        self._in_edges = in_edges
        self._node_props = node_props
        self._value_owners = value_owners
        self._hash = hash((self.edges, frozenset(self.props.items())))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CommonGraph)
            and self.edges == other.edges
            and self.props == other.props
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"CommonGraph(|E|={len(self.edges)}, |props|={len(self.props)})"

    def out_edges(self, node: str) -> List[EdgeTriple]:
        return self._out_edges.get(node, [])

    def in_edges(self, node: str) -> List[EdgeTriple]:
        return self._in_edges.get(node, [])

    def node_props(self, node: str) -> Dict[str, Value]:
        return self._node_props.get(node, {})

    def value_owners(self, w: Value) -> List[Tuple[str, str]]:
        """All (node, key) pairs mapped to ``w``."""
        return self._value_owners.get(w, [])

    def prop(self, node: str, key: str) -> Optional[Value]:
        return self.props.get((node, key))

    def triple_view(self) -> Iterator[Triple]:
        """The graph as a set of triples: edges plus property triples."""
        for e in self.edges:
            yield e
        for (n, k), w in self.props.items():
            yield PropTriple(n, k, w)


def build_graph(edges: Iterable[EdgeTriple], props: Iterable[PropTriple]) -> CommonGraph:
    """Construct a common graph, enforcing the model invariants.

    Raises :class:`DuplicateKeyValue` if two property triples give the
    same (node, key) distinct values and :class:`SortClash` if a name is
    used both as a predicate and as a key.
    """
    edge_set = frozenset(edges)
    prop_map: Dict[Tuple[str, str], Value] = {}
    for t in props:
        old = prop_map.get((t.n, t.k))
        if old is not None and old != t.v:
            raise DuplicateKeyValue(
                f"node {t.n!r} key {t.k!r} maps to both {old!r} and {t.v!r}"
            )
        prop_map[(t.n, t.k)] = t.v
    pred_names = {e.p for e in edge_set}
    key_names = {k for (_, k) in prop_map}
    clash = pred_names & key_names
    if clash:
        raise SortClash(f"names used both as predicate and key: {sorted(clash)}")
    return CommonGraph(edge_set, prop_map)


def content(g: CommonGraph, v: str) -> Record:
    """The record of all key-value pairs attached to node ``v``.

    Empty for nodes without properties, including nodes absent from the
    graph.
    """
    return dict(g.node_props(v))


def neigh(g: CommonGraph, v: Focus) -> FrozenSet[Triple]:
    """All triples of the triple-set view whose first or last component is ``v``."""
    out: set = set()
    if isinstance(v, Node):
        for e in g.out_edges(v.id):
            out.add(e)
        for e in g.in_edges(v.id):
            out.add(e)
        for k, w in g.node_props(v.id).items():
            out.add(PropTriple(v.id, k, w))
    else:
        for (n, k) in g.value_owners(v.value):
            out.add(PropTriple(n, k, v.value))
    return frozenset(out)


def neigh_signed(g: CommonGraph, v: Focus) -> FrozenSet[SignedTriple]:
    """The signed neighborhood: outgoing triples plus flipped incoming ones.

    A loop (v, p, v) contributes two signed triples, one forward and one
    inverse.  A value focus only ever has inverse key triples.
    """
    out: set = set()
    if isinstance(v, Node):
        for e in g.out_edges(v.id):
            out.add(SignedTriple(e.p, False, FWD, Node(e.o)))
        for k, w in g.node_props(v.id).items():
            out.add(SignedTriple(k, True, FWD, Val(w)))
        for e in g.in_edges(v.id):
            out.add(SignedTriple(e.p, False, INV, Node(e.s)))
    else:
        for (n, k) in g.value_owners(v.value):
            out.add(SignedTriple(k, True, INV, Node(n)))
    return frozenset(out)


def value_sort_key(w: Value) -> Tuple[str, str]:
    """Total order on values used for deterministic iteration and reports."""
    if w.tag == "int":
        return ("int", f"{w.payload:+021d}")
    if w.tag == "bool":
        return ("bool", "1" if w.payload else "0")
    return ("str", w.payload)  # type: ignore[return-value]


def focus_sort_key(f: Focus) -> Tuple:
    if isinstance(f, Node):
        return ("n", f.id)
    return ("v",) + value_sort_key(f.value)


def signed_triple_sort_key(t: SignedTriple) -> Tuple:
    return (t.direction, t.name, focus_sort_key(t.endpoint))


def sorted_foci(foci: Iterable[Focus]) -> List[Focus]:
    return sorted(foci, key=focus_sort_key)
