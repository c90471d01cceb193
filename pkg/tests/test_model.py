import pytest

from triform.model import (
    DuplicateKeyValue,
    EdgeTriple,
    Node,
    PropTriple,
    SignedTriple,
    SortClash,
    TriformError,
    UnknownValueType,
    Val,
    ValueTypeRegistry,
    bool_v,
    build_graph,
    content,
    int_v,
    neigh,
    neigh_signed,
    str_v,
    value_type_member,
)


def test_build_graph_media_fragment(g_media_core):
    assert g_media_core.nodes == {"u2", "u3", "a1"}
    assert g_media_core.keys == {"email", "card"}
    assert g_media_core.values == {str_v("d@d.d"), int_v(1234)}


def test_build_graph_empty():
    g = build_graph([], [])
    assert g.nodes == frozenset()
    assert g.keys == frozenset()
    assert g.values == frozenset()


def test_build_graph_duplicate_key_value():
    with pytest.raises(DuplicateKeyValue):
        build_graph([], [PropTriple("u", "email", str_v("a")), PropTriple("u", "email", str_v("b"))])


def test_build_graph_duplicate_same_value_ok():
    g = build_graph([], [PropTriple("u", "email", str_v("a")), PropTriple("u", "email", str_v("a"))])
    assert g.prop("u", "email") == str_v("a")


def test_build_graph_sort_clash():
    with pytest.raises(SortClash):
        build_graph([EdgeTriple("a", "name", "b")], [PropTriple("c", "name", str_v("x"))])


def test_triple_view_round_trip(g_media):
    edges = [t for t in g_media.triple_view() if isinstance(t, EdgeTriple)]
    props = [t for t in g_media.triple_view() if isinstance(t, PropTriple)]
    assert build_graph(edges, props) == g_media


def test_content(g_media_core):
    assert content(g_media_core, "u2") == {"email": str_v("d@d.d")}
    assert content(g_media_core, "a1") == {"card": int_v(1234)}
    assert content(g_media_core, "fresh_node") == {}


def test_neigh_node(g_media_core):
    triples = neigh(g_media_core, Node("u3"))
    assert EdgeTriple("u3", "invited", "u2") in triples


def test_neigh_value_one_triple_graph():
    g = build_graph([], [PropTriple("u2", "email", str_v("d@d.d"))])
    assert neigh(g, Val(str_v("d@d.d"))) == {PropTriple("u2", "email", str_v("d@d.d"))}


def test_neigh_isolated_node(g_media_core):
    assert neigh(g_media_core, Node("nowhere")) == frozenset()


def test_neigh_value_only_prop_triples(g_media):
    for w in g_media.values:
        assert all(isinstance(t, PropTriple) for t in neigh(g_media, Val(w)))


def test_neigh_signed_loop_counted_twice():
    g = build_graph([EdgeTriple("a", "p", "a")], [])
    signed = neigh_signed(g, Node("a"))
    assert signed == {
        SignedTriple("p", False, "fwd", Node("a")),
        SignedTriple("p", False, "inv", Node("a")),
    }


def test_neigh_signed_cardinality(g_media):
    for u in g_media.nodes:
        outdeg = len(g_media.out_edges(u)) + len(g_media.node_props(u))
        indeg = len(g_media.in_edges(u))
        assert len(neigh_signed(g_media, Node(u))) == outdeg + indeg


def test_neigh_signed_value_inverse_only(g_media):
    for w in g_media.values:
        signed = neigh_signed(g_media, Val(w))
        assert signed
        assert all(t.direction == "inv" and t.is_key for t in signed)


def test_neigh_signed_isolated(g_media):
    assert neigh_signed(g_media, Node("nowhere")) == frozenset()


def test_value_type_builtins():
    assert value_type_member(int_v(1234), "int")
    assert not value_type_member(str_v("d@d.d"), "int")
    assert value_type_member(bool_v(False), "any")


def test_every_value_satisfies_any(g_media):
    for w in g_media.values:
        assert value_type_member(w, "any")


def test_value_type_unknown():
    with pytest.raises(UnknownValueType):
        value_type_member(int_v(1), "date")


def test_value_type_custom_registry():
    reg = ValueTypeRegistry()
    reg.register("even", lambda w: w.tag == "int" and w.payload % 2 == 0)
    assert value_type_member(int_v(4), "even", reg)
    assert not value_type_member(int_v(5), "even", reg)


def test_value_tag_discipline():
    assert int_v(1) != str_v("1")
    assert bool_v(True) != int_v(1)
    with pytest.raises(TriformError):
        bool_v(1)  # type: ignore[arg-type]
    with pytest.raises(TriformError):
        int_v(2**63)


def test_graph_equality_and_hash(g_media):
    twin = build_graph(list(g_media.edges), [PropTriple(n, k, w) for (n, k), w in g_media.props.items()])
    assert twin == g_media
    assert hash(twin) == hash(g_media)
    assert isinstance(repr(g_media), str)
