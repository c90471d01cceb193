"""Canonical example graphs and schemas used in tests and the docs.

``media_core_graph`` is the minimal four-triple fragment of the media
service whose triples are fixed; ``media_graph`` extends it to the full
six-node service (four users, two accounts, ownership/access/invitation
edges, privilege flags) so that all five running constraints hold:

  C1  card values are integers
  C2  account owners have an email
  C3  an email value identifies at most one user
  C4  accessors of a privileged account are privileged
  C5  a user with an email has access to at most 5 accounts

Each constraint is encoded three times, once per dialect, following the
running formulations; ``media_mutations`` yields five broken variants,
each violating exactly one constraint in every dialect.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .model import (
    FWD,
    INV,
    CommonGraph,
    EdgeTriple,
    PropTriple,
    bool_v,
    build_graph,
    int_v,
    str_v,
)
from . import shacl as sh
from . import shex as sx
from .pgschema import (
    CAny,
    CBoth,
    CField,
    FKeyIs,
    FNotKeyIs,
    FOfType,
    PConcat,
    PFilter,
    PgGeq,
    PgLeq,
    PgPath,
    PgRule,
    PInv,
    PPred,
    inv_key_path,
    key_path,
    pred_path,
)


def media_core_graph() -> CommonGraph:
    """Exactly the stated triples: two edges and two properties."""
    return build_graph(
        [EdgeTriple("u2", "hasAccess", "a1"), EdgeTriple("u3", "invited", "u2")],
        [PropTriple("u2", "email", str_v("d@d.d")), PropTriple("a1", "card", int_v(1234))],
    )


def media_edges() -> List[EdgeTriple]:
    return [
        EdgeTriple("u1", "ownsAccount", "a1"),
        EdgeTriple("u4", "ownsAccount", "a2"),
        EdgeTriple("u1", "hasAccess", "a1"),
        EdgeTriple("u2", "hasAccess", "a1"),
        EdgeTriple("u4", "hasAccess", "a2"),
        EdgeTriple("u3", "invited", "u2"),
        EdgeTriple("u1", "invited", "u3"),
    ]


def media_props() -> List[PropTriple]:
    return [
        PropTriple("u1", "email", str_v("a@a.a")),
        PropTriple("u2", "email", str_v("d@d.d")),
        PropTriple("u3", "email", str_v("c@c.c")),
        PropTriple("u4", "email", str_v("b@b.b")),
        PropTriple("a1", "card", int_v(1234)),
        PropTriple("u1", "privileged", bool_v(True)),
        PropTriple("u2", "privileged", bool_v(True)),
        PropTriple("a1", "privileged", bool_v(True)),
        PropTriple("a2", "privileged", bool_v(False)),
    ]


def media_graph() -> CommonGraph:
    return build_graph(media_edges(), media_props())


def media_shacl_rules() -> List[sh.ShaclRule]:
    c1 = (sh.ExistsIn("card"), sh.TestType("int"))
    c2 = (sh.ExistsOut("ownsAccount"), sh.exists(sh.Step("email")))
    c3 = (sh.ExistsIn("email"), sh.LeqCount(1, sh.Inverse(sh.Step("email")), sh.Top()))
    c4 = (
        sh.ExistsOut("card"),
        sh.Or(
            sh.exists(sh.Step("privileged"), sh.Not(sh.TestConst(bool_v(True)))),
            sh.forall(
                sh.Inverse(sh.Step("hasAccess")),
                sh.exists(sh.Step("privileged"), sh.TestConst(bool_v(True))),
            ),
        ),
    )
    c5 = (sh.ExistsOut("email"), sh.LeqCount(5, sh.Step("hasAccess"), sh.Top()))
    return [c1, c2, c3, c4, c5]


def media_shex_rules() -> List[sx.ShexRule]:
    top = sx.top_shape()
    c1 = (sx.SelIn("card"), sx.STestType("int"))
    c2 = (
        sx.SelOut("ownsAccount"),
        sx.SNeigh(sx.TC("email", FWD, top), sx.Open(sx.NO_NAMES, sx.NO_NAMES)),
    )
    c3 = (
        sx.SelIn("email"),
        sx.open_closure(sx.desugar_repetition(sx.TC("email", INV, top), "at-most", 1)),
    )
    c4 = (
        sx.SelOut("card"),
        sx.SOr(
            sx.open_closure(sx.TC("privileged", FWD, sx.SNot(sx.STestConst(bool_v(True))))),
            sx.open_closure(
                sx.StarE(
                    sx.TC(
                        "hasAccess",
                        INV,
                        sx.open_closure(sx.TC("privileged", FWD, sx.STestConst(bool_v(True)))),
                    )
                )
            ),
        ),
    )
    c5 = (
        sx.SelOut("email"),
        sx.open_closure(sx.desugar_repetition(sx.TC("hasAccess", FWD, top), "at-most", 5)),
    )
    return [c1, c2, c3, c4, c5]


def media_pg_rules() -> List[PgRule]:
    c1 = (
        PgGeq(1, key_path("card")),
        PgGeq(1, PgPath(None, PFilter(FOfType(CBoth(CField("card", "int"), CAny()))), None)),
    )
    c2 = (PgGeq(1, pred_path("ownsAccount")), PgGeq(1, key_path("email")))
    c3 = (PgGeq(1, inv_key_path("email")), PgLeq(1, inv_key_path("email")))
    c4 = (
        PgGeq(
            1,
            PgPath(
                None,
                PConcat(
                    PFilter(FOfType(CBoth(CField("card", "any"), CAny()))),
                    PFilter(FKeyIs("privileged", bool_v(True))),
                ),
                None,
            ),
        ),
        PgLeq(
            0,
            PgPath(
                None,
                PConcat(PInv(PPred("hasAccess")), PFilter(FNotKeyIs("privileged", bool_v(True)))),
                None,
            ),
        ),
    )
    c5 = (PgGeq(1, key_path("email")), PgLeq(5, pred_path("hasAccess")))
    return [c1, c2, c3, c4, c5]


def media_mutations() -> Dict[str, Tuple[CommonGraph, int]]:
    """Five broken variants, each paired with the index of the one rule
    it violates (C1..C5 are indices 0..4)."""
    edges = media_edges()
    props = media_props()

    card_string = [p for p in props if p.k != "card"] + [PropTriple("a1", "card", str_v("oops"))]

    owner_no_email = [p for p in props if not (p.n == "u4" and p.k == "email")]

    duplicate_email = [p for p in props if not (p.n == "u3" and p.k == "email")] + [
        PropTriple("u3", "email", str_v("d@d.d"))
    ]

    unprivileged = [p for p in props if not (p.n == "u2" and p.k == "privileged")] + [
        PropTriple("u2", "privileged", bool_v(False))
    ]

    six_access = edges + [EdgeTriple("u2", "hasAccess", a) for a in ("a2", "a3", "a4", "a5", "a6")]

    return {
        "card_as_string": (build_graph(edges, card_string), 0),
        "owner_without_email": (build_graph(edges, owner_no_email), 1),
        "duplicated_email": (build_graph(edges, duplicate_email), 2),
        "unprivileged_accessor": (build_graph(edges, unprivileged), 3),
        "six_access_edges": (build_graph(six_access, props), 4),
    }


def counting_pair() -> Tuple[CommonGraph, CommonGraph, str]:
    """The two-graph family distinguishing node counting from triple
    counting: a user owning and accessing one account, versus the
    crosswise doubled variant where each user reaches two accounts.
    Returns (left, right, hub node id)."""
    left = build_graph(
        [EdgeTriple("u", "hasAccess", "a"), EdgeTriple("u", "ownsAccount", "a")], []
    )
    right = build_graph(
        [
            EdgeTriple("u", "ownsAccount", "a"),
            EdgeTriple("u2", "ownsAccount", "a2"),
            EdgeTriple("u", "hasAccess", "a2"),
            EdgeTriple("u2", "hasAccess", "a"),
        ],
        [],
    )
    return left, right, "u"


def counting_shacl_rule() -> sh.ShaclRule:
    """Exactly two nodes reachable over hasAccess or ownsAccount."""
    path = sh.PathUnion(sh.Step("hasAccess"), sh.Step("ownsAccount"))
    return (sh.ExistsOut("hasAccess"), sh.count_eq(2, path))


def counting_shex_shape() -> sx.ShexShape:
    """Exactly two outgoing hasAccess/ownsAccount triples (incoming free)."""
    alt = sx.Alt(
        sx.TC("hasAccess", FWD, sx.top_shape()), sx.TC("ownsAccount", FWD, sx.top_shape())
    )
    return sx.SNeigh(sx.desugar_repetition(alt, "exactly", 2), sx.HalfOpen(sx.NO_NAMES))
