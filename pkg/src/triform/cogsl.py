"""The common fragment shared by all three dialects, and its compilers.

A common schema is a PG-Schema whose shapes are conjunctions of three
atom kinds: a star-free existential path, a counting atom (upper or
lower bound) over a path traversing exactly one edge or key step
flanked by filters, and a closed-content/closed-predicate guard pairing
an exact record type with a ban on unlisted outgoing predicates.  Selectors must pin the focus to
a triple with a named predicate or key (six head forms); in particular
the all-nodes selector is not expressible here, which is precisely what
SHACL and ShEx cannot say either.

The compilers rewrite each rule to a SHACL or ShEx rule with the same
graph-level verdict: the output selector is the head's plain
exists-form, and the shape becomes (not sel-as-shape) or
(translated shape), so the extra foci the widened selector picks up
pass vacuously.  Output is emitted unsimplified so each clause can be
traced back to one rewrite step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from .model import FWD, INV, NotInFragment, TriformError
from . import shacl as sh
from . import shex as sx
from .pgschema import (
    CAny,
    CBoth,
    CEmpty,
    CField,
    ContentDisjunct,
    ContentType,
    FilterKind,
    FKeyIs,
    FNotKeyIs,
    FNotOfType,
    FOfType,
    NodePath,
    PConcat,
    PFilter,
    PgGeq,
    PgLeq,
    PgPath,
    PgRule,
    PgShape,
    PInv,
    PNotPreds,
    PPred,
    PStar,
    PUnion,
    content_dnf,
    is_closed_type,
    pg_validate,
    shape_atoms,
)
from .report import ValidationReport

CommonSchema = Sequence[PgRule]

TRIVIAL_CONTENT: ContentType = CBoth(CEmpty(), CAny())
TRIVIAL_FILTER: FilterKind = FOfType(TRIVIAL_CONTENT)


@dataclass(frozen=True)
class CogslViolation:
    loc: str
    rule: str
    message: str


@dataclass
class Diagnostics:
    violations: List[CogslViolation]

    @property
    def in_fragment(self) -> bool:
        return not self.violations


# ---------------------------------------------------------------------------
# Path atom normalization


@dataclass(frozen=True)
class AFilter:
    kind: FilterKind


@dataclass(frozen=True)
class AStep:
    p: str
    inverse: bool


PathAtom = Union[AFilter, AStep]


def _push_inv(path: NodePath, flipped: bool) -> NodePath:
    if isinstance(path, PFilter):
        return path
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


def _to_disjuncts(path: NodePath) -> List[List[PathAtom]]:
    """Union normal form: a list of concatenations of filter/step atoms.

    Requires a fragment-legal body (no star, no negated predicate sets);
    run the checker first.
    """
    if isinstance(path, PFilter):
        return [[AFilter(path.kind)]]
    if isinstance(path, PPred):
        return [[AStep(path.p, False)]]
    if isinstance(path, PInv):
        inner = path.inner
        if isinstance(inner, PPred):
            return [[AStep(inner.p, True)]]
        raise NotInFragment(f"unexpected inverse of {inner!r}")
    if isinstance(path, PConcat):
        return [
            l + r for l in _to_disjuncts(path.left) for r in _to_disjuncts(path.right)
        ]
    if isinstance(path, PUnion):
        return _to_disjuncts(path.left) + _to_disjuncts(path.right)
    raise NotInFragment(f"path node {path!r} is outside the fragment")


def _peel_head(path: NodePath) -> Tuple[Optional[NodePath], Optional[NodePath]]:
    """Split a body into its leftmost atom and the remainder, if the
    leftmost position is an atom."""
    if isinstance(path, (PFilter, PPred)) or (
        isinstance(path, PInv) and isinstance(path.inner, PPred)
    ):
        return path, None
    if isinstance(path, PConcat):
        head, rest = _peel_head(path.left)
        if head is None:
            return None, None
        if rest is None:
            return head, path.right
        return head, PConcat(rest, path.right)
    return None, None


# ---------------------------------------------------------------------------
# Classified rules (built by the checker, consumed by the compilers)


@dataclass(frozen=True)
class CountAtom:
    kind: str  # "leq" | "geq"
    n: int
    step: str  # "pred" | "inv_pred" | "key" | "inv_key"
    name: str
    left: Tuple[FilterKind, ...]  # filters before the step (node side)
    right: Tuple[FilterKind, ...]  # filters after the step


@dataclass(frozen=True)
class GuardAtom:
    tau: ContentType  # closed content type
    preds: Tuple[str, ...]  # allowed outgoing predicates


@dataclass(frozen=True)
class ExistsAtom:
    path: PgPath


ClassifiedAtom = Union[CountAtom, GuardAtom, ExistsAtom]


@dataclass(frozen=True)
class ClassifiedSel:
    form: str  # "key" | "pred" | "inv_pred" | "key_is" | "key_type" | "inv_key"
    name: str
    path: PgPath


@dataclass(frozen=True)
class ClassifiedRule:
    sel: ClassifiedSel
    atoms: Tuple[ClassifiedAtom, ...]


class _Check:
    def __init__(self):
        self.violations: List[CogslViolation] = []

    def add(self, loc: str, rule: str, message: str) -> None:
        self.violations.append(CogslViolation(loc, rule, message))


def _is_open_content(t: ContentType) -> bool:
    """Accept the guarded forms tau & top (and the bare top shorthand)."""
    if isinstance(t, CAny):
        return True
    if isinstance(t, CBoth):
        if isinstance(t.right, CAny) and is_closed_type(t.left):
            return True
        if isinstance(t.left, CAny) and is_closed_type(t.right):
            return True
    return False


def _open_kernel(t: ContentType) -> ContentType:
    """The tau of a guarded open type tau & top."""
    if isinstance(t, CAny):
        return CEmpty()
    assert isinstance(t, CBoth)
    return t.left if isinstance(t.right, CAny) else t.right


def _check_filter(ck: _Check, loc: str, kind: FilterKind) -> None:
    if isinstance(kind, (FKeyIs, FNotKeyIs)):
        return
    if isinstance(kind, (FOfType, FNotOfType)):
        if not _is_open_content(kind.t):
            ck.add(loc, "open-content-only", "content types in paths must have the form tau & top")
        return
    ck.add(loc, "path-shape", f"unknown filter {kind!r}")


def _check_body(ck: _Check, loc: str, path: NodePath) -> None:
    if isinstance(path, PStar):
        ck.add(loc, "star-free", "Kleene star is not allowed in common schemas")
        _check_body(ck, loc, path.inner)
        return
    if isinstance(path, PNotPreds):
        ck.add(loc, "no-not-preds", "negated predicate sets may only appear in the closure guard")
        return
    if isinstance(path, PFilter):
        _check_filter(ck, loc, path.kind)
        return
    if isinstance(path, PPred):
        return
    if isinstance(path, PInv):
        _check_body(ck, loc, path.inner)
        return
    if isinstance(path, (PConcat, PUnion)):
        _check_body(ck, loc, path.left)
        _check_body(ck, loc, path.right)
        return
    ck.add(loc, "path-shape", f"unknown path node {path!r}")


def _body_ok(path: Optional[NodePath]) -> bool:
    probe = _Check()
    if path is not None:
        _check_body(probe, "", path)
    return not probe.violations


def _is_trivial_body(body: Optional[NodePath]) -> bool:
    if body is None:
        return True
    return isinstance(body, PFilter) and isinstance(body.kind, FOfType) and (
        isinstance(body.kind.t, CAny) or body.kind.t == TRIVIAL_CONTENT
    )


def _filters_only(path: Optional[NodePath]) -> Optional[List[FilterKind]]:
    """The filter list of a pure filter concatenation, else None."""
    if path is None:
        return []
    if isinstance(path, PFilter):
        return [path.kind]
    if isinstance(path, PConcat):
        left = _filters_only(path.left)
        right = _filters_only(path.right)
        if left is None or right is None:
            return None
        return left + right
    return None


def _classify_count(
    ck: _Check, loc: str, kind: str, n: int, path: PgPath
) -> Optional[CountAtom]:
    """Counting atoms traverse exactly one edge or key step flanked by filters."""
    if path.src_key is not None:
        filters = _filters_only(path.body and _push_inv(path.body, False))
        if path.dst_key is not None or filters is None:
            ck.add(loc, "count-path", "counting paths traverse exactly one edge or key step")
            return None
        for f in filters:
            _check_filter(ck, loc, f)
        return CountAtom(kind, n, "inv_key", path.src_key, (), tuple(filters))
    if path.dst_key is not None:
        filters = _filters_only(path.body and _push_inv(path.body, False))
        if filters is None:
            ck.add(loc, "count-path", "counting paths traverse exactly one edge or key step")
            return None
        for f in filters:
            _check_filter(ck, loc, f)
        return CountAtom(kind, n, "key", path.dst_key, tuple(filters), ())
    if path.body is None:
        ck.add(loc, "count-path", "counting paths traverse exactly one edge or key step")
        return None
    body = _push_inv(path.body, False)
    disjuncts_ok = True
    try:
        disjuncts = _to_disjuncts(body)
    except (NotInFragment, TriformError):
        disjuncts_ok = False
        disjuncts = []
    if not disjuncts_ok or len(disjuncts) != 1:
        _check_body(ck, loc, body)
        ck.add(loc, "count-path", "counting paths must be a single filtered step")
        return None
    atoms = disjuncts[0]
    steps = [a for a in atoms if isinstance(a, AStep)]
    if len(steps) != 1:
        ck.add(loc, "count-path", "counting paths traverse exactly one edge or key step")
        return None
    idx = atoms.index(steps[0])
    left = [a.kind for a in atoms[:idx]]  # type: ignore[union-attr]
    right = [a.kind for a in atoms[idx + 1 :]]  # type: ignore[union-attr]
    for f in left + right:
        _check_filter(ck, loc, f)
    step = steps[0]
    return CountAtom(
        kind, n, "inv_pred" if step.inverse else "pred", step.p, tuple(left), tuple(right)
    )


def _classify_shape(ck: _Check, loc: str, shape: PgShape) -> Tuple[ClassifiedAtom, ...]:
    atoms = shape_atoms(shape)
    guards_tau: List[Tuple[int, ContentType]] = []
    guards_preds: List[Tuple[int, Tuple[str, ...]]] = []
    out: List[Tuple[int, ClassifiedAtom]] = []
    for j, atom in enumerate(atoms):
        aloc = f"{loc}.atoms[{j}]"
        path = atom.path
        body = path.body
        if (
            isinstance(atom, PgGeq)
            and atom.n == 1
            and path.src_key is None
            and path.dst_key is None
            and isinstance(body, PFilter)
            and isinstance(body.kind, FOfType)
            and is_closed_type(body.kind.t)
        ):
            guards_tau.append((j, body.kind.t))
            continue
        if (
            isinstance(atom, PgLeq)
            and atom.n == 0
            and path.src_key is None
            and path.dst_key is None
            and isinstance(body, PNotPreds)
        ):
            guards_preds.append((j, tuple(sorted(body.excluded))))
            continue
        if isinstance(atom, PgGeq) and atom.n == 1:
            if body is not None:
                _check_body(ck, aloc, _push_inv(body, False))
            out.append((j, ExistsAtom(path)))
            continue
        kind = "geq" if isinstance(atom, PgGeq) else "leq"
        counted = _classify_count(ck, aloc, kind, atom.n, path)
        if counted is not None:
            out.append((j, counted))
    if len(guards_tau) != len(guards_preds):
        if len(guards_tau) > len(guards_preds):
            ck.add(
                loc,
                "guard-pairing",
                "closed content types must pair with a negated-predicate-set ban",
            )
        else:
            ck.add(
                loc,
                "guard-pairing",
                "negated predicate sets must pair with a closed content type",
            )
    for (j1, tau), (_, preds) in zip(guards_tau, guards_preds):
        out.append((j1, GuardAtom(tau, preds)))
    out.sort(key=lambda pair: pair[0])
    return tuple(atom for _, atom in out)


def _classify_selector(ck: _Check, loc: str, sel: PgShape) -> Optional[ClassifiedSel]:
    if not isinstance(sel, PgGeq) or sel.n != 1:
        ck.add(loc, "selector-form", "common selectors are existential path shapes")
        return None
    path = sel.path
    if path.src_key is not None:
        if path.body is not None:
            _check_body(ck, loc, _push_inv(path.body, False))
        return ClassifiedSel("inv_key", path.src_key, path)
    body = path.body
    if _is_trivial_body(body) and path.dst_key is not None:
        return ClassifiedSel("key", path.dst_key, path)
    if body is None:
        ck.add(loc, "selector-form", "selector must name a predicate or key")
        return None
    body = _push_inv(body, False)
    head, rest = _peel_head(body)
    if rest is not None:
        _check_body(ck, loc, rest)
    if isinstance(head, PPred):
        return ClassifiedSel("pred", head.p, path)
    if isinstance(head, PInv) and isinstance(head.inner, PPred):
        return ClassifiedSel("inv_pred", head.inner.p, path)
    if isinstance(head, PFilter):
        kind = head.kind
        if isinstance(kind, FKeyIs):
            return ClassifiedSel("key_is", kind.k, path)
        if (
            isinstance(kind, FOfType)
            and isinstance(kind.t, CBoth)
            and isinstance(kind.t.right, CAny)
            and isinstance(kind.t.left, CField)
        ):
            return ClassifiedSel("key_type", kind.t.left.k, path)
    ck.add(
        loc,
        "selector-form",
        "selector head must be a key, predicate, inverse step, or single-key filter "
        "(the universal selector is not expressible in SHACL or ShEx)",
    )
    return None


def _classify(rules: CommonSchema) -> Tuple[Diagnostics, List[ClassifiedRule]]:
    ck = _Check()
    classified: List[ClassifiedRule] = []
    for i, (sel, shape) in enumerate(rules):
        sel_c = _classify_selector(ck, f"rules[{i}].selector", sel)
        atoms = _classify_shape(ck, f"rules[{i}].shape", shape)
        if sel_c is not None:
            sel_sort = "value" if sel_c.form == "inv_key" else "node"
            for atom in atoms:
                atom_sort = "node"
                if isinstance(atom, ExistsAtom):
                    atom_sort = atom.path.src_sort
                elif isinstance(atom, CountAtom) and atom.step == "inv_key":
                    atom_sort = "value"
                if atom_sort != sel_sort:
                    ck.add(
                        f"rules[{i}]",
                        "sort-match",
                        "selector and shape must agree on the focus sort",
                    )
                    break
            classified.append(ClassifiedRule(sel_c, atoms))
    return Diagnostics(ck.violations), classified


def check_common(rules: CommonSchema) -> Diagnostics:
    """Structural fragment check; empty diagnostics iff in the fragment."""
    diags, _ = _classify(rules)
    return diags


def _require_common(rules: CommonSchema) -> List[ClassifiedRule]:
    diags, classified = _classify(rules)
    if not diags.in_fragment:
        first = diags.violations[0]
        raise NotInFragment(f"{first.loc}: {first.message} ({len(diags.violations)} violations)")
    return classified


def cogsl_validate(g, rules: CommonSchema, registry=None) -> ValidationReport:
    """Common schemas inherit PG-Schema semantics."""
    _require_common(rules)
    return pg_validate(g, list(rules), registry)


# ---------------------------------------------------------------------------
# Translation to SHACL


def _open_disjuncts(t: ContentType) -> List[ContentDisjunct]:
    disjuncts = content_dnf(t)
    assert all(d.open for d in disjuncts), "path content types must be open"
    return disjuncts


def _content_to_shacl(t: ContentType) -> sh.ShaclShape:
    shapes = []
    for d in _open_disjuncts(t):
        conj = [sh.exists(sh.Step(k), sh.TestType(vt)) for k, vt in d.reqs]
        shapes.append(sh.and_all(conj))
    return sh.or_all(shapes)


def _filter_to_shacl(kind: FilterKind) -> sh.ShaclShape:
    if isinstance(kind, FKeyIs):
        return sh.exists(sh.Step(kind.k), sh.TestConst(kind.c))
    if isinstance(kind, FNotKeyIs):
        return sh.Not(sh.exists(sh.Step(kind.k), sh.TestConst(kind.c)))
    if isinstance(kind, FOfType):
        return _content_to_shacl(kind.t)
    if isinstance(kind, FNotOfType):
        return sh.Not(_content_to_shacl(kind.t))
    raise TriformError(f"unknown filter {kind!r}")


def _filters_to_shacl(filters: Sequence[FilterKind]) -> sh.ShaclShape:
    return sh.and_all([_filter_to_shacl(f) for f in filters])


def _shacl_step(step: str, name: str) -> sh.PathExpr:
    if step in ("pred", "key"):
        return sh.Step(name)
    return sh.Inverse(sh.Step(name))


def _atoms_to_shacl(atoms: List[PathAtom]) -> sh.ShaclShape:
    """Existential concatenation, rightmost first (Lemma-style recursion)."""
    if not atoms:
        return sh.Top()
    head, rest = atoms[0], atoms[1:]
    if isinstance(head, AFilter):
        if not rest:
            return _filter_to_shacl(head.kind)
        return sh.And(_filter_to_shacl(head.kind), _atoms_to_shacl(rest))
    step = sh.Inverse(sh.Step(head.p)) if head.inverse else sh.Step(head.p)
    return sh.GeqCount(1, step, _atoms_to_shacl(rest))


def _exists_to_shacl(path: PgPath) -> sh.ShaclShape:
    disjuncts = _to_disjuncts(_push_inv(path.body, False)) if path.body is not None else [[]]
    shapes = []
    for concat in disjuncts:
        atoms: List[PathAtom] = list(concat)
        if path.dst_key is not None:
            # a trailing key step needs no filter after it
            shapes.append(_atoms_to_shacl_with_key(atoms, path.dst_key))
            continue
        if atoms and isinstance(atoms[-1], AStep):
            atoms.append(AFilter(TRIVIAL_FILTER))
        shapes.append(_atoms_to_shacl(atoms))
    out = sh.or_all(shapes)
    if path.src_key is not None:
        out = sh.GeqCount(1, sh.Inverse(sh.Step(path.src_key)), out)
    return out


def _atoms_to_shacl_with_key(atoms: List[PathAtom], key: str) -> sh.ShaclShape:
    if not atoms:
        return sh.exists(sh.Step(key), sh.Top())
    head, rest = atoms[0], atoms[1:]
    if isinstance(head, AFilter):
        return sh.And(_filter_to_shacl(head.kind), _atoms_to_shacl_with_key(rest, key))
    step = sh.Inverse(sh.Step(head.p)) if head.inverse else sh.Step(head.p)
    return sh.GeqCount(1, step, _atoms_to_shacl_with_key(rest, key))


def _count_to_shacl(atom: CountAtom) -> sh.ShaclShape:
    if atom.kind == "geq" and atom.n == 0:
        return sh.Top()
    step = _shacl_step(atom.step if atom.step != "inv_key" else "inv", atom.name)
    body = sh.Top() if atom.step == "key" else _filters_to_shacl(atom.right)
    left = _filters_to_shacl(atom.left) if atom.left else None
    if atom.kind == "geq":
        count: sh.ShaclShape = sh.GeqCount(atom.n, step, body)
        return count if left is None else sh.And(left, count)
    count = sh.LeqCount(atom.n, step, body)
    return count if left is None else sh.Or(sh.Not(left), count)


def _guard_to_shacl(atom: GuardAtom) -> sh.ShaclShape:
    shapes = []
    for d in content_dnf(atom.tau):
        assert not d.open
        conj: List[sh.ShaclShape] = [sh.exists(sh.Step(k), sh.TestType(vt)) for k, vt in d.reqs]
        allowed = frozenset(d.req_keys()) | frozenset(atom.preds)
        conj.append(sh.Closed(allowed))
        shapes.append(sh.and_all(conj))
    return sh.or_all(shapes)


_SHACL_SEL = {
    "key": lambda name: sh.ExistsOut(name),
    "pred": lambda name: sh.ExistsOut(name),
    "inv_pred": lambda name: sh.ExistsIn(name),
    "key_is": lambda name: sh.ExistsOut(name),
    "key_type": lambda name: sh.ExistsOut(name),
    "inv_key": lambda name: sh.ExistsIn(name),
}


def cogsl_to_shacl(rules: CommonSchema) -> List[sh.ShaclRule]:
    """Compile a common schema to an equivalent SHACL schema, rule by rule."""
    out: List[sh.ShaclRule] = []
    for rule in _require_common(rules):
        sel_shape = _exists_to_shacl(rule.sel.path)
        parts: List[sh.ShaclShape] = []
        for atom in rule.atoms:
            if isinstance(atom, ExistsAtom):
                parts.append(_exists_to_shacl(atom.path))
            elif isinstance(atom, CountAtom):
                parts.append(_count_to_shacl(atom))
            else:
                parts.append(_guard_to_shacl(atom))
        shape = sh.and_all(parts)
        out.append((_SHACL_SEL[rule.sel.form](rule.sel.name), sh.Or(sh.Not(sel_shape), shape)))
    return out


# ---------------------------------------------------------------------------
# Translation to ShEx


def _one_tc(name: str, direction: str, body: sx.ShexShape) -> sx.ShexShape:
    return sx.SNeigh(sx.TC(name, direction, body), sx.Open(sx.NO_NAMES, sx.NO_NAMES))


def _content_to_shex(t: ContentType) -> sx.ShexShape:
    shapes = []
    for d in _open_disjuncts(t):
        conj = [_one_tc(k, FWD, sx.STestType(vt)) for k, vt in d.reqs]
        shapes.append(sx.sand_all(conj))
    return sx.sor_all(shapes)


def _filter_to_shex(kind: FilterKind) -> sx.ShexShape:
    if isinstance(kind, FKeyIs):
        return _one_tc(kind.k, FWD, sx.STestConst(kind.c))
    if isinstance(kind, FNotKeyIs):
        return sx.SNot(_one_tc(kind.k, FWD, sx.STestConst(kind.c)))
    if isinstance(kind, FOfType):
        return _content_to_shex(kind.t)
    if isinstance(kind, FNotOfType):
        return sx.SNot(_content_to_shex(kind.t))
    raise TriformError(f"unknown filter {kind!r}")


def _filters_to_shex(filters: Sequence[FilterKind]) -> sx.ShexShape:
    return sx.sand_all([_filter_to_shex(f) for f in filters])


def _atoms_to_shex(atoms: List[PathAtom], dst_key: Optional[str]) -> sx.ShexShape:
    if not atoms:
        if dst_key is not None:
            return _one_tc(dst_key, FWD, sx.top_shape())
        return sx.top_shape()
    head, rest = atoms[0], atoms[1:]
    if isinstance(head, AFilter):
        tail = _atoms_to_shex(rest, dst_key)
        if not rest and dst_key is None:
            return _filter_to_shex(head.kind)
        return sx.SAnd(_filter_to_shex(head.kind), tail)
    direction = INV if head.inverse else FWD
    return _one_tc(head.p, direction, _atoms_to_shex(rest, dst_key))


def _exists_to_shex(path: PgPath) -> sx.ShexShape:
    disjuncts = _to_disjuncts(_push_inv(path.body, False)) if path.body is not None else [[]]
    shapes = []
    for concat in disjuncts:
        atoms: List[PathAtom] = list(concat)
        if path.dst_key is None and atoms and isinstance(atoms[-1], AStep):
            atoms.append(AFilter(TRIVIAL_FILTER))
        shapes.append(_atoms_to_shex(atoms, path.dst_key))
    out = sx.sor_all(shapes)
    if path.src_key is not None:
        out = _one_tc(path.src_key, INV, out)
    return out


def _count_tc(atom: CountAtom) -> sx.TC:
    if atom.step == "key":
        return sx.TC(atom.name, FWD, sx.top_shape())
    body = _filters_to_shex(atom.right)
    direction = FWD if atom.step == "pred" else INV
    return sx.TC(atom.name, direction, body)


def _count_to_shex(atom: CountAtom) -> sx.ShexShape:
    if atom.kind == "geq" and atom.n == 0:
        return sx.top_shape()
    tc = _count_tc(atom)
    left = _filters_to_shex(atom.left) if atom.left else None
    if atom.kind == "geq":
        reps = sx.desugar_repetition(tc, "exactly", atom.n)
        counted: sx.ShexShape = sx.SNeigh(reps, sx.Open(sx.NO_NAMES, sx.NO_NAMES))
        return counted if left is None else sx.SAnd(left, counted)
    reps = sx.desugar_repetition(tc, "exactly", atom.n + 1)
    counted = sx.SNot(sx.SNeigh(reps, sx.Open(sx.NO_NAMES, sx.NO_NAMES)))
    return counted if left is None else sx.SOr(sx.SNot(left), counted)


def _names_star(names: Sequence[str]) -> Optional[sx.TripleExpr]:
    ordered = sorted(set(names))
    if not ordered:
        return None
    return sx.StarE(sx.alt_all([sx.TC(nm, FWD, sx.top_shape()) for nm in ordered]))


def _guard_to_shex(atom: GuardAtom) -> sx.ShexShape:
    shapes = []
    for d in content_dnf(atom.tau):
        assert not d.open
        parts = [e for e in (_names_star(sorted(d.req_keys())), _names_star(atom.preds)) if e]
        closure = sx.SNeigh(sx.seq_all(parts), sx.HalfOpen(sx.NO_NAMES))
        if d.reqs:
            content = sx.sand_all([_one_tc(k, FWD, sx.STestType(vt)) for k, vt in d.reqs])
            shapes.append(sx.SAnd(content, closure))
        else:
            shapes.append(closure)
    return sx.sor_all(shapes)


_SHEX_SEL = {
    "key": lambda name: sx.SelOut(name),
    "pred": lambda name: sx.SelOut(name),
    "inv_pred": lambda name: sx.SelIn(name),
    "key_is": lambda name: sx.SelOut(name),
    "key_type": lambda name: sx.SelOut(name),
    "inv_key": lambda name: sx.SelIn(name),
}


def cogsl_to_shex(rules: CommonSchema) -> List[sx.ShexRule]:
    """Compile a common schema to an equivalent ShEx schema, rule by rule."""
    out: List[sx.ShexRule] = []
    for rule in _require_common(rules):
        sel_shape = _exists_to_shex(rule.sel.path)
        parts: List[sx.ShexShape] = []
        for atom in rule.atoms:
            if isinstance(atom, ExistsAtom):
                parts.append(_exists_to_shex(atom.path))
            elif isinstance(atom, CountAtom):
                parts.append(_count_to_shex(atom))
            else:
                parts.append(_guard_to_shex(atom))
        shape = sx.sand_all(parts)
        out.append((_SHEX_SEL[rule.sel.form](rule.sel.name), sx.SOr(sx.SNot(sel_shape), shape)))
    return out
