"""Pure-Python bag-matching kernel.

Decides whether a flattened triple-expression program can consume a
neighborhood bitmask exactly.  Memoized dynamic programming keyed by
(program node, subset mask); sequence nodes enumerate submasks, star
nodes peel one nonempty part per step.  The compiled Cython kernel in
``_bagmatch`` implements the identical algorithm; either can serve as
the matcher backend.

Program encoding (parallel lists):
  ops[i]   one of the OP_* codes
  lefts[i]/rights[i]  child indices (-1 when unused)
  masks[i]  allowed-triple bitmask for LEAF and WILDSTAR nodes
  support[i]  union of leaf masks below node i (pruning bound)
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

OP_EPS = 0
OP_LEAF = 1
OP_SEQ = 2
OP_ALT = 3
OP_STAR = 4
OP_WILDSTAR = 5

KERNEL_NAME = "pure"


def bag_match(
    ops: List[int],
    lefts: List[int],
    rights: List[int],
    masks: List[int],
    support: List[int],
    root: int,
    full: int,
) -> bool:
    memo: Dict[Tuple[int, int], bool] = {}

    def can(i: int, m: int) -> bool:
        op = ops[i]
        if op == OP_EPS:
            return m == 0
        if op == OP_LEAF:
            return m != 0 and (m & (m - 1)) == 0 and (m & masks[i]) == m
        if op == OP_WILDSTAR:
            return (m & ~masks[i]) == 0
        if m & ~support[i]:
            return False
        key = (i, m)
        cached = memo.get(key)
        if cached is not None:
            return cached
        result = False
        if op == OP_SEQ:
            a, b = lefts[i], rights[i]
            s = m
            while True:
                if can(a, s) and can(b, m ^ s):
                    result = True
                    break
                if s == 0:
                    break
                s = (s - 1) & m
        elif op == OP_ALT:
            result = can(lefts[i], m) or can(rights[i], m)
        elif op == OP_STAR:
            if m == 0:
                result = True
            else:
                a = lefts[i]
                s = m
                while True:
                    if s != 0 and can(a, s) and can(i, m ^ s):
                        result = True
                        break
                    if s == 0:
                        break
                    s = (s - 1) & m
        else:
            raise ValueError(f"bad opcode {op}")
        memo[key] = result
        return result

    return can(root, full)


def bag_match_witness(
    ops: List[int],
    lefts: List[int],
    rights: List[int],
    masks: List[int],
    support: List[int],
    root: int,
    full: int,
) -> Optional[List[Tuple[int, int]]]:
    """Like :func:`bag_match` but reconstructs one consumption witness.

    Returns a list of (consumer node index, consumed mask) pairs covering
    ``full`` with pairwise-disjoint masks, where consumers are LEAF or
    WILDSTAR nodes, or None when there is no match.  Used by tests to
    check that no triple is consumed twice.
    """

    def can(i: int, m: int) -> bool:
        return bag_match(ops, lefts, rights, masks, support, i, m)

    out: List[Tuple[int, int]] = []

    def build(i: int, m: int) -> bool:
        op = ops[i]
        if op == OP_EPS:
            return m == 0
        if op == OP_LEAF:
            if m != 0 and (m & (m - 1)) == 0 and (m & masks[i]) == m:
                out.append((i, m))
                return True
            return False
        if op == OP_WILDSTAR:
            if (m & ~masks[i]) == 0:
                if m:
                    out.append((i, m))
                return True
            return False
        if op == OP_SEQ:
            a, b = lefts[i], rights[i]
            s = m
            while True:
                if can(a, s) and can(b, m ^ s):
                    assert build(a, s) and build(b, m ^ s)
                    return True
                if s == 0:
                    return False
                s = (s - 1) & m
        if op == OP_ALT:
            if can(lefts[i], m):
                return build(lefts[i], m)
            if can(rights[i], m):
                return build(rights[i], m)
            return False
        if op == OP_STAR:
            if m == 0:
                return True
            a = lefts[i]
            s = m
            while True:
                if s != 0 and can(a, s) and can(i, m ^ s):
                    assert build(a, s) and build(i, m ^ s)
                    return True
                if s == 0:
                    return False
                s = (s - 1) & m
        raise ValueError(f"bad opcode {op}")

    if not build(root, full):
        return None
    return out
