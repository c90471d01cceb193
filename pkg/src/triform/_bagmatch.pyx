# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled bag-matching kernel.

Same algorithm as ``_bagmatch_py``: memoized subset DP over a flattened
triple-expression program.  Masks are limited to 32 triples here; the
driver routes larger neighborhoods to the pure kernel.
"""

from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libc.stdint cimport int32_t, uint32_t, uint64_t

KERNEL_NAME = "compiled"

MAX_BITS = 32

DEF OP_EPS = 0
DEF OP_LEAF = 1
DEF OP_SEQ = 2
DEF OP_ALT = 3
DEF OP_STAR = 4
DEF OP_WILDSTAR = 5


cdef class _Program:
    cdef vector[int32_t] ops
    cdef vector[int32_t] lefts
    cdef vector[int32_t] rights
    cdef vector[uint32_t] masks
    cdef vector[uint32_t] support
    cdef unordered_map[uint64_t, char] memo

    cdef bint can(self, int32_t i, uint32_t m) except? -1:
        cdef int32_t op = self.ops[i]
        cdef int32_t a, b
        cdef uint32_t s
        cdef uint64_t key
        cdef bint result
        if op == OP_EPS:
            return m == 0
        if op == OP_LEAF:
            return m != 0 and (m & (m - 1)) == 0 and (m & self.masks[i]) == m
        if op == OP_WILDSTAR:
            return (m & ~self.masks[i]) == 0
        if m & ~self.support[i]:
            return False
        key = (<uint64_t> i << 32) | m
        it = self.memo.find(key)
        if it != self.memo.end():
            return <bint> self.memo[key]
        result = False
        if op == OP_SEQ:
            a = self.lefts[i]
            b = self.rights[i]
            s = m
            while True:
                if self.can(a, s) and self.can(b, m ^ s):
                    result = True
                    break
                if s == 0:
                    break
                s = (s - 1) & m
        elif op == OP_ALT:
            result = self.can(self.lefts[i], m) or self.can(self.rights[i], m)
        elif op == OP_STAR:
            if m == 0:
                result = True
            else:
                a = self.lefts[i]
                s = m
                while True:
                    if s != 0 and self.can(a, s) and self.can(i, m ^ s):
                        result = True
                        break
                    if s == 0:
                        break
                    s = (s - 1) & m
        else:
            raise ValueError(f"bad opcode {op}")
        self.memo[key] = <char> result
        return result


def bag_match(ops, lefts, rights, masks, support, root, full):
    cdef _Program prog = _Program()
    cdef Py_ssize_t n = len(ops)
    cdef Py_ssize_t i
    prog.ops.reserve(n)
    prog.lefts.reserve(n)
    prog.rights.reserve(n)
    prog.masks.reserve(n)
    prog.support.reserve(n)
    for i in range(n):
        prog.ops.push_back(<int32_t> ops[i])
        prog.lefts.push_back(<int32_t> lefts[i])
        prog.rights.push_back(<int32_t> rights[i])
        prog.masks.push_back(<uint32_t> masks[i])
        prog.support.push_back(<uint32_t> support[i])
    return bool(prog.can(<int32_t> root, <uint32_t> full))
