# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled three-level address-set bitmap (9/9/14 split).

Same contract as bitmap_py.BitmapCore, with real pointer-table levels:
a 512-entry root of second-level tables, 512-entry tables of 2 KiB leaf
bitmaps, all allocated on first touch. The hot paths (per-access insert
and the pairwise conflict scans) run as plain C loops.
"""

from libc.stdlib cimport calloc, free
from libc.stdint cimport uint8_t, uint32_t, uint64_t

DEF FAN = 512
DEF LEAF_BYTES = 2048

NODE_PAYLOAD = 2048

cdef class BitmapCore:
    cdef void **_root
    cdef Py_ssize_t _mids, _leaves
    cdef uint64_t _count

    def __cinit__(self):
        self._root = <void **>calloc(FAN, sizeof(void *))
        if self._root == NULL:
            raise MemoryError()
        self._mids = 0
        self._leaves = 0
        self._count = 0

    def __dealloc__(self):
        cdef Py_ssize_t r, m
        cdef void **mid
        if self._root == NULL:
            return
        for r in range(FAN):
            mid = <void **>self._root[r]
            if mid == NULL:
                continue
            for m in range(FAN):
                if mid[m] != NULL:
                    free(mid[m])
            free(mid)
        free(self._root)
        self._root = NULL

    cdef uint8_t *_leaf(self, uint32_t addr, bint create) except? NULL:
        cdef Py_ssize_t r = addr >> 23
        cdef Py_ssize_t m = (addr >> 14) & 0x1FF
        cdef void **mid = <void **>self._root[r]
        cdef uint8_t *leaf
        if mid == NULL:
            if not create:
                return NULL
            mid = <void **>calloc(FAN, sizeof(void *))
            if mid == NULL:
                raise MemoryError()
            self._root[r] = mid
            self._mids += 1
        leaf = <uint8_t *>mid[m]
        if leaf == NULL and create:
            leaf = <uint8_t *>calloc(LEAF_BYTES, 1)
            if leaf == NULL:
                raise MemoryError()
            mid[m] = leaf
            self._leaves += 1
        return leaf

    def insert(self, addr):
        if not 0 <= addr <= 0xFFFFFFFF:
            raise ValueError(f"address {addr:#x} outside 32-bit range")
        cdef uint32_t a = addr
        cdef uint8_t *leaf = self._leaf(a, True)
        cdef uint32_t bit = a & 0x3FFF
        cdef uint8_t mask = <uint8_t>(1 << (bit & 7))
        if not leaf[bit >> 3] & mask:
            leaf[bit >> 3] |= mask
            self._count += 1

    def contains(self, addr):
        if not 0 <= addr <= 0xFFFFFFFF:
            return False
        cdef uint32_t a = addr
        cdef uint8_t *leaf = self._leaf(a, False)
        if leaf == NULL:
            return False
        cdef uint32_t bit = a & 0x3FFF
        return bool(leaf[bit >> 3] & (1 << (bit & 7)))

    def __contains__(self, addr):
        return self.contains(addr)

    def __len__(self):
        return self._count

    def is_empty(self):
        return self._count == 0

    def first_common(self, BitmapCore other):
        """Smallest address present in both sets, or None."""
        cdef Py_ssize_t r, m, i, b
        cdef void **mid_a
        cdef void **mid_b
        cdef uint8_t *la
        cdef uint8_t *lb
        cdef uint8_t both
        for r in range(FAN):
            mid_a = <void **>self._root[r]
            mid_b = <void **>other._root[r]
            if mid_a == NULL or mid_b == NULL:
                continue
            for m in range(FAN):
                la = <uint8_t *>mid_a[m]
                lb = <uint8_t *>mid_b[m]
                if la == NULL or lb == NULL:
                    continue
                for i in range(LEAF_BYTES):
                    both = la[i] & lb[i]
                    if both:
                        b = 0
                        while not (both >> b) & 1:
                            b += 1
                        return (r << 23) | (m << 14) | (i << 3) | b
        return None

    def addresses(self):
        """All members in ascending order."""
        cdef Py_ssize_t r, m, i, b
        cdef void **mid
        cdef uint8_t *leaf
        cdef uint8_t byte
        out = []
        for r in range(FAN):
            mid = <void **>self._root[r]
            if mid == NULL:
                continue
            for m in range(FAN):
                leaf = <uint8_t *>mid[m]
                if leaf == NULL:
                    continue
                for i in range(LEAF_BYTES):
                    byte = leaf[i]
                    if byte:
                        for b in range(8):
                            if (byte >> b) & 1:
                                out.append((r << 23) | (m << 14) | (i << 3) | b)
        return out

    def dump_lines(self):
        """Debug dump: sorted 8-digit hex addresses, one per line."""
        return [f"0x{a:08X}" for a in self.addresses()]

    def node_counts(self):
        """(root tables, mid tables, leaf bitmaps) materialised so far."""
        return 1, self._mids, self._leaves

    def payload_bytes(self):
        return NODE_PAYLOAD * (1 + self._mids + self._leaves)


cdef inline const uint8_t *_leaf_or_null(BitmapCore bm, Py_ssize_t r, Py_ssize_t m):
    cdef void **mid = <void **>bm._root[r]
    if mid == NULL:
        return NULL
    return <const uint8_t *>mid[m]


def race_witnesses(BitmapCore loads_a, BitmapCore stores_a,
                   BitmapCore loads_b, BitmapCore stores_b):
    """Addresses witnessing a conflict between two sides of accesses.

    Evaluates ((La ∪ Sa) ∩ Sb) ∪ ((Lb ∪ Sb) ∩ Sa) and returns the members
    ascending; an empty result means the two sides cannot race.
    """
    cdef Py_ssize_t r, m, i, b
    cdef const uint8_t *la
    cdef const uint8_t *sa
    cdef const uint8_t *lb
    cdef const uint8_t *sb
    cdef uint8_t ba, bsa, bb, bsb, hit
    cdef bint side_a, side_b
    out = []
    for r in range(FAN):
        if (loads_a._root[r] == NULL and stores_a._root[r] == NULL
                and loads_b._root[r] == NULL and stores_b._root[r] == NULL):
            continue
        for m in range(FAN):
            la = _leaf_or_null(loads_a, r, m)
            sa = _leaf_or_null(stores_a, r, m)
            lb = _leaf_or_null(loads_b, r, m)
            sb = _leaf_or_null(stores_b, r, m)
            side_a = sb != NULL and (la != NULL or sa != NULL)
            side_b = sa != NULL and (lb != NULL or sb != NULL)
            if not side_a and not side_b:
                continue
            for i in range(LEAF_BYTES):
                ba = (la[i] if la != NULL else 0) | (sa[i] if sa != NULL else 0)
                bb = (lb[i] if lb != NULL else 0) | (sb[i] if sb != NULL else 0)
                bsa = sa[i] if sa != NULL else 0
                bsb = sb[i] if sb != NULL else 0
                hit = (ba & bsb) | (bb & bsa)
                if hit:
                    for b in range(8):
                        if (hit >> b) & 1:
                            out.append((r << 23) | (m << 14) | (i << 3) | b)
    return out
