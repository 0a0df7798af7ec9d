"""Small GF(2) helpers: parity sums of hashable terms and bitset row reduction."""
from __future__ import annotations

from typing import Hashable, Iterable


def xor_terms(terms: Iterable[Hashable]) -> frozenset:
    """Sum over GF(2): keep the terms that occur an odd number of times."""
    acc: set = set()
    for t in terms:
        if t in acc:
            acc.remove(t)
        else:
            acc.add(t)
    return frozenset(acc)


def binom_mod2(n: int, k: int) -> int:
    # Lucas: C(n, k) is odd iff the bits of k are a subset of the bits of n
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (n & k) == k else 0


def bits_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class Echelon:
    """Incrementally row-reduced set of GF(2) vectors stored as ints."""

    def __init__(self):
        self.rows: dict[int, int] = {}  # pivot bit -> row

    def reduce(self, v: int) -> int:
        while v:
            p = v.bit_length() - 1
            row = self.rows.get(p)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        """Insert v; return True if it was independent of the current rows."""
        v = self.reduce(v)
        if not v:
            return False
        self.rows[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def rank(self) -> int:
        return len(self.rows)


def gf2_rank(vectors: Iterable[int]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank


def rref(vectors: Iterable[int]) -> list[tuple[int, int]]:
    """Fully reduced row echelon form as (pivot bit, row) pairs.

    Pivots are the lowest set bit of each row, and no row has a bit set in
    another row's pivot column.
    """
    rows: list[int] = []
    for v in vectors:
        for r in rows:
            low = r & -r
            if v & low:
                v ^= r
        if not v:
            continue
        low = v & -v
        rows = [r ^ v if r & low else r for r in rows]
        rows.append(v)
    rows.sort(key=lambda r: r & -r)
    return [((r & -r).bit_length() - 1, r) for r in rows]
