"""Witt ring of the generic field as the group algebra GF(2)[F*/F*^2].

Classes are sets of square classes (bitmasks).  The substitution
[a_i] -> 1 + y_i with y_i^2 = 0 identifies the group algebra with a truncated
polynomial ring in which I^n is spanned by monomials of degree >= n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from ._gf2 import Echelon, xor_terms
from .errors import ModelMismatch, PreconditionError
from .kfield import FieldModel, KElement, UnitMonomial, k_mul, k_symbol, mask_key, popcount


@dataclass(frozen=True)
class QForm:
    entries: tuple[UnitMonomial, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for u in self.entries:
            if u.m != self.m:
                raise ModelMismatch("form entries come from a different model")

    @classmethod
    def diagonal(cls, units: Iterable[UnitMonomial], m: int) -> "QForm":
        return cls(tuple(units), m)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def render(self, model: FieldModel) -> str:
        return "<" + ", ".join(model.unit_text(u) for u in self.entries) + ">"


@dataclass(frozen=True)
class WittClass:
    support: frozenset
    m: int

    def __add__(self, other: "WittClass") -> "WittClass":
        _same(self.m, other.m)
        return WittClass(self.support ^ other.support, self.m)

    def __mul__(self, other: "WittClass") -> "WittClass":
        _same(self.m, other.m)
        return WittClass(xor_terms(a ^ b for a in self.support for b in other.support), self.m)

    def __bool__(self) -> bool:
        return bool(self.support)

    def units(self) -> list[UnitMonomial]:
        return [UnitMonomial(b, self.m) for b in sorted(self.support, key=mask_key)]

    @property
    def anisotropic_dim(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class NilCoords:
    terms: frozenset
    m: int

    def valuation(self) -> float:
        if not self.terms:
            return math.inf
        return min(popcount(t) for t in self.terms)

    def part(self, n: int) -> frozenset:
        return frozenset(t for t in self.terms if popcount(t) == n)

    def render(self, model: FieldModel) -> str:
        if not self.terms:
            return "0"
        out = []
        for t in sorted(self.terms, key=lambda t: (popcount(t), mask_key(t))):
            out.append("*".join(f"y_{model.names[i]}" for i in mask_key(t)) or "1")
        return " + ".join(out)


def _same(m1: int, m2: int) -> None:
    if m1 != m2:
        raise ModelMismatch(f"objects from models of size {m1} and {m2}")


def witt_class(q: QForm) -> WittClass:
    return WittClass(xor_terms(u.bits for u in q.entries), q.m)


def to_nil_coords(w: WittClass) -> NilCoords:
    # coefficient of y_T counts the classes u with T contained in u
    acc: set = set()
    for u in w.support:
        sub = u
        while True:
            if sub in acc:
                acc.remove(sub)
            else:
                acc.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & u
    return NilCoords(frozenset(acc), w.m)


def level(q: QForm) -> float:
    """Largest n with q in I^n (inf for the hyperbolic class)."""
    return to_nil_coords(witt_class(q)).valuation()


def in_fundamental_power(q: QForm, n: int) -> bool:
    return level(q) >= n


def e_invariant(q: QForm, n: int) -> KElement:
    """e_n(q) in K_n/2 for q in I^n: the degree-n nilpotent part with y_i -> e_i."""
    nil = to_nil_coords(witt_class(q))
    if nil.valuation() < n:
        raise PreconditionError(f"form is not in I^{n}", n=n, level=nil.valuation())
    return KElement(nil.part(n))


def milnor_total_w(q: QForm) -> KElement:
    """Total Stiefel-Whitney class prod_j (1 + {u_j})."""
    out = KElement.one()
    for u in q.entries:
        out = k_mul(out, KElement.one() + (k_symbol([u]) if u.bits else KElement.zero()))
    return out


# -- constructions --------------------------------------------------------------

def oplus(q: QForm, r: QForm) -> QForm:
    _same(q.m, r.m)
    return QForm(q.entries + r.entries, q.m)


def scale(lam: UnitMonomial, q: QForm) -> QForm:
    _same(lam.m, q.m)
    return QForm(tuple(lam * u for u in q.entries), q.m)


def tensor(q: QForm, r: QForm) -> QForm:
    _same(q.m, r.m)
    return QForm(tuple(u * v for u in q.entries for v in r.entries), q.m)


def pfister(units: Sequence[UnitMonomial], m: int) -> QForm:
    """<<a_1..a_n>> = (x)_i <1, a_i>; the empty list gives <1>."""
    out = QForm((UnitMonomial(0, m),), m)
    for a in units:
        _same(a.m, m)
        out = tensor(out, QForm((UnitMonomial(0, m), a), m))
    return out


def det_pm(q: QForm) -> UnitMonomial:
    bits = 0
    for u in q.entries:
        bits ^= u.bits
    return UnitMonomial(bits, q.m)


def split_form(n: int, m: int) -> QForm:
    return QForm((UnitMonomial(0, m),) * n, m)


# -- brute-force oracle ------------------------------------------------------------

def _class_vector(w: WittClass) -> int:
    v = 0
    for b in w.support:
        v |= 1 << b
    return v


def pfister_span(n: int, m: int) -> Echelon:
    """GF(2) span of all scaled n-fold Pfister classes b * <<a_1..a_n>>."""
    ech = Echelon()
    nontrivial = range(1, 1 << m)
    for combo in combinations(nontrivial, n) if n else [()]:
        base = witt_class(pfister([UnitMonomial(a, m) for a in combo], m))
        for b in range(1 << m):
            ech.add(_class_vector(base * WittClass(frozenset({b}), m)))
    return ech


def in_pfister_span(q: QForm, n: int, span: Echelon | None = None) -> bool:
    if span is None:
        span = pfister_span(n, q.m)
    return span.contains(_class_vector(witt_class(q)))
