"""Generic base field: square classes, mod-2 Milnor K-theory and H = K/2[tau].

The field is modeled by m independent generic units a_1..a_m with sqrt(-1)
in the field.  Square classes are bit vectors, K^M/2 is the exterior algebra
on e_i = {a_i} (a monomial is a bitmask of generator indices) and H adjoins
the class tau of bidegree (0, 1).  Bidegrees are written (degree, weight).
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._gf2 import bits_of, xor_terms
from .errors import GeneratorSpecError, ModelMismatch, NotPureSymbol, PreconditionError, UnknownGenerator

MAX_GENS_ENV = "QFI_MAX_GENS"
DEFAULT_MAX_GENS = 16

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
# names that would collide with element syntax
_RESERVED = frozenset({"t", "x", "pf", "g", "mu", "Q", "M", "T", "Cone"})
_RESERVED_PATTERN = re.compile(r"[uxcs][0-9]+\Z")


def max_generators() -> int:
    raw = os.environ.get(MAX_GENS_ENV)
    if raw is None:
        return DEFAULT_MAX_GENS
    try:
        cap = int(raw)
    except ValueError:
        raise GeneratorSpecError(f"{MAX_GENS_ENV} must be an integer, got {raw!r}")
    if cap < 1:
        raise GeneratorSpecError(f"{MAX_GENS_ENV} must be positive, got {cap}")
    return cap


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_key(mask: int) -> tuple[int, ...]:
    """Sort key: lexicographic order of the index tuple."""
    return tuple(bits_of(mask))


@dataclass(frozen=True)
class FieldModel:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise GeneratorSpecError("at least one generator is required")
        cap = max_generators()
        if len(names) > cap:
            raise GeneratorSpecError(f"{len(names)} generators exceed the cap of {cap}", cap=cap)
        for nm in names:
            if not _IDENT.match(nm):
                raise GeneratorSpecError(f"invalid generator name {nm!r}")
            if nm in _RESERVED or _RESERVED_PATTERN.match(nm):
                raise GeneratorSpecError(f"generator name {nm!r} is reserved")
        if len(set(names)) != len(names):
            raise GeneratorSpecError("generator names must be distinct")

    @classmethod
    def from_text(cls, text: str) -> "FieldModel":
        return cls(tuple(p.strip() for p in text.split(",") if p.strip()))

    @classmethod
    def standard(cls, m: int) -> "FieldModel":
        """Generators a, b, c, ... (skipping reserved single letters)."""
        pool = list("abcdefhijklmnopqrsuvwyz")
        if m > len(pool):
            pool += [f"a{i}" for i in range(m - len(pool))]
        return cls(tuple(pool[:m]))

    @property
    def m(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownGenerator(f"unknown generator {name!r}", generator=name) from None

    def unit(self, *names: str) -> "UnitMonomial":
        bits = 0
        for nm in names:
            if nm != "1":
                bits ^= 1 << self.index(nm)
        return UnitMonomial(bits, self.m)

    def one(self) -> "UnitMonomial":
        return UnitMonomial(0, self.m)

    def all_units(self) -> list["UnitMonomial"]:
        return [UnitMonomial(b, self.m) for b in range(1 << self.m)]

    # rendering

    def unit_text(self, u: "UnitMonomial") -> str:
        if not u.bits:
            return "1"
        return "*".join(self.names[i] for i in bits_of(u.bits))

    def mono_text(self, mask: int) -> str:
        if not mask:
            return "1"
        return "{" + ",".join(self.names[i] for i in bits_of(mask)) + "}"

    def k_text(self, x: "KElement") -> str:
        if not x.terms:
            return "0"
        return " + ".join(self.mono_text(mk) for mk in x.sorted_terms())

    def h_term_text(self, t: int, mask: int) -> str:
        parts = []
        if t == 1:
            parts.append("t")
        elif t > 1:
            parts.append(f"t^{t}")
        if mask:
            parts.append(self.mono_text(mask))
        return "*".join(parts) if parts else "1"

    def h_text(self, x: "HElement") -> str:
        if not x.terms:
            return "0"
        return " + ".join(self.h_term_text(t, mk) for t, mk in x.sorted_terms())


@dataclass(frozen=True, order=True)
class UnitMonomial:
    """Square class prod a_i^{e_i}, stored as a bit vector of width m."""

    bits: int
    m: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.m:
            raise ModelMismatch(f"unit bits {self.bits:#x} do not fit {self.m} generators")

    def __mul__(self, other: "UnitMonomial") -> "UnitMonomial":
        return unit_mul(self, other)

    @property
    def is_one(self) -> bool:
        return self.bits == 0


def unit_mul(u: UnitMonomial, v: UnitMonomial) -> UnitMonomial:
    if u.m != v.m:
        raise ModelMismatch(f"units from models of size {u.m} and {v.m}")
    return UnitMonomial(u.bits ^ v.bits, u.m)


@dataclass(frozen=True)
class KElement:
    """GF(2) combination of square-free symbol monomials (bitmasks)."""

    terms: frozenset = frozenset()

    @classmethod
    def zero(cls) -> "KElement":
        return cls(frozenset())

    @classmethod
    def one(cls) -> "KElement":
        return cls(frozenset({0}))

    @classmethod
    def monomial(cls, mask: int) -> "KElement":
        return cls(frozenset({mask}))

    @classmethod
    def from_terms(cls, masks: Iterable[int]) -> "KElement":
        return cls(xor_terms(masks))

    def __add__(self, other: "KElement") -> "KElement":
        return KElement(self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: "KElement") -> "KElement":
        return k_mul(self, other)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[int]:
        return sorted(self.terms, key=mask_key)

    def weights(self) -> set[int]:
        return {popcount(mk) for mk in self.terms}

    def part(self, w: int) -> "KElement":
        return KElement(frozenset(mk for mk in self.terms if popcount(mk) == w))

    def weight(self) -> int | str | None:
        ws = self.weights()
        if not ws:
            return None
        return ws.pop() if len(ws) == 1 else "mixed"

    def to_h(self) -> "HElement":
        return HElement(frozenset((0, mk) for mk in self.terms))


def k_mul(x: KElement, y: KElement) -> KElement:
    return KElement(xor_terms(a | b for a in x.terms for b in y.terms if not a & b))


def k_symbol(units: Sequence[UnitMonomial]) -> KElement:
    """Expand {u_1,...,u_r} multilinearly; {x,x} = 0 since -1 is a square."""
    if not units:
        raise PreconditionError("k_symbol needs at least one unit")
    m = units[0].m
    out = KElement.one()
    for u in units:
        if u.m != m:
            raise ModelMismatch("symbol slots come from different models")
        out = k_mul(out, KElement.from_terms(1 << i for i in bits_of(u.bits)))
    return out


def ann_pure_symbol_membership(x: KElement, alpha: KElement) -> bool:
    """x * alpha == 0, for alpha a single monomial on the subset S."""
    if len(alpha.terms) != 1:
        raise NotPureSymbol("annihilator test needs a single pure-symbol monomial")
    (s,) = alpha.terms
    return all(mk & s for mk in x.terms)


@dataclass(frozen=True)
class HElement:
    """GF(2) combination of tau^t * (symbol monomial), stored as (t, mask) pairs."""

    terms: frozenset = frozenset()

    def __post_init__(self):
        for t, _ in self.terms:
            if t < 0:
                raise PreconditionError("negative tau exponent")

    @classmethod
    def zero(cls) -> "HElement":
        return cls(frozenset())

    @classmethod
    def one(cls) -> "HElement":
        return cls(frozenset({(0, 0)}))

    @classmethod
    def tau(cls, t: int = 1) -> "HElement":
        return cls(frozenset({(t, 0)}))

    @classmethod
    def term(cls, t: int, mask: int) -> "HElement":
        return cls(frozenset({(t, mask)}))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int]]) -> "HElement":
        return cls(xor_terms(terms))

    def __add__(self, other: "HElement") -> "HElement":
        return HElement(self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: "HElement") -> "HElement":
        return h_mul(self, other)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[tuple[int, int]]:
        return sorted(self.terms, key=lambda tm: (tm[0], mask_key(tm[1])))

    def k_part(self, t: int) -> KElement:
        return KElement(frozenset(mk for s, mk in self.terms if s == t))


def h_mul(x: HElement, y: HElement) -> HElement:
    return HElement(xor_terms((s + t, a | b) for s, a in x.terms for t, b in y.terms if not a & b))


def h_tau_mul(x: HElement, t: int) -> HElement:
    return HElement(frozenset((s + t, mk) for s, mk in x.terms))


def h_term_bidegree(t: int, mask: int) -> tuple[int, int]:
    w = popcount(mask)
    return (w, w + t)


def h_bidegree(x: HElement):
    """(degree, weight) if x is bihomogeneous, "mixed" otherwise, None for 0."""
    degs = {h_term_bidegree(t, mk) for t, mk in x.terms}
    if not degs:
        return None
    return degs.pop() if len(degs) == 1 else "mixed"
