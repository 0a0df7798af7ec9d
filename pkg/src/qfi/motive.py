"""Formal poly-binary motive decompositions.

A ``MotiveProduct`` is a tensor product, over a base object M, of two-term
cones Cone[-1](M --label--> M(j)[b]).  A cone whose label vanishes splits as
M + M(j)[b-1]; the others are kept as binary blocks.  Labels are plain text
references to classes; their vanishing is declared by the caller or read off
a literal "0".
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import MissingLabels, ParseError, PreconditionError


@dataclass(frozen=True)
class ConeFactor:
    label: str
    weight: int
    shift: int
    perturbed: bool = False

    def __post_init__(self):
        if self.weight < 0 or self.shift < 1:
            raise PreconditionError(f"invalid twist ({self.weight})[{self.shift}]")
        if "--" in self.label or not self.label.strip():
            raise PreconditionError(f"invalid label {self.label!r}")

    @property
    def twist(self) -> tuple[int, int]:
        return (self.weight, self.shift)

    def render(self) -> str:
        lab = f"~{self.label}" if self.perturbed else self.label
        return f"Cone[-1]( M --{lab}--> M({self.weight})[{self.shift}] )"


@dataclass(frozen=True)
class MotiveProduct:
    base: str
    factors: tuple[ConeFactor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if "]" in self.base:
            raise PreconditionError("base tag may not contain ']'")

    def __mul__(self, other: "MotiveProduct") -> "MotiveProduct":
        if other.base != self.base:
            raise PreconditionError("tensor product over different bases")
        return MotiveProduct(self.base, self.factors + other.factors)

    @property
    def split_rank(self) -> int:
        return 2 ** len(self.factors)

    def twists(self) -> Counter:
        return Counter(f.twist for f in self.factors)

    def render(self) -> str:
        body = " (x) ".join(f.render() for f in self.factors) if self.factors else "T"
        return f"[{self.base}] {body}"


_FACTOR = re.compile(r"Cone\[-1\]\( M --(?P<label>.+?)--> M\((?P<w>\d+)\)\[(?P<b>\d+)\] \)")


def parse_motive(text: str) -> MotiveProduct:
    m = re.match(r"\[(?P<base>[^\]]*)\] ", text)
    if not m:
        raise ParseError("motive text must start with '[base] '", 0)
    base, pos = m.group("base"), m.end()
    if text[pos:] == "T":
        return MotiveProduct(base, ())
    factors = []
    while True:
        fm = _FACTOR.match(text, pos)
        if not fm:
            raise ParseError("expected a Cone[-1]( M --label--> M(j)[b] ) factor", pos)
        label = fm.group("label")
        perturbed = label.startswith("~")
        factors.append(ConeFactor(label[1:] if perturbed else label, int(fm.group("w")), int(fm.group("b")), perturbed))
        pos = fm.end()
        if pos == len(text):
            break
        if not text.startswith(" (x) ", pos):
            raise ParseError("expected ' (x) ' between factors", pos)
        pos += 5
    return MotiveProduct(base, tuple(factors))


@dataclass(frozen=True)
class PoincarePoly:
    """Integer polynomial in t (shift) and s (weight), as ((t_exp, s_exp), coeff) pairs."""

    coeffs: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def from_dict(cls, d: Mapping[tuple[int, int], int]) -> "PoincarePoly":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v)))

    @classmethod
    def one(cls) -> "PoincarePoly":
        return cls((((0, 0), 1),))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.coeffs)

    def __mul__(self, other: "PoincarePoly") -> "PoincarePoly":
        out: Counter = Counter()
        for (t1, s1), c1 in self.coeffs:
            for (t2, s2), c2 in other.coeffs:
                out[(t1 + t2, s1 + s2)] += c1 * c2
        return PoincarePoly.from_dict(out)

    def value(self, t: int = 1, s: int = 1) -> int:
        return sum(c * t ** te * s ** se for (te, se), c in self.coeffs)

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (te, se), c in self.coeffs:
            fs = [] if c == 1 else [str(c)]
            if se:
                fs.append("s" if se == 1 else f"s^{se}")
            if te:
                fs.append("t" if te == 1 else f"t^{te}")
            parts.append("*".join(fs) if fs else str(c))
        return " + ".join(parts)


def _binomial_poly(f: ConeFactor) -> PoincarePoly:
    return PoincarePoly.from_dict(Counter({(0, 0): 1}) + Counter({(f.shift - 1, f.weight): 1}))


def split_poincare(mp: MotiveProduct) -> PoincarePoly:
    """Poincare polynomial of the fully split motive: prod (1 + s^j t^{b-1})."""
    out = PoincarePoly.one()
    for f in mp.factors:
        out = out * _binomial_poly(f)
    return out


@dataclass(frozen=True)
class Decomposition:
    tate: tuple[tuple[int, int], ...]      # Tate twists (weight, shift) of M
    blocks: tuple[ConeFactor, ...]         # unsplit binary blocks

    @property
    def rank(self) -> int:
        return len(self.tate) * 2 ** len(self.blocks)


def label_vanishes(f: ConeFactor, vanishing: Iterable[str] = ()) -> bool:
    return f.label == "0" or f.label in set(vanishing)


def split_summands(mp: MotiveProduct, vanishing: Iterable[str] = ()) -> Decomposition:
    """Split every cone whose label vanishes; the rest stay as binary blocks."""
    vanishing = set(vanishing)
    split, blocks = [], []
    for f in mp.factors:
        (split if label_vanishes(f, vanishing) else blocks).append(f)
    tate = []
    for choice in product((False, True), repeat=len(split)):
        w = sum(f.weight for f, c in zip(split, choice) if c)
        b = sum(f.shift - 1 for f, c in zip(split, choice) if c)
        tate.append((w, b))
    return Decomposition(tuple(sorted(tate)), tuple(blocks))


# -- constructors --------------------------------------------------------------

def bocone(n: int) -> MotiveProduct:
    if n < 0:
        raise PreconditionError("n must be non-negative")
    return MotiveProduct(f"BO({n})", tuple(ConeFactor(f"u{i}", i // 2, i) for i in range(1, n + 1)))


def torsor_motive(n: int, labels: Sequence[str], base: str = "Cech(q)",
                  perturbed: Iterable[int] = ()) -> MotiveProduct:
    """Labels are indexed 1..n (labels[0] is u_1); perturbed lists indices of modified labels."""
    if len(labels) < n:
        raise MissingLabels(f"need {n} labels, got {len(labels)}")
    perturbed = set(perturbed)
    return MotiveProduct(base, tuple(ConeFactor(labels[i - 1], i // 2, i, i in perturbed) for i in range(1, n + 1)))


def grassmannian_indices(n: int) -> list[int]:
    """The j of the factors (j)[2j+1]: 0..d-1 for even n, 1..d for odd n."""
    d = n // 2
    return list(range(d)) if n % 2 == 0 else list(range(1, d + 1))


def grassmannian_motive(n: int, labels: Mapping[int, str], base: str = "Cech(q)",
                        perturbed: Iterable[int] = ()) -> MotiveProduct:
    """Highest orthogonal Grassmannian of an n-dimensional form.

    labels maps the odd index 2j+1 to the label of u_{2j+1}(q) for even n and
    of u_{2j+1}(p), p = q + <det q>, for odd n.
    """
    if n < 1:
        raise PreconditionError("form dimension must be positive")
    perturbed = set(perturbed)
    factors = []
    for j in grassmannian_indices(n):
        i = 2 * j + 1
        if i not in labels:
            raise MissingLabels(f"missing label for u_{i}", index=i)
        factors.append(ConeFactor(labels[i], j, i, i in perturbed))
    return MotiveProduct(base, tuple(factors))


def grassmannian_components(mp: MotiveProduct, vanishing: Iterable[str] = ()) -> list[MotiveProduct]:
    """A vanishing (0)[1] factor splits the variety into two isomorphic components."""
    vanishing = set(vanishing)
    rest = tuple(f for f in mp.factors if not (f.twist == (0, 1) and label_vanishes(f, vanishing)))
    if len(rest) == len(mp.factors):
        return [mp]
    return [MotiveProduct(mp.base, rest), MotiveProduct(mp.base, rest)]


def affine_quadric_motive(n: int) -> list[tuple[int, int]]:
    """Affine quadric {q = 1}: Z + Z([n/2])[n-1]."""
    if n < 1:
        raise PreconditionError("n must be positive")
    return [(0, 0), (n // 2, n - 1)]
