"""Cohomology model rings of Cech objects of Pfister quadrics, and u-classes.

For alpha = {l_1..l_n} with independent l_i, the ring is H on the diagonals
<= 0 plus, on positive diagonals, the span of mu^s Q_I(g) kbar where g has
bidegree (n, n-1), Q_i has (2^{i+1}-1, 2^i-1), mu = Q_{n-2}...Q_0(g) and kbar
runs over K/2 modulo Ann(alpha).  Ann(alpha) is the ideal of the linear forms
{l_i}; canonical representatives avoid the pivot generators of those forms.

A positive basis term is a triple (s, I, kbar) with I a bitmask over
F = {0..n-2}.  The product is

    (s, I, k) * (t, J, l) = (s+t+1, I & J, k*l)   if I | J == F, else 0,

and tau kills every positive term except g*kbar, which it sends to alpha*kbar.
For n = 1 the set F is empty and (s, 0, k) is g^{s+1} k.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from ._gf2 import Echelon, bits_of, rref, xor_terms
from .bo_ring import Poly, whitney_twist
from .errors import (DependentSymbol, IndexRangeError, InvariantBreach, ModelMismatch, NotInImage,
                     OddDimension, PreconditionError, UnsupportedShape)
from .kfield import FieldModel, HElement, KElement, UnitMonomial, k_mul, k_symbol, mask_key, popcount
from .witt import QForm, witt_class


@dataclass(frozen=True)
class PfisterContext:
    """Model ring data for alpha = {l_1, ..., l_n}; n = 0 is the point (split) context."""

    model: FieldModel
    units: tuple[UnitMonomial, ...]
    pivots: tuple[tuple[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        for u in self.units:
            if u.m != self.model.m:
                raise ModelMismatch("context units come from a different model")
        piv = rref(u.bits for u in self.units)
        if len(piv) != len(self.units):
            raise DependentSymbol("the symbol units are dependent, so alpha = 0")
        object.__setattr__(self, "pivots", tuple(piv))

    @property
    def n(self) -> int:
        return len(self.units)

    @property
    def full(self) -> int:
        return (1 << (self.n - 1)) - 1 if self.n >= 1 else 0

    @property
    def pivot_mask(self) -> int:
        out = 0
        for p, _ in self.pivots:
            out |= 1 << p
        return out

    @property
    def alpha(self) -> KElement:
        return k_symbol(list(self.units)) if self.units else KElement.one()

    def reduce(self, mask: int) -> frozenset:
        return _reduce(self, mask)

    # named elements

    def zero(self) -> "ModelElement":
        return ModelElement(self, HElement.zero(), frozenset())

    def one(self) -> "ModelElement":
        return ModelElement(self, HElement.one(), frozenset())

    def coeff(self, h: HElement) -> "ModelElement":
        return ModelElement(self, h, frozenset())

    def basis(self, s: int, I: int = 0, kbar: int = 0) -> "ModelElement":
        self._need_positive()
        if I & ~self.full:
            raise IndexRangeError(f"Q-index set {bits_of(I)} outside 0..{self.n - 2}")
        return ModelElement(self, HElement.zero(), frozenset((s, I, k) for k in self.reduce(kbar)))

    def gamma(self) -> "ModelElement":
        return self.basis(0, 0)

    def mu(self) -> "ModelElement":
        return self.basis(0, self.full)

    def _need_positive(self) -> None:
        if self.n == 0:
            raise PreconditionError("the point context has no positive part")

    def term_bidegree(self, term: tuple) -> tuple[int, int]:
        s, I, k = term
        n = self.n
        b = s * (2 ** n - 1) + n + popcount(k)
        a = s * (2 ** (n - 1) - 1) + n - 1 + popcount(k)
        for i in bits_of(I):
            b += 2 ** (i + 1) - 1
            a += 2 ** i - 1
        return (b, a)

    def describe(self) -> str:
        return "{" + ",".join(self.model.unit_text(u) for u in self.units) + "}" if self.units else "point"


@lru_cache(maxsize=None)
def _reduce(ctx: PfisterContext, mask: int) -> frozenset:
    # substitute each pivot generator e_p by the rest of its row
    out = KElement.one()
    for p, row in ctx.pivots:
        if mask >> p & 1:
            out = k_mul(out, KElement.from_terms(1 << i for i in bits_of(row & ~(1 << p))))
    rest = mask & ~ctx.pivot_mask
    return k_mul(out, KElement.monomial(rest)).terms


@dataclass(frozen=True)
class ModelElement:
    """Element of the model ring: a coefficient in H plus a GF(2) set of (s, I, kbar)."""

    ctx: PfisterContext
    coeff: HElement
    pos: frozenset

    def _check(self, other: "ModelElement") -> None:
        if other.ctx != self.ctx:
            raise ModelMismatch("elements from different contexts")

    def __add__(self, other: "ModelElement") -> "ModelElement":
        self._check(other)
        return ModelElement(self.ctx, self.coeff + other.coeff, self.pos ^ other.pos)

    __sub__ = __add__

    def __mul__(self, other: "ModelElement") -> "ModelElement":
        return model_mul(self, other)

    def __pow__(self, k: int) -> "ModelElement":
        out = self.ctx.one()
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self) -> bool:
        return bool(self.coeff) or bool(self.pos)

    def times_h(self, h: HElement) -> "ModelElement":
        return model_mul(self.ctx.coeff(h), self)

    def bidegrees(self) -> set:
        out = {(popcount(mk), popcount(mk) + t) for t, mk in self.coeff.terms}
        out |= {self.ctx.term_bidegree(tm) for tm in self.pos}
        return out

    def bidegree(self):
        degs = self.bidegrees()
        if not degs:
            return None
        return degs.pop() if len(degs) == 1 else "mixed"

    def sorted_pos(self) -> list[tuple]:
        return sorted(self.pos, key=lambda tm: (tm[0], tuple(bits_of(tm[1])), mask_key(tm[2])))

    def render(self) -> str:
        model = self.ctx.model
        parts = [model.h_term_text(t, mk) for t, mk in self.coeff.sorted_terms()]
        parts += [_pos_text(self.ctx, tm) for tm in self.sorted_pos()]
        return " + ".join(parts) if parts else "0"


def _pos_text(ctx: PfisterContext, term: tuple) -> str:
    s, I, k = term
    if ctx.n == 1:
        fs = ["g" if s == 0 else f"g^{s + 1}"]
    elif I == ctx.full:
        fs = ["mu" if s == 0 else f"mu^{s + 1}"]
    else:
        fs = [] if s == 0 else ["mu" if s == 1 else f"mu^{s}"]
        fs.append("g" if I == 0 else "Q[" + ",".join(str(i) for i in bits_of(I)) + "](g)")
    if k:
        fs.append(ctx.model.mono_text(k))
    return "*".join(fs)


# -- ring operations -------------------------------------------------------

def _tau_pos(ctx: PfisterContext, pos: Iterable[tuple]) -> HElement:
    """tau times positive terms: only g*kbar survives, as alpha*kbar."""
    alpha = ctx.alpha
    return HElement(xor_terms((0, mk) for s, I, k in pos if s == 0 and I == 0
                              for mk in k_mul(alpha, KElement.monomial(k)).terms))


def tau_act(x: ModelElement, times: int = 1) -> ModelElement:
    ctx = x.ctx
    for _ in range(times):
        if not x:
            break
        x = ModelElement(ctx, HElement(frozenset((t + 1, mk) for t, mk in x.coeff.terms)) + _tau_pos(ctx, x.pos),
                         frozenset())
    return x


def _coeff_times_pos(ctx: PfisterContext, h: HElement, pos: frozenset) -> ModelElement:
    out = ctx.zero()
    for t, mk in h.terms:
        terms = xor_terms((s, I, k2) for s, I, k in pos if not k & mk for k2 in ctx.reduce(k | mk))
        out = out + tau_act(ModelElement(ctx, HElement.zero(), terms), t)
    return out


def _pos_times_pos(ctx: PfisterContext, p: frozenset, q: frozenset) -> frozenset:
    full = ctx.full
    out = []
    for s, I, k in p:
        for t, J, l in q:
            if (I | J) != full or k & l:
                continue
            for kl in ctx.reduce(k | l):
                out.append((s + t + 1, I & J, kl))
    return xor_terms(out)


def model_mul(x: ModelElement, y: ModelElement) -> ModelElement:
    x._check(y)
    ctx = x.ctx
    out = ModelElement(ctx, x.coeff * y.coeff, _pos_times_pos(ctx, x.pos, y.pos))
    if x.coeff and y.pos:
        out = out + _coeff_times_pos(ctx, x.coeff, y.pos)
    if y.coeff and x.pos:
        out = out + _coeff_times_pos(ctx, y.coeff, x.pos)
    return out


def q_op(i: int, x: ModelElement) -> ModelElement:
    """Milnor operation Q_i; kills H, Q_i^2 = 0, Q_{n-1} acts on mu^s Q_I g as (s+1) mu."""
    ctx = x.ctx
    n = ctx.n
    if not 0 <= i <= n - 1:
        raise IndexRangeError(f"Q_{i} needs 0 <= i <= {n - 1}", i=i)
    out = []
    for s, I, k in x.pos:
        if i < n - 1:
            if not I >> i & 1:
                out.append((s, I | (1 << i), k))
        elif s % 2 == 0:
            out.append((s + 1, I, k))
    return ModelElement(ctx, HElement.zero(), xor_terms(out))


def q_composite(x: ModelElement, indices: Iterable[int]) -> ModelElement:
    for i in indices:
        x = q_op(i, x)
    return x


def positive_basis(ctx: PfisterContext, max_s: int, max_weight: int) -> list[tuple]:
    """All basis triples (s, I, kbar) with s <= max_s and |kbar| <= max_weight."""
    free = [i for i in range(ctx.model.m) if not ctx.pivot_mask >> i & 1]
    kbars = [sum(1 << i for i in c) for w in range(max_weight + 1) for c in combinations(free, w)]
    return [(s, I, k) for s in range(max_s + 1) for I in range(ctx.full + 1) for k in kbars]


# -- u-class vectors -------------------------------------------------------

@dataclass(frozen=True)
class UClassVector:
    ctx: PfisterContext
    entries: tuple[ModelElement, ...]

    @property
    def dim(self) -> int:
        return len(self.entries) - 1

    def __getitem__(self, i: int) -> ModelElement:
        if 0 <= i < len(self.entries):
            return self.entries[i]
        if i < 0:
            raise IndexRangeError("negative u-index")
        return self.ctx.zero()

    def padded(self, dim: int) -> "UClassVector":
        if dim < self.dim:
            raise PreconditionError("cannot shrink a u-vector")
        return UClassVector(self.ctx, self.entries + (self.ctx.zero(),) * (dim - self.dim))

    def nonzero(self) -> list[int]:
        return [i for i in range(1, len(self.entries)) if self.entries[i]]


def point_vector(ctx: PfisterContext, dim: int) -> UClassVector:
    return UClassVector(ctx, (ctx.one(),) + (ctx.zero(),) * dim)


def u_pfister(ctx: PfisterContext) -> UClassVector:
    """u_{2^n - 2^r} = Q_{F minus {r-1}}(g) for 1 <= r < n, u_{2^n - 1} = mu, other u_i = 0."""
    n = ctx.n
    dim = 2 ** n
    if n == 0:
        return point_vector(ctx, 1)
    entries = [ctx.one()] + [ctx.zero()] * dim
    entries[dim - 1] = ctx.mu()
    for r in range(1, n):
        entries[dim - 2 ** r] = ctx.basis(0, ctx.full & ~(1 << (r - 1)))
    return UClassVector(ctx, tuple(entries))


def one_dim_vector(ctx: PfisterContext) -> UClassVector:
    """<l>: u_1 = g in the model of alpha = {l}."""
    if ctx.n != 1:
        raise PreconditionError("a one-dimensional form needs a 1-fold context")
    return UClassVector(ctx, (ctx.one(), ctx.gamma()))


def scale_uclasses(v: UClassVector, lam: UnitMonomial) -> UClassVector:
    """u(lam*q): u_{2i} gains {lam} u_{2i-1}; needs even dimension."""
    if v.dim % 2:
        raise OddDimension("scaling formula needs an even-dimensional form")
    sym = k_symbol([lam]).to_h()
    entries = list(v.entries)
    for i in range(2, v.dim + 1, 2):
        entries[i] = entries[i] + v[i - 1].times_h(sym)
    return UClassVector(v.ctx, tuple(entries))


def sum_uclasses(v: UClassVector, w: UClassVector) -> UClassVector:
    """Whitney sum: u_r = sum_i tau^{[r/2]-[i/2]-[(r-i)/2]} u_i(v) u_{r-i}(w)."""
    if v.ctx != w.ctx:
        raise ModelMismatch("u-vectors from different contexts")
    dim = v.dim + w.dim
    entries = []
    for r in range(dim + 1):
        acc = v.ctx.zero()
        for i in range(max(0, r - w.dim), min(r, v.dim) + 1):
            a, b = v[i], w[r - i]
            if a and b:
                acc = acc + tau_act(a * b, whitney_twist(r, i))
        entries.append(acc)
    return UClassVector(v.ctx, tuple(entries))


def evaluate(x: Poly, vectors: Sequence[UClassVector]) -> ModelElement:
    """Evaluate a (multi-block) BO element at u-vectors, one per tensor block."""
    ring = x.ring
    if ring.kind != "bo" or len(ring.blocks) != len(vectors):
        raise PreconditionError("one u-vector per BO block is required")
    ctx = vectors[0].ctx
    gens = []
    for b, size in enumerate(ring.blocks):
        gens += [vectors[b][i] for i in range(1, size + 1)]
    out = ctx.zero()
    for e, t, mk in x.terms:
        val = ctx.coeff(HElement.term(t, mk))
        for g, k in enumerate(e):
            for _ in range(k):
                val = val * gens[g]
        out = out + val
    return out


def u_alpha_divisible(ctx: PfisterContext, bs: Sequence[UnitMonomial]) -> UClassVector:
    """u-classes of q_alpha * <b_1..b_t> as the Whitney convolution of scaled slots."""
    if ctx.n == 0:
        raise PreconditionError("alpha-divisible forms need n >= 1")
    if not bs:
        raise PreconditionError("at least one slot is required")
    base = u_pfister(ctx)
    v = scale_uclasses(base, bs[0])
    for b in bs[1:]:
        v = sum_uclasses(v, scale_uclasses(base, b))
    return v


# -- the induction step -----------------------------------------------------

def pullback_last(x: ModelElement, beta: PfisterContext) -> ModelElement:
    """f*: model of alpha = beta*{l_n} -> model of beta, g_alpha -> g_beta {l_n}."""
    alpha = x.ctx
    if alpha.n < 2 or alpha.units[:-1] != beta.units or alpha.model != beta.model:
        raise ModelMismatch("beta must be alpha with its last unit removed")
    last = beta.coeff(k_symbol([alpha.units[-1]]).to_h())
    g_beta = beta.gamma() * last
    images: dict[int, ModelElement] = {}

    def q_image(I: int) -> ModelElement:
        if I not in images:
            images[I] = q_composite(g_beta, bits_of(I))
        return images[I]

    mu_img = q_image(alpha.full)
    out = beta.coeff(x.coeff)
    for s, I, k in x.pos:
        val = q_image(I) * beta.coeff(HElement.term(0, k))
        for _ in range(s):
            val = val * mu_img
        out = out + val
    return out


def u_pfister_inductive_check(ctx: PfisterContext) -> bool:
    """Compare f*(u(q_alpha)) with u(q_beta + l_n q_beta) computed in the beta model."""
    if ctx.n < 2:
        return True
    beta = PfisterContext(ctx.model, ctx.units[:-1])
    base = u_pfister(beta)
    rhs = sum_uclasses(base, scale_uclasses(base, ctx.units[-1]))
    lhs = u_pfister(ctx)
    return all(pullback_last(lhs[i], beta) == rhs[i] for i in range(lhs.dim + 1))


# -- Arason invariant and J bounds --------------------------------------------

def arason_from_u(ctx: PfisterContext, v: UClassVector) -> KElement:
    """e_n = tau * (Q_{n-2}...Q_0)^{-1} u_{2^n - 1}."""
    if v.ctx != ctx:
        raise ModelMismatch("u-vector from another context")
    if ctx.n == 0:
        raise PreconditionError("Arason extraction needs n >= 1")
    x = v[2 ** ctx.n - 1]
    if x.coeff or any(s != 0 or I != ctx.full for s, I, _ in x.pos):
        raise NotInImage("u_{2^n-1} is not in the image of the composite Milnor operation")
    pre = ModelElement(ctx, HElement.zero(), frozenset((0, 0, k) for _, _, k in x.pos))
    h = tau_act(pre).coeff
    return KElement(frozenset(mk for t, mk in h.terms if t == 0))


def j_min(v: UClassVector):
    """Least j with u_{2j+1} != 0, or None when every odd class vanishes."""
    for j in range(v.dim // 2 + 1):
        if 2 * j + 1 <= v.dim and v[2 * j + 1]:
            return j
    return None


def _degree_basis(ctx: PfisterContext, b: int, a: int) -> list[ModelElement]:
    """A spanning set of the model ring in bidegree (b, a)."""
    out = []
    m = ctx.model.m
    if 0 <= b <= a and b <= m:
        for c in combinations(range(m), b):
            out.append(ctx.coeff(HElement.term(a - b, sum(1 << i for i in c))))
    if ctx.n == 0 or b - a < 1:
        return out
    free = [i for i in range(m) if not ctx.pivot_mask >> i & 1]
    s = 0
    while ctx.term_bidegree((s, 0, 0))[0] <= b:
        for I in range(ctx.full + 1):
            b0, a0 = ctx.term_bidegree((s, I, 0))
            w = b - b0
            if w >= 0 and a - a0 == w and w <= len(free):
                for c in combinations(free, w):
                    out.append(ModelElement(ctx, HElement.zero(), frozenset({(s, I, sum(1 << i for i in c))})))
        s += 1
    return out


def ideal_contains(y: ModelElement, gens: Sequence[ModelElement]) -> bool:
    """Is y in the ideal generated by gens?  Graded GF(2) linear algebra."""
    if not y:
        return True
    ctx = y.ctx
    target = y.bidegree()
    if target == "mixed":
        raise InvariantBreach("ideal membership needs a bihomogeneous element")
    index: dict = {}

    def vec(x: ModelElement) -> int:
        v = 0
        for tm in x.coeff.terms:
            v |= 1 << index.setdefault(("h",) + tm, len(index))
        for tm in x.pos:
            v |= 1 << index.setdefault(("p",) + tm, len(index))
        return v

    ech = Echelon()
    for g in gens:
        if not g:
            continue
        gd = g.bidegree()
        if gd == "mixed":
            raise InvariantBreach("ideal generators must be bihomogeneous")
        for z in _degree_basis(ctx, target[0] - gd[0], target[1] - gd[1]):
            ech.add(vec(g * z))
    return ech.contains(vec(y))


def j_lower_set(v: UClassVector) -> list[int]:
    """j in [0, dim/2) certified in J(q): u_{2j+1} lies in the ideal of the earlier odd classes."""
    out = []
    for j in range(v.dim // 2):
        if ideal_contains(v[2 * j + 1], [v[2 * l + 1] for l in range(j)]):
            out.append(j)
    return out


# -- vanishing region ----------------------------------------------------------

def _exceeds(num: int, den: int, bound: Fraction) -> bool:
    if den == 0:
        return num > 0
    return Fraction(num, den) > bound


def region_car(n: int, a: int, b: int, reduced: bool = False) -> bool:
    """Is (weight a, degree b) inside the proven vanishing region for q in I^n?"""
    if n < 2:
        raise PreconditionError("the vanishing region is stated for n >= 2")
    if reduced and b <= a:
        return True
    if _exceeds(b, a, 2 + Fraction(1, 2 ** (n - 1) - 1)):
        return True
    if b > a:
        l = (b - a).bit_length() - 1
        if 1 <= l <= n - 1 and _exceeds(b + l - n + 1, a + l - n + 1, 2 + Fraction(1, 2 ** l - 1)):
            return True
    return False


# -- forms of supported shape --------------------------------------------------

@dataclass(frozen=True)
class FormClasses:
    shape: str  # "split", "one-dim" or "pfister-divisible"
    ctx: PfisterContext
    slots: tuple[UnitMonomial, ...]
    vector: UClassVector
    faithful: bool


def _stabilizer(support: frozenset) -> list[int]:
    w0 = min(support)
    return sorted(v for v in {w0 ^ w for w in support} if all(v ^ w in support for w in support))


def uclasses_of_form(q: QForm, model: FieldModel) -> FormClasses:
    """u-classes for split forms, <l> + hyperbolic, and q_alpha*<b_1..b_t> + hyperbolic.

    For odd t the Cech objects of q and q_alpha agree.  For even t, q only
    splits where alpha does, so the model of alpha maps to the Cech object of q
    and the classes are pulled back along it; ``faithful`` is False then.
    """
    if q.m != model.m:
        raise ModelMismatch("form and model disagree on the generator count")
    w = witt_class(q).support
    if w <= {0}:
        ctx = PfisterContext(model, ())
        return FormClasses("split", ctx, (), point_vector(ctx, q.dim), True)
    stab = _stabilizer(w)
    if len(stab) == 1:
        if len(w) == 1:
            (lam,) = w
            ctx = PfisterContext(model, (UnitMonomial(lam, model.m),))
            return FormClasses("one-dim", ctx, (), one_dim_vector(ctx).padded(q.dim), True)
        raise UnsupportedShape(
            "u-classes are computed only for split forms, <l> plus hyperbolic planes, "
            "and Pfister multiples q_alpha*<b_1..b_t> plus hyperbolic planes",
            anisotropic_support=len(w))
    basis = [UnitMonomial(row, model.m) for _, row in rref(stab)]
    ctx = PfisterContext(model, tuple(basis))
    cosets: dict[int, int] = {}
    for x in w:
        key = min(x ^ v for v in stab)
        cosets[key] = key
    bs = tuple(UnitMonomial(k, model.m) for k in sorted(cosets, key=lambda k: (popcount(k), mask_key(k))))
    v = u_alpha_divisible(ctx, bs).padded(q.dim)
    return FormClasses("pfister-divisible", ctx, bs, v, len(bs) % 2 == 1)
