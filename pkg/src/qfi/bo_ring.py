"""H[u_1..u_n], the cohomology of the Zariski classifying space of O(n).

One generic structure, ``PolyRing``, carries every polynomial ring over H that
shows up here: BO rings and their tensor products (``kind="bo"``), the
diagonal ring H[x_1..x_n] that detects everything through delta*, the ring of
symmetric coordinates H[s_1..s_n] with s_i = sigma_i(x), and the targets of the
parabolic restriction.  A ring with ``tau_den=2`` admits tau^{1/2}; tau
exponents are then stored in half units.

Elements are ``Poly`` values: GF(2) sets of (exponent tuple, tau exponent,
symbol mask) terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from ._gf2 import binom_mod2, xor_terms
from .errors import IndexRangeError, InvariantBreach, ModelMismatch, OddDimension, PreconditionError
from .kfield import FieldModel, HElement, UnitMonomial, k_symbol, mask_key, popcount

Term = tuple  # (exps, t, mask)


@dataclass(frozen=True)
class PolyRing:
    kind: str
    blocks: tuple[int, ...]
    names: tuple[str, ...]
    degrees: tuple[tuple[int, int], ...]
    tau_den: int = 1

    @property
    def ngens(self) -> int:
        return len(self.names)

    def offsets(self) -> list[int]:
        out, o = [], 0
        for size in self.blocks:
            out.append(o)
            o += size
        return out

    def block_of(self, g: int) -> tuple[int, int]:
        """(block number, 1-based index inside the block) of generator g."""
        for b, o in enumerate(self.offsets()):
            if g < o + self.blocks[b]:
                return b, g - o + 1
        raise IndexRangeError(f"generator {g} out of range")

    def zero(self) -> "Poly":
        return Poly(self, frozenset())

    def one(self) -> "Poly":
        return Poly(self, frozenset({(self.unit_exps(), 0, 0)}))

    def unit_exps(self) -> tuple[int, ...]:
        return (0,) * self.ngens

    def gen(self, g: int) -> "Poly":
        e = [0] * self.ngens
        e[g] = 1
        return Poly(self, frozenset({(tuple(e), 0, 0)}))

    def const(self, h: HElement) -> "Poly":
        z = self.unit_exps()
        return Poly(self, frozenset((z, t * self.tau_den, mk) for t, mk in h.terms))

    def with_tau_den(self, den: int) -> "PolyRing":
        return PolyRing(self.kind, self.blocks, self.names, self.degrees, den)


def bo_tensor_ring(sizes: Sequence[int]) -> PolyRing:
    sizes = tuple(int(s) for s in sizes)
    if any(s < 0 for s in sizes):
        raise IndexRangeError("block sizes must be non-negative")
    names, degs = [], []
    for s in sizes:
        for i in range(1, s + 1):
            names.append(f"u{i}")
            degs.append((i, i // 2))
    return PolyRing("bo", sizes, tuple(names), tuple(degs))


def bo_ring(n: int) -> PolyRing:
    return bo_tensor_ring((n,))


def diagonal_ring(n: int, tau_den: int = 1) -> PolyRing:
    return PolyRing("diag", (n,), tuple(f"x{j}" for j in range(1, n + 1)), ((1, 0),) * n, tau_den)


def sym_ring(n: int, tau_den: int = 1) -> PolyRing:
    return PolyRing("sym", (n,), tuple(f"s{i}" for i in range(1, n + 1)),
                    tuple((i, 0) for i in range(1, n + 1)), tau_den)


def pd_ring(n: int) -> PolyRing:
    """Target of restriction to the parabolic P_d: H[c_1..c_d], plus u_1 when n is odd."""
    d = n // 2
    names = [f"c{i}" for i in range(1, d + 1)]
    degs = [(2 * i, i) for i in range(1, d + 1)]
    if n % 2:
        names.insert(0, "u1")
        degs.insert(0, (1, 0))
    return PolyRing("pd", (len(names),), tuple(names), tuple(degs))


def _add_exps(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class Poly:
    ring: PolyRing
    terms: frozenset

    def _check(self, other: "Poly") -> None:
        if other.ring != self.ring:
            raise ModelMismatch("elements live in different rings")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        return Poly(self.ring, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if not self.terms or not other.terms:
            return self.ring.zero()
        return Poly(self.ring, xor_terms(
            (_add_exps(e1, e2), t1 + t2, m1 | m2)
            for e1, t1, m1 in self.terms for e2, t2, m2 in other.terms if not m1 & m2))

    def __pow__(self, k: int) -> "Poly":
        out, base = self.ring.one(), self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __bool__(self) -> bool:
        return bool(self.terms)

    def scale(self, t: int, mask: int) -> "Poly":
        """Multiply by the coefficient tau^t * mask (t in the ring's tau units)."""
        return Poly(self.ring, frozenset((e, s + t, m | mask) for e, s, m in self.terms if not m & mask))

    def times_h(self, h: HElement) -> "Poly":
        return self * self.ring.const(h)

    def term_degree(self, term: Term) -> int:
        e, _, mk = term
        return sum(x * d[0] for x, d in zip(e, self.ring.degrees)) + popcount(mk)

    def term_bidegree(self, term: Term) -> tuple:
        e, t, mk = term
        b = sum(x * d[0] for x, d in zip(e, self.ring.degrees)) + popcount(mk)
        a = sum(x * d[1] for x, d in zip(e, self.ring.degrees)) + popcount(mk)
        if self.ring.tau_den == 1:
            return (b, a + t)
        return (b, a + t / self.ring.tau_den)

    def bidegree(self):
        degs = {self.term_bidegree(tm) for tm in self.terms}
        if not degs:
            return None
        return degs.pop() if len(degs) == 1 else "mixed"

    def by_degree(self) -> dict[int, "Poly"]:
        out: dict[int, set] = {}
        for tm in self.terms:
            out.setdefault(self.term_degree(tm), set()).add(tm)
        return {d: Poly(self.ring, frozenset(s)) for d, s in out.items()}

    def sorted_terms(self) -> list[Term]:
        return sorted(self.terms, key=lambda tm: (sum(tm[0]), tm[0], tm[1], mask_key(tm[2])))

    def render(self, model: FieldModel) -> str:
        if not self.terms:
            return "0"
        return " + ".join(render_term(self.ring, tm, model) for tm in self.sorted_terms())


def _tau_text(t: int, den: int) -> str:
    if t == 0:
        return ""
    if den == 2 and t % 2:
        return f"t^({t}/2)"
    t //= den
    return "t" if t == 1 else f"t^{t}"


def render_term(ring: PolyRing, term: Term, model: FieldModel) -> str:
    e, t, mk = term
    coeff = [p for p in (_tau_text(t, ring.tau_den), model.mono_text(mk) if mk else "") if p]
    blocks = []
    for b, o in enumerate(ring.offsets()):
        fs = []
        for g in range(o, o + ring.blocks[b]):
            if e[g]:
                fs.append(ring.names[g] if e[g] == 1 else f"{ring.names[g]}^{e[g]}")
        if b == 0:
            fs = coeff + fs
        blocks.append("*".join(fs) if fs else "1")
    if not blocks:
        return "*".join(coeff) if coeff else "1"
    return " (x) ".join(blocks)


class Evaluator:
    """Ring homomorphism source -> target given by generator images, identity on H.

    Monomial images are memoized, so repeated evaluation over a family of
    monomials is cheap.
    """

    def __init__(self, source: PolyRing, target: PolyRing, images: Sequence[Poly]):
        if len(images) != source.ngens:
            raise PreconditionError("one image per generator is required")
        if target.tau_den % source.tau_den:
            raise ModelMismatch("target cannot hold the source tau exponents")
        self.source, self.target = source, target
        self.images = list(images)
        self.factor = target.tau_den // source.tau_den
        self.memo: dict[tuple, Poly] = {source.unit_exps(): target.one()}

    def monomial(self, exps: tuple) -> Poly:
        hit = self.memo.get(exps)
        if hit is not None:
            return hit
        g = next(i for i, x in enumerate(exps) if x)
        rest = list(exps)
        rest[g] -= 1
        val = self.monomial(tuple(rest)) * self.images[g]
        self.memo[exps] = val
        return val

    def __call__(self, x: Poly) -> Poly:
        if x.ring != self.source:
            raise ModelMismatch("element is not in the source ring")
        acc: set = set()
        for e, t, mk in x.terms:
            for tm in self.monomial(e).scale(t * self.factor, mk).terms:
                if tm in acc:
                    acc.remove(tm)
                else:
                    acc.add(tm)
        return Poly(self.target, frozenset(acc))


def substitute(x: Poly, images: Sequence[Poly], target: PolyRing) -> Poly:
    return Evaluator(x.ring, target, images)(x)


# -- generators and named classes ------------------------------------------

def bo_bidegree(i: int) -> tuple[int, int]:
    return (i, i // 2)


def u_class(i: int, n: int) -> Poly:
    if not 1 <= i <= n:
        raise IndexRangeError(f"u_{i} needs 1 <= i <= {n}", i=i, n=n)
    return bo_ring(n).gen(i - 1)


def w_class(i: int, n: int) -> Poly:
    """Milnor's class w_i = tau^{[(i+1)/2]} u_i."""
    u = u_class(i, n)
    return u.scale((i + 1) // 2, 0)


def c_class(i: int, n: int) -> Poly:
    """c_i = u_i^2 tau^{i mod 2}."""
    u = u_class(i, n)
    return (u * u).scale(i % 2, 0)


def _block_gen(ring: PolyRing, block: int, i: int) -> Poly:
    """u_i of the given block, with u_0 = 1 and u_i = 0 beyond the block size."""
    if i == 0:
        return ring.one()
    if i > ring.blocks[block]:
        return ring.zero()
    return ring.gen(ring.offsets()[block] + i - 1)


def _require_bo(x: Poly) -> None:
    if x.ring.kind != "bo":
        raise ModelMismatch(f"expected a BO element, got a {x.ring.kind} element")


# -- delta* ------------------------------------------------------------------

def sigma(k: int, variables: Sequence[int], ring: PolyRing) -> Poly:
    """Elementary symmetric polynomial in the listed generators of ring."""
    if k == 0:
        return ring.one()
    z = ring.unit_exps()
    terms = []
    for combo in combinations(variables, k):
        e = list(z)
        for v in combo:
            e[v] = 1
        terms.append((tuple(e), 0, 0))
    return Poly(ring, frozenset(terms))


def _delta_images(ring: PolyRing) -> tuple[PolyRing, list[Poly]]:
    target = diagonal_ring(ring.ngens)
    images = []
    for b, o in enumerate(ring.offsets()):
        variables = list(range(o, o + ring.blocks[b]))
        for i in range(1, ring.blocks[b] + 1):
            images.append(sigma(i, variables, target).scale(i // 2, 0))
    return target, images


@lru_cache(maxsize=None)
def _delta_evaluator(ring: PolyRing) -> Evaluator:
    target, images = _delta_images(ring)
    return Evaluator(ring, target, images)


def delta_star(x: Poly) -> Poly:
    """u_i -> tau^{[i/2]} sigma_i(x); blocks use consecutive x-variables."""
    _require_bo(x)
    return _delta_evaluator(x.ring)(x)


def is_zero(x: Poly) -> bool:
    return not delta_star(x)


def bo_equal(x: Poly, y: Poly) -> bool:
    return is_zero(x + y)


# -- sum restriction -----------------------------------------------------------

def whitney_twist(r: int, i: int) -> int:
    """tau exponent [r/2] - [i/2] - [(r-i)/2] of the u_i (x) u_{r-i} summand."""
    return r // 2 - i // 2 - (r - i) // 2


@lru_cache(maxsize=None)
def _corestrict_evaluator(ring: PolyRing, m: int, l: int, block: int) -> Evaluator:
    sizes = list(ring.blocks)
    sizes[block:block + 1] = [m, l]
    target = bo_tensor_ring(sizes)
    images = []
    for b, size in enumerate(ring.blocks):
        for r in range(1, size + 1):
            if b < block:
                images.append(_block_gen(target, b, r))
            elif b > block:
                images.append(_block_gen(target, b + 1, r))
            else:
                acc = target.zero()
                for i in range(r + 1):
                    acc = acc + (_block_gen(target, b, i) * _block_gen(target, b + 1, r - i)).scale(whitney_twist(r, i), 0)
                images.append(acc)
    return Evaluator(ring, target, images)


def corestrict_sum(x: Poly, m: int, l: int, block: int = 0) -> Poly:
    """Restrict along O(m) x O(l) -> O(m+l), splitting the given tensor block."""
    _require_bo(x)
    if not 0 <= block < len(x.ring.blocks):
        raise IndexRangeError(f"no block {block}")
    if m < 0 or l < 0 or m + l != x.ring.blocks[block]:
        raise PreconditionError(f"split {m}+{l} does not match dimension {x.ring.blocks[block]}")
    return _corestrict_evaluator(x.ring, m, l, block)(x)


# -- scaling automorphism ----------------------------------------------------

def scale_auto(x: Poly, lam: UnitMonomial) -> Poly:
    """phi_lambda: u_{2i} -> u_{2i} + {lambda} u_{2i-1}, odd classes fixed."""
    _require_bo(x)
    ring = x.ring
    if len(ring.blocks) != 1:
        raise PreconditionError("scale_auto acts on a single BO block")
    n = ring.blocks[0]
    if n % 2:
        raise OddDimension(f"scaling action is only defined for even n, got n={n}")
    sym = ring.const(k_symbol([lam]).to_h())
    images = []
    for i in range(1, n + 1):
        g = ring.gen(i - 1)
        images.append(g + sym * ring.gen(i - 2) if i % 2 == 0 else g)
    return substitute(x, images, ring)


# -- Steenrod squares ----------------------------------------------------------

def wu_coefficient(m: int, k: int, j: int) -> int:
    """Coefficient of u_{k-j} u_{m+j} in Sq^k(u_m): C(m-k+j-1, j) mod 2.

    This is the Wu formula; mod 2 it equals the binomial C(k-m, j) with a
    negative upper argument.  The plain C(m-k, j) disagrees with the R-bullet
    oracle, first at Sq^2(u_3) once u_5 exists.
    """
    if j == 0:
        return 1
    return binom_mod2(m - k + j - 1, j)


def _sq_generator(ring: PolyRing, g: int, k: int) -> Poly:
    block, m = ring.block_of(g)
    if k == 0:
        return ring.gen(g)
    if k > m:
        return ring.zero()
    acc = ring.zero()
    for j in range(k + 1):
        if wu_coefficient(m, k, j):
            acc = acc + _block_gen(ring, block, k - j) * _block_gen(ring, block, m + j)
    return acc


class _SqTable:
    """Memoized Sq^k on monomials of one ring via the motivic Cartan formula.

    Sq^k(xy) = sum_{i+j=k} tau^{[i, j both odd]} Sq^i(x) Sq^j(y).
    """

    def __init__(self, ring: PolyRing):
        self.ring = ring
        self.gen_memo: dict[tuple[int, int], Poly] = {}
        self.memo: dict[tuple[int, tuple], Poly] = {}

    def gen(self, g: int, k: int) -> Poly:
        key = (g, k)
        if key not in self.gen_memo:
            self.gen_memo[key] = _sq_generator(self.ring, g, k)
        return self.gen_memo[key]

    def monomial(self, k: int, exps: tuple) -> Poly:
        key = (k, exps)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        ring = self.ring
        if not any(exps):
            val = ring.one() if k == 0 else ring.zero()
        else:
            g = next(i for i, x in enumerate(exps) if x)
            rest = list(exps)
            rest[g] -= 1
            rest = tuple(rest)
            deg_rest = sum(x * d[0] for x, d in zip(rest, ring.degrees))
            val = ring.zero()
            for i in range(0, k + 1):
                j = k - i
                if j > deg_rest:
                    continue
                a = self.gen(g, i)
                if not a:
                    continue
                b = self.monomial(j, rest)
                if not b:
                    continue
                val = val + (a * b).scale(1 if (i % 2 and j % 2) else 0, 0)
        self.memo[key] = val
        return val


@lru_cache(maxsize=None)
def _sq_table(ring: PolyRing) -> _SqTable:
    return _SqTable(ring)


def sq(k: int, x: Poly) -> Poly:
    """Sq^k on a BO element; H is fixed by Sq^0 and killed by Sq^{>0}."""
    _require_bo(x)
    if k < 0:
        raise IndexRangeError("Sq^k needs k >= 0")
    table = _sq_table(x.ring)
    acc: set = set()
    for e, t, mk in x.terms:
        for tm in table.monomial(k, e).scale(t, mk).terms:
            if tm in acc:
                acc.remove(tm)
            else:
                acc.add(tm)
    return Poly(x.ring, frozenset(acc))


# -- the R-bullet oracle ---------------------------------------------------

def _extract_sq(k: int, images: Poly, degree: int, target: PolyRing) -> Poly:
    """Pick the cohomological degree degree+k part of R(P) and strip tau^{k/2}.

    R = sum_i Sq^{2i} + Sq^{2i+1} tau^{1/2}, and every extra x-degree carries one
    tau^{1/2}, so the degree d+k part is tau^{(k mod 2)/2} Sq^k P.
    """
    out = []
    for tm in images.terms:
        if images.term_degree(tm) != degree + k:
            continue
        e, t, mk = tm
        t -= k % 2
        if t % 2:
            raise InvariantBreach("R-bullet produced an odd half-tau exponent", k=k)
        out.append((e, t // 2, mk))
    return Poly(target, frozenset(out))


@lru_cache(maxsize=None)
def _r_bullet_x(n: int) -> Evaluator:
    half = diagonal_ring(n, tau_den=2)
    images = []
    for j in range(n):
        xj = half.gen(j)
        images.append(xj + (xj * xj).scale(1, 0))
    return Evaluator(diagonal_ring(n), half, images)


def r_bullet(x: Poly) -> Poly:
    """Total operation on a diagonal element: x_j -> x_j + tau^{1/2} x_j^2."""
    if x.ring.kind != "diag" or x.ring.tau_den != 1:
        raise ModelMismatch("r_bullet acts on integral diagonal elements")
    return _r_bullet_x(x.ring.ngens)(x)


def sq_oracle(k: int, x: Poly) -> Poly:
    """Sq^k(delta*(x)) computed through R-bullet in the x-variables."""
    if k < 0:
        raise IndexRangeError("Sq^k needs k >= 0")
    d = delta_star(x)
    out = d.ring.zero()
    for deg, part in d.by_degree().items():
        out = out + _extract_sq(k, r_bullet(part), deg, d.ring)
    return out


# -- symmetric coordinates ---------------------------------------------------

@lru_cache(maxsize=None)
def _sigma_expander(n: int) -> Evaluator:
    diag = diagonal_ring(n)
    return Evaluator(sym_ring(n), diag, [sigma(i, range(n), diag) for i in range(1, n + 1)])


def _retau(p: Poly, target: PolyRing) -> Poly:
    f = target.tau_den // p.ring.tau_den
    return Poly(target, frozenset((e, t * f, mk) for e, t, mk in p.terms))


def expand_sym(y: Poly) -> Poly:
    """s_i -> sigma_i(x_1..x_n); half-tau exponents are kept."""
    n = y.ring.ngens
    ev = _sigma_expander(n)
    if y.ring.tau_den == 1:
        return ev(y)
    half = diagonal_ring(n, tau_den=2)
    return Evaluator(y.ring, half, [_retau(p, half) for p in ev.images])(y)


def symmetric_reduce(p: Poly) -> Poly:
    """Write a symmetric diagonal polynomial in the elementary basis s_1..s_n.

    Leading-term algorithm: the lex-largest exponent a_1 >= ... >= a_n is
    removed by prod s_i^{a_i - a_{i+1}}.  Works for either tau denominator.
    """
    if p.ring.kind != "diag":
        raise ModelMismatch("symmetric_reduce expects a diagonal element")
    n, den = p.ring.ngens, p.ring.tau_den
    target = sym_ring(n, den)
    expander = _sigma_expander(n)
    by_exp: dict[tuple, set] = {}
    for e, t, mk in p.terms:
        by_exp.setdefault(e, set()).add((t, mk))
    result: list = []
    while by_exp:
        lead = max(by_exp)
        if any(lead[i] < lead[i + 1] for i in range(n - 1)):
            raise InvariantBreach("polynomial is not symmetric", leading=lead)
        s_exp = tuple(lead[i] - (lead[i + 1] if i + 1 < n else 0) for i in range(n))
        coeff = list(by_exp[lead])
        expansion = expander.monomial(s_exp)
        for t, mk in coeff:
            result.append((s_exp, t, mk))
            for e2, t2, mk2 in expansion.terms:
                if mk & mk2:
                    continue
                key = (t2 * den + t, mk | mk2)
                bucket = by_exp.setdefault(e2, set())
                if key in bucket:
                    bucket.remove(key)
                else:
                    bucket.add(key)
        for e2 in [e for e, b in by_exp.items() if not b]:
            del by_exp[e2]
    return Poly(target, xor_terms(result))


@lru_cache(maxsize=None)
def _delta_sym_evaluator(n: int) -> Evaluator:
    target = sym_ring(n)
    return Evaluator(bo_ring(n), target, [target.gen(i - 1).scale(i // 2, 0) for i in range(1, n + 1)])


def delta_star_sym(x: Poly) -> Poly:
    """delta*(x) written in symmetric coordinates: u_i -> tau^{[i/2]} s_i."""
    _require_bo(x)
    if len(x.ring.blocks) != 1:
        raise PreconditionError("symmetric coordinates need a single block")
    return _delta_sym_evaluator(x.ring.blocks[0])(x)


@lru_cache(maxsize=None)
def _r_bullet_sym(n: int) -> Evaluator:
    """R-bullet on H[s_1..s_n]: each R(sigma_i) reduced back to the s-basis."""
    half_x = _r_bullet_x(n)
    diag = diagonal_ring(n)
    images = []
    for i in range(1, n + 1):
        images.append(symmetric_reduce(half_x(sigma(i, range(n), diag))))
    return Evaluator(sym_ring(n), sym_ring(n, tau_den=2), images)


def sq_oracle_sym(k: int, x: Poly) -> Poly:
    """sq_oracle in symmetric coordinates; equal to sq_oracle after expand_sym.

    The s_i are algebraically independent, so comparing in these coordinates
    is exact and avoids the blow-up of the x-expansion.
    """
    if k < 0:
        raise IndexRangeError("Sq^k needs k >= 0")
    d = delta_star_sym(x)
    ev = _r_bullet_sym(d.ring.ngens)
    out = d.ring.zero()
    for deg, part in d.by_degree().items():
        out = out + _extract_sq(k, ev(part), deg, d.ring)
    return out


# -- parabolic restriction -----------------------------------------------------

def restrict_to_pd(x: Poly) -> Poly:
    """u_{2i} -> c_i; u_{2i+1} -> 0 (n even) or c_i u_1 (n odd)."""
    _require_bo(x)
    if len(x.ring.blocks) != 1:
        raise PreconditionError("restriction to P_d acts on a single BO block")
    n = x.ring.blocks[0]
    target = pd_ring(n)
    off = n % 2
    images = []
    for i in range(1, n + 1):
        if i % 2 == 0:
            images.append(target.gen(off + i // 2 - 1))
        elif not off:
            images.append(target.zero())
        elif i == 1:
            images.append(target.gen(0))
        else:
            images.append(target.gen(off + i // 2 - 1) * target.gen(0))
    return substitute(x, images, target)


def monomials(n: int, max_degree: int) -> Iterable[tuple[int, ...]]:
    """Exponent vectors of all u-monomials of degree <= max_degree in BO(n)."""
    def rec(i: int, left: int, acc: list):
        if i > n:
            yield tuple(acc)
            return
        for e in range(left // i + 1):
            acc.append(e)
            yield from rec(i + 1, left - e * i, acc)
            acc.pop()
    yield from rec(1, max_degree, [])


def monomial(ring: PolyRing, exps: Sequence[int], t: int = 0, mask: int = 0) -> Poly:
    return Poly(ring, frozenset({(tuple(exps), t, mask)}))

