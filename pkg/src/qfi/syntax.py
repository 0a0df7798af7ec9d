"""Text grammar for forms and algebra elements.

Forms::

    sum    := tensor ('+' tensor)*
    tensor := scaled ('(x)' scaled)*
    scaled := unit '*' scaled | atom
    atom   := '<' [unit (',' unit)*] '>' | 'pf(' [unit (',' unit)*] ')' | '(' sum ')'
    unit   := ident ('*' ident)* | '1'

Elements (K, H, BO-type polynomials, model-ring elements)::

    expr   := '0' | term ('+' term)*
    term   := block ('(x)' block)*
    block  := factor ('*' factor)*
    factor := '1' | 't' ['^' int | '^(' int '/2)'] | '{' unit (',' unit)* '}'
            | name ['^' int] | 'Q[' int (',' int)* '](g)'
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .bo_ring import Poly, PolyRing
from .chech import ModelElement, PfisterContext, q_composite, tau_act
from .errors import ParseError, UnknownGenerator
from .kfield import FieldModel, HElement, KElement, UnitMonomial, k_symbol
from .witt import QForm, oplus, pfister, scale, tensor

_TOKEN = re.compile(r"\s*(?:(?P<tensor>\(x\))|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[<>,()*+{}^\[\]/~]))")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Tok("op" if kind == "op" else kind, m.group(kind), start))
        pos = m.end()
    out.append(Tok("end", "", len(text)))
    return out


class _Cursor:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind != "end" and self.tok.text == text

    def take(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.take()

    def expect_int(self) -> int:
        if self.tok.kind != "int":
            raise ParseError("expected an integer", self.tok.pos)
        return int(self.take().text)

    def done(self) -> None:
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)


# -- units -----------------------------------------------------------------------

def _unit_start(tok: Tok) -> bool:
    return (tok.kind == "ident" and tok.text != "pf") or (tok.kind == "int" and tok.text == "1")


def _parse_unit(cur: _Cursor, model: FieldModel) -> UnitMonomial:
    if not _unit_start(cur.tok):
        raise ParseError("expected a unit", cur.tok.pos)
    bits = 0
    while True:
        t = cur.take()
        if t.kind == "ident":
            try:
                bits ^= 1 << model.index(t.text)
            except UnknownGenerator as exc:
                raise UnknownGenerator(f"unknown generator {t.text!r}", t.pos, generator=t.text) from exc
        if cur.at("*") and _unit_start(cur.peek()):
            cur.take()
            continue
        return UnitMonomial(bits, model.m)


def parse_unit(text: str, model: FieldModel) -> UnitMonomial:
    cur = _Cursor(text)
    u = _parse_unit(cur, model)
    cur.done()
    return u


# -- forms -----------------------------------------------------------------------

@dataclass(frozen=True)
class Diagonal:
    units: tuple[UnitMonomial, ...]


@dataclass(frozen=True)
class Pfister:
    units: tuple[UnitMonomial, ...]


@dataclass(frozen=True)
class Sum:
    left: "FormExpr"
    right: "FormExpr"


@dataclass(frozen=True)
class Tensor:
    left: "FormExpr"
    right: "FormExpr"


@dataclass(frozen=True)
class Scale:
    unit: UnitMonomial
    form: "FormExpr"


FormExpr = Union[Diagonal, Pfister, Sum, Tensor, Scale]


def _unit_list(cur: _Cursor, model: FieldModel, close: str) -> tuple[UnitMonomial, ...]:
    out = []
    if cur.at(close):
        cur.take()
        return ()
    while True:
        out.append(_parse_unit(cur, model))
        if cur.at(","):
            cur.take()
            continue
        cur.expect(close)
        return tuple(out)


def _form_sum(cur: _Cursor, model: FieldModel) -> FormExpr:
    node = _form_tensor(cur, model)
    while cur.at("+"):
        cur.take()
        node = Sum(node, _form_tensor(cur, model))
    return node


def _form_tensor(cur: _Cursor, model: FieldModel) -> FormExpr:
    node = _form_scaled(cur, model)
    while cur.tok.kind == "tensor":
        cur.take()
        node = Tensor(node, _form_scaled(cur, model))
    return node


def _form_scaled(cur: _Cursor, model: FieldModel) -> FormExpr:
    if _unit_start(cur.tok):
        u = _parse_unit(cur, model)
        cur.expect("*")
        return Scale(u, _form_scaled(cur, model))
    return _form_atom(cur, model)


def _form_atom(cur: _Cursor, model: FieldModel) -> FormExpr:
    t = cur.tok
    if cur.at("<"):
        cur.take()
        return Diagonal(_unit_list(cur, model, ">"))
    if t.kind == "ident" and t.text == "pf":
        cur.take()
        cur.expect("(")
        return Pfister(_unit_list(cur, model, ")"))
    if cur.at("("):
        cur.take()
        node = _form_sum(cur, model)
        cur.expect(")")
        return node
    raise ParseError(f"expected a form, found {t.text or 'end of input'!r}", t.pos)


def parse_form(text: str, model: FieldModel) -> FormExpr:
    cur = _Cursor(text)
    node = _form_sum(cur, model)
    cur.done()
    return node


def eval_form(node: FormExpr, m: int) -> QForm:
    if isinstance(node, Diagonal):
        return QForm(node.units, m)
    if isinstance(node, Pfister):
        return pfister(node.units, m)
    if isinstance(node, Sum):
        return oplus(eval_form(node.left, m), eval_form(node.right, m))
    if isinstance(node, Tensor):
        return tensor(eval_form(node.left, m), eval_form(node.right, m))
    return scale(node.unit, eval_form(node.form, m))


def _prec(node: FormExpr) -> int:
    return {Sum: 1, Tensor: 2, Scale: 3}.get(type(node), 4)


def render_form(node: FormExpr, model: FieldModel) -> str:
    def wrap(child: FormExpr, ok: bool) -> str:
        s = render_form(child, model)
        return s if ok else f"({s})"

    if isinstance(node, Diagonal):
        return "<" + ", ".join(model.unit_text(u) for u in node.units) + ">"
    if isinstance(node, Pfister):
        return "pf(" + ", ".join(model.unit_text(u) for u in node.units) + ")"
    if isinstance(node, Sum):
        return f"{wrap(node.left, _prec(node.left) >= 1)} + {wrap(node.right, _prec(node.right) > 1)}"
    if isinstance(node, Tensor):
        return f"{wrap(node.left, _prec(node.left) >= 2)} (x) {wrap(node.right, _prec(node.right) > 2)}"
    return f"{model.unit_text(node.unit)} * {wrap(node.form, _prec(node.form) > 3)}"


# -- elements --------------------------------------------------------------------

@dataclass(frozen=True)
class RawFactor:
    kind: str  # one, tau, sym, name, Q
    halves: int = 0
    units: tuple = ()
    name: str = ""
    exp: int = 1
    qs: tuple = ()
    pos: int = 0


def _raw_factor(cur: _Cursor, model: FieldModel) -> RawFactor:
    t = cur.tok
    if t.kind == "int":
        if t.text != "1":
            raise ParseError("only the integer 1 may stand as a factor", t.pos)
        cur.take()
        return RawFactor("one", pos=t.pos)
    if cur.at("{"):
        cur.take()
        units = []
        while True:
            units.append(_parse_unit(cur, model))
            if cur.at(","):
                cur.take()
                continue
            cur.expect("}")
            break
        return RawFactor("sym", units=tuple(units), pos=t.pos)
    if t.kind == "ident" and t.text == "t":
        cur.take()
        halves = 2
        if cur.at("^"):
            cur.take()
            if cur.at("("):
                cur.take()
                num = cur.expect_int()
                cur.expect("/")
                den = cur.expect_int()
                cur.expect(")")
                if den != 2:
                    raise ParseError("tau exponents are integers or halves", t.pos)
                halves = num
            else:
                halves = 2 * cur.expect_int()
        return RawFactor("tau", halves=halves, pos=t.pos)
    if t.kind == "ident" and t.text == "Q":
        cur.take()
        cur.expect("[")
        qs = [cur.expect_int()]
        while cur.at(","):
            cur.take()
            qs.append(cur.expect_int())
        cur.expect("]")
        cur.expect("(")
        g = cur.take()
        if g.text != "g":
            raise ParseError("Milnor operations apply to g", g.pos)
        cur.expect(")")
        return RawFactor("Q", qs=tuple(qs), pos=t.pos)
    if t.kind == "ident":
        cur.take()
        exp = 1
        if cur.at("^"):
            cur.take()
            exp = cur.expect_int()
        return RawFactor("name", name=t.text, exp=exp, pos=t.pos)
    raise ParseError(f"expected a factor, found {t.text or 'end of input'!r}", t.pos)


def _raw_expr(text: str, model: FieldModel) -> list[list[list[RawFactor]]]:
    """Terms -> tensor blocks -> factors.  '0' alone is the empty sum."""
    cur = _Cursor(text)
    if cur.tok.kind == "int" and cur.tok.text == "0" and cur.peek().kind == "end":
        return []
    terms = []
    while True:
        blocks = []
        while True:
            factors = [_raw_factor(cur, model)]
            while cur.at("*"):
                cur.take()
                factors.append(_raw_factor(cur, model))
            blocks.append(factors)
            if cur.tok.kind != "tensor":
                break
            cur.take()
        terms.append(blocks)
        if not cur.at("+"):
            break
        cur.take()
    cur.done()
    return terms


def _coefficient(f: RawFactor, model: FieldModel, allow_half: bool = False) -> tuple[int, KElement] | None:
    """(tau halves, symbol) for coefficient factors, None otherwise."""
    if f.kind == "one":
        return 0, KElement.one()
    if f.kind == "tau":
        if f.halves % 2 and not allow_half:
            raise ParseError("half tau exponent in an integral ring", f.pos)
        return f.halves, KElement.one()
    if f.kind == "sym":
        return 0, k_symbol(list(f.units))
    return None


def _single_block(term: list, what: str) -> list[RawFactor]:
    if len(term) != 1:
        raise ParseError(f"{what} has no tensor blocks", term[1][0].pos)
    return term[0]


def parse_h(text: str, model: FieldModel) -> HElement:
    out = HElement.zero()
    for term in _raw_expr(text, model):
        val = HElement.one()
        for f in _single_block(term, "an H element"):
            c = _coefficient(f, model)
            if c is None:
                raise ParseError(f"{f.name!r} is not a coefficient", f.pos)
            val = val * HElement(frozenset((c[0] // 2 + t, mk) for t, mk in c[1].to_h().terms))
        out = out + val
    return out


def parse_k(text: str, model: FieldModel) -> KElement:
    h = parse_h(text, model)
    if any(t for t, _ in h.terms):
        raise ParseError("tau is not allowed in a K element", 0)
    return KElement(frozenset(mk for _, mk in h.terms))


def parse_poly(text: str, ring: PolyRing, model: FieldModel) -> Poly:
    offsets = ring.offsets()
    out = ring.zero()
    for term in _raw_expr(text, model):
        if len(term) != len(ring.blocks):
            raise ParseError(f"expected {len(ring.blocks)} tensor blocks, got {len(term)}", term[0][0].pos)
        val = ring.one()
        for b, factors in enumerate(term):
            names = ring.names[offsets[b]:offsets[b] + ring.blocks[b]]
            for f in factors:
                c = _coefficient(f, model, allow_half=ring.tau_den == 2)
                if c is not None:
                    halves, k = c
                    t = halves if ring.tau_den == 2 else halves // 2
                    val = val * ring.const(k.to_h()) * Poly(ring, frozenset({(ring.unit_exps(), t, 0)}))
                    continue
                if f.kind != "name" or f.name not in names:
                    raise ParseError(f"unknown generator {f.name or f.kind!r} in this ring", f.pos)
                val = val * ring.gen(offsets[b] + names.index(f.name)) ** f.exp
        out = out + val
    return out


def parse_model_element(text: str, ctx: PfisterContext) -> ModelElement:
    model = ctx.model
    out = ctx.zero()
    for term in _raw_expr(text, model):
        val = ctx.one()
        for f in _single_block(term, "a model element"):
            c = _coefficient(f, model)
            if c is not None:
                val = tau_act(val * ctx.coeff(c[1].to_h()), c[0] // 2)
                continue
            if ctx.n == 0:
                raise ParseError("the point context has only coefficients", f.pos)
            if f.kind == "Q":
                if any(not 0 <= q <= ctx.n - 2 for q in f.qs) or len(set(f.qs)) != len(f.qs):
                    raise ParseError("Q indices must be distinct and in 0..n-2", f.pos)
                val = val * q_composite(ctx.gamma(), sorted(f.qs))
            elif f.name == "g":
                val = val * ctx.gamma() ** f.exp
            elif f.name == "mu":
                val = val * ctx.mu() ** f.exp
            else:
                raise ParseError(f"unknown model symbol {f.name!r}", f.pos)
        out = out + val
    return out

