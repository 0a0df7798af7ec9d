"""Property suites run by ``qfi selftest``; each returns the first counterexample or None."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from . import bo_ring as bo
from . import chech, motive, syntax, witt
from .kfield import FieldModel, HElement, KElement, UnitMonomial, ann_pure_symbol_membership, h_mul, k_mul

Counterexample = Optional[str]


@dataclass(frozen=True)
class SelftestConfig:
    seed: int = 20240601
    samples: int = 40
    max_n: int = 5
    sq_degree: int = 8


def _rand_k(rng: random.Random, m: int) -> KElement:
    return KElement.from_terms(rng.randrange(1 << m) for _ in range(rng.randrange(4)))


def suite_kfield(cfg: SelftestConfig) -> Counterexample:
    rng = random.Random(cfg.seed)
    m = 5
    for _ in range(cfg.samples):
        x, y, z = (_rand_k(rng, m) for _ in range(3))
        if k_mul(k_mul(x, y), z) != k_mul(x, k_mul(y, z)) or k_mul(x, y) != k_mul(y, x):
            return f"K product not associative/commutative at {x}, {y}, {z}"
        s = KElement.monomial(rng.randrange(1, 1 << m))
        if ann_pure_symbol_membership(x, s) != (not k_mul(x, s)):
            return f"annihilator test disagrees with the product for {x}, {s}"
        hx = HElement.from_terms((rng.randrange(3), rng.randrange(1 << m)) for _ in range(3))
        hy = HElement.from_terms((rng.randrange(3), rng.randrange(1 << m)) for _ in range(3))
        if h_mul(hx, hy) != h_mul(hy, hx):
            return f"H product not commutative at {hx}, {hy}"
    return None


def suite_bo(cfg: SelftestConfig) -> Counterexample:
    for n in range(1, cfg.max_n + 1):
        ring = bo.bo_ring(n)
        for e in bo.monomials(n, cfg.sq_degree):
            x = bo.monomial(ring, e)
            for k in range(cfg.sq_degree + 1):
                if bo.delta_star_sym(bo.sq(k, x)) != bo.sq_oracle_sym(k, x):
                    return f"Sq^{k} disagrees with the R-bullet oracle on exponents {e} in BO({n})"
        for r in range(1, n + 1):
            u = ring.gen(r - 1)
            for m in range(n + 1):
                if bo.delta_star(bo.corestrict_sum(u, m, n - m)) != bo.delta_star(u):
                    return f"sum restriction of u_{r} along {m}+{n - m} breaks delta*"
    return None


def suite_witt(cfg: SelftestConfig) -> Counterexample:
    m = 3
    for n in range(0, 4):
        span = witt.pfister_span(n, m)
        for bits in range(1 << (1 << m)):
            support = frozenset(u for u in range(1 << m) if bits >> u & 1)
            q = witt.QForm(tuple(UnitMonomial(u, m) for u in sorted(support)), m)
            if witt.in_fundamental_power(q, n) != witt.in_pfister_span(q, n, span):
                return f"I^{n} membership disagrees with the Pfister span for support {sorted(support)}"
    return None


def suite_chech(cfg: SelftestConfig) -> Counterexample:
    rng = random.Random(cfg.seed + 1)
    model = FieldModel.standard(6)
    for n in range(1, 5):
        ctx = chech.PfisterContext(model, tuple(model.unit(model.names[i]) for i in range(n)))
        if not chech.u_pfister_inductive_check(ctx):
            return f"closed form and induction disagree for n={n}"
    for _ in range(cfg.samples // 4):
        n = rng.randint(1, 3)
        t = rng.randint(1, 4)
        units = [model.unit(model.names[i]) for i in range(n)]
        ctx = chech.PfisterContext(model, tuple(units))
        bs = [UnitMonomial(rng.randrange(1 << model.m), model.m) for _ in range(t)]
        v = chech.u_alpha_divisible(ctx, bs)
        q = witt.tensor(witt.pfister(units, model.m), witt.QForm(tuple(bs), model.m))
        if chech.arason_from_u(ctx, v) != witt.e_invariant(q, n):
            return f"Arason class disagrees with e_{n} for slots {[b.bits for b in bs]}"
        if any(v[i] for i in range(1, 2 ** (n - 1))):
            return f"low u-classes do not vanish for n={n}, slots {[b.bits for b in bs]}"
    return None


def suite_motive(cfg: SelftestConfig) -> Counterexample:
    for n in range(0, 11):
        mp = motive.torsor_motive(n, ["0"] * n)
        if motive.split_summands(mp).rank != 2 ** n:
            return f"split torsor rank wrong for n={n}"
        if motive.parse_motive(mp.render()) != mp:
            return f"motive round trip fails for n={n}"
    return None


def suite_syntax(cfg: SelftestConfig) -> Counterexample:
    rng = random.Random(cfg.seed + 2)
    model = FieldModel.standard(4)
    for _ in range(cfg.samples):
        node = random_form(rng, model, 3)
        text = syntax.render_form(node, model)
        if syntax.parse_form(text, model) != node:
            return f"form round trip fails on {text}"
    return None


def random_form(rng: random.Random, model: FieldModel, depth: int):
    def unit():
        return UnitMonomial(rng.randrange(1 << model.m), model.m)
    kind = rng.randrange(5) if depth > 0 else rng.randrange(2)
    if kind == 0:
        return syntax.Diagonal(tuple(unit() for _ in range(rng.randint(0, 3))))
    if kind == 1:
        return syntax.Pfister(tuple(unit() for _ in range(rng.randint(0, 2))))
    if kind == 2:
        return syntax.Sum(random_form(rng, model, depth - 1), random_form(rng, model, depth - 1))
    if kind == 3:
        return syntax.Tensor(random_form(rng, model, depth - 1), random_form(rng, model, depth - 1))
    return syntax.Scale(unit(), random_form(rng, model, depth - 1))


SUITES: dict[str, Callable[[SelftestConfig], Counterexample]] = {
    "kfield": suite_kfield,
    "bo_ring": suite_bo,
    "witt": suite_witt,
    "chech": suite_chech,
    "motive": suite_motive,
    "syntax": suite_syntax,
}


def run_all(cfg: SelftestConfig = SelftestConfig()) -> list[tuple[str, Counterexample]]:
    return [(name, fn(cfg)) for name, fn in SUITES.items()]
