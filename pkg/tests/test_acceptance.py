"""The ten acceptance criteria, each with its time limit.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``;
one PASS/FAIL line is printed per criterion either way.
"""
import itertools
import json
import random
import shlex
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest

from qfi import bo_ring as bo
from qfi import chech, motive, witt
from qfi.cli import capture
from qfi.kfield import FieldModel, UnitMonomial
from qfi.selftest import random_form
from qfi.syntax import eval_form, parse_form, render_form

GOLDEN = Path(__file__).parent / "golden"


def pfister_closed_form_vs_induction():
    checked = 0
    for m in range(1, 6):
        model = FieldModel.standard(m)
        singles = [model.unit(x) for x in model.names]
        for n in range(1, min(4, m) + 1):
            for units in itertools.combinations(singles, n):
                ctx = chech.PfisterContext(model, units)
                if not chech.u_pfister_inductive_check(ctx):
                    return False, f"mismatch for {ctx.describe()}"
                checked += 1
    return True, f"{checked} contexts"


def u11_golden():
    model = FieldModel.from_text("a,b,c,d")
    q = eval_form(parse_form("pf(a,b) (x) <1,c,d>", model), model.m)
    v = chech.uclasses_of_form(q, model).vector
    ok = v[11].render() == "mu^3*{c,d}" and v[11] == v[3] * v[8]
    return ok, f"u11 = {v[11].render()}"


def steenrod_oracle():
    cases = 0
    for n in range(1, 7):
        ring = bo.bo_ring(n)
        for e in bo.monomials(n, 12):
            x = bo.monomial(ring, e)
            for k in range(13):
                if bo.delta_star_sym(bo.sq(k, x)) != bo.sq_oracle_sym(k, x):
                    return False, f"Sq^{k} on {e} in BO({n})"
                cases += 1
    # the symmetric coordinates agree with the x-variable oracle
    for n in range(1, 4):
        ring = bo.bo_ring(n)
        for e in bo.monomials(n, 6):
            x = bo.monomial(ring, e)
            for k in range(7):
                if bo.expand_sym(bo.sq_oracle_sym(k, x)) != bo.sq_oracle(k, x):
                    return False, f"coordinate change on {e}"
    return True, f"{cases} cases"


def sum_formula_coherence():
    for n in range(1, 7):
        for r in range(1, n + 1):
            u = bo.u_class(r, n)
            for m in range(n + 1):
                if bo.delta_star(bo.corestrict_sum(u, m, n - m)) != bo.delta_star(u):
                    return False, f"delta* square for u{r}, {m}+{n - m}"
            for a, b in itertools.product(range(n + 1), repeat=2):
                c = n - a - b
                if c < 0:
                    continue
                left = bo.corestrict_sum(bo.corestrict_sum(u, a, b + c), b, c, block=1)
                right = bo.corestrict_sum(bo.corestrict_sum(u, a + b, c), a, b, block=0)
                if left != right:
                    return False, f"coassociativity for u{r}, {a}+{b}+{c}"
    return True, "n <= 6"


def low_classes_vanish():
    rng = random.Random(7)
    model = FieldModel.standard(6)
    singles = [model.unit(x) for x in model.names]
    for trial in range(50):
        n = rng.randint(1, 4)
        units = rng.sample(singles, n)
        bs = [UnitMonomial(rng.randrange(64), 6) for _ in range(rng.randint(1, 5))]
        ctx = chech.PfisterContext(model, tuple(units))
        v = chech.u_alpha_divisible(ctx, bs)
        q = witt.tensor(witt.pfister(units, 6), witt.QForm(tuple(bs), 6))
        if not witt.in_fundamental_power(q, n) or any(v[i] for i in range(1, 2 ** (n - 1))):
            return False, f"trial {trial}"
    for trial in range(20):
        us = [UnitMonomial(rng.randrange(64), 6) for _ in range(rng.randint(0, 4))]
        q = witt.QForm(tuple(x for u in us for x in (u, u)) + (model.one(),) * rng.randint(0, 1), 6)
        if chech.uclasses_of_form(q, model).vector.nonzero():
            return False, "split form with a nonzero class"
    for n in range(1, 5):
        v = chech.uclasses_of_form(witt.pfister(singles[:n], 6), model).vector
        if not any(v[2 ** r] for r in range(n + 1)) or not any(v[2 ** r - 1] for r in range(1, n + 1)):
            return False, f"anisotropic {n}-fold Pfister form looks split"
    return True, "50 Pfister multiples, 20 split forms"


def arason_agreement():
    model = FieldModel.standard(6)
    singles = [model.unit(x) for x in model.names]
    pool = [model.one(), singles[4], singles[5], singles[4] * singles[5], singles[0] * singles[4]]
    checked = 0
    for n in range(1, 5):
        units = singles[:n]
        ctx = chech.PfisterContext(model, tuple(units))
        for t in range(1, 6):
            for slots in itertools.combinations_with_replacement(pool, t):
                v = chech.u_alpha_divisible(ctx, list(slots))
                q = witt.tensor(witt.pfister(units, 6), witt.QForm(slots, 6))
                if chech.arason_from_u(ctx, v) != witt.e_invariant(q, n):
                    return False, f"n={n}, slots {[model.unit_text(s) for s in slots]}"
                checked += 1
    return True, f"{checked} forms"


def j_bounds():
    model = FieldModel.standard(5)
    for n in range(1, 6):
        ctx = chech.PfisterContext(model, tuple(model.unit(x) for x in model.names[:n]))
        if chech.j_min(chech.u_pfister(ctx)) != 2 ** (n - 1) - 1:
            return False, f"n={n}"
    m4 = FieldModel.from_text("a,b,c,d")
    v = chech.uclasses_of_form(eval_form(parse_form("pf(a,b) (x) <1,c,d>", m4), 4), m4).vector
    ok = chech.j_min(v) == 1 and 5 in chech.j_lower_set(v)
    return ok, f"j_min = {chech.j_min(v)}"


def motive_bookkeeping():
    for n in range(11):
        if motive.split_summands(motive.torsor_motive(n, ["0"] * n)).rank != 2 ** n:
            return False, f"torsor n={n}"
    for d in range(1, 7):
        mp = motive.grassmannian_motive(2 * d, {2 * j + 1: f"u{2 * j + 1}" for j in range(d)})
        expect = motive.PoincarePoly.one()
        for j in range(d):
            expect = expect * motive.PoincarePoly.from_dict(Counter([(0, 0), (2 * j, j)]))
        if motive.split_poincare(mp) != expect or expect.value() != 2 ** d:
            return False, f"Grassmannian d={d}"
    code, out, _ = capture(["--gens", "a,b,c,d", "--json", "motive", "--grassmannian", "<a,b,a*b,c,d,c*d>"])
    comps = json.loads(out)["result"]["component_data"]
    for c in comps:
        twists = sorted((f.weight, f.shift) for f in motive.parse_motive(c["motive"]).factors)
        if twists != [(1, 3), (2, 5)]:
            return False, f"Albert twists {twists}"
    for n in range(1, 11):
        if motive.affine_quadric_motive(n) != [(0, 0), (n // 2, n - 1)]:
            return False, f"affine quadric n={n}"
    return code == 0 and len(comps) == 2, "Albert: 2 components with (1)[3], (2)[5]"


def vanishing_region():
    model = FieldModel.standard(9)
    for n in range(2, 6):
        ctx = chech.PfisterContext(model, tuple(model.unit(x) for x in model.names[:n]))
        for term in chech.positive_basis(ctx, 4, 4):
            b, a = ctx.term_bidegree(term)
            if chech.region_car(n, a, b):
                return False, f"n={n}, term {term} at ({b},{a})"
        b, a = ctx.mu().bidegree()
        if Fraction(b, a) != 2 + Fraction(1, 2 ** (n - 1) - 1) or chech.region_car(n, a, b):
            return False, f"mu off the boundary for n={n}"
        if not chech.region_car(n, a, b + 1):
            return False, f"boundary not sharp for n={n}"
    return True, "n = 2..5"


def cli_contract():
    for line in (GOLDEN / "corpus.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        name, rest = line.split(None, 1)
        argv = shlex.split(rest)
        code, out, err = capture(argv)
        text = f"$ qfi {shlex.join(argv)}\n--- exit {code}\n--- stdout\n{out}--- stderr\n{err}"
        if text != (GOLDEN / f"{name}.txt").read_text():
            return False, f"golden {name} differs"
    rng = random.Random(11)
    model = FieldModel.standard(4)
    for _ in range(1000):
        node = random_form(rng, model, 4)
        if parse_form(render_form(node, model), model) != node:
            return False, f"round trip fails on {render_form(node, model)}"
    code, _, _ = capture(["selftest"])
    return code == 0, "goldens, 1000 round trips, selftest"


CRITERIA = [
    (1, "Pfister closed form equals induction", pfister_closed_form_vs_induction, 5),
    (2, "u11 golden value", u11_golden, 1),
    (3, "Steenrod squares match the oracle", steenrod_oracle, 60),
    (4, "sum formula coherence", sum_formula_coherence, 5),
    (5, "low classes vanish on I^n; split criterion", low_classes_vanish, 30),
    (6, "Arason agreement", arason_agreement, 30),
    (7, "J bounds", j_bounds, 5),
    (8, "motive bookkeeping", motive_bookkeeping, 5),
    (9, "vanishing-region consistency", vanishing_region, 10),
    (10, "CLI goldens, round trip, selftest", cli_contract, 60),
]


def run_criterion(fn, limit):
    start = time.perf_counter()
    ok, note = fn()
    elapsed = time.perf_counter() - start
    return ok and elapsed < limit, elapsed, note


def _line(num, title, ok, elapsed, limit, note):
    return f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.2f}s / {limit}s; {note})"


@pytest.mark.parametrize("num,title,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, limit, capsys):
    ok, elapsed, note = run_criterion(fn, limit)
    with capsys.disabled():
        print("\n" + _line(num, title, ok, elapsed, limit, note))
    assert ok, note


if __name__ == "__main__":
    for num, title, fn, limit in CRITERIA:
        ok, elapsed, note = run_criterion(fn, limit)
        print(_line(num, title, ok, elapsed, limit, note))
