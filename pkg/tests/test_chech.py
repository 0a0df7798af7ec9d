import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qfi import bo_ring as bo
from qfi import chech, witt
from qfi.errors import (
    DependentSymbol,
    IndexRangeError,
    NotInImage,
    OddDimension,
    PreconditionError,
    UnsupportedShape,
)
from qfi.kfield import FieldModel, HElement, KElement, UnitMonomial
from qfi.syntax import eval_form, parse_form, parse_model_element

MODEL = FieldModel.standard(6)
A, B, C, D, E, F = (MODEL.unit(x) for x in "abcdef")


def ctx_of(*units):
    return chech.PfisterContext(MODEL, tuple(units))


def form(text, model=MODEL):
    return eval_form(parse_form(text, model), model.m)


def elements(ctx, max_s=2, max_terms=3):
    basis = chech.positive_basis(ctx, max_s, 2)
    pos = st.lists(st.sampled_from(basis), max_size=max_terms)
    coeff = st.frozensets(st.tuples(st.integers(0, 2), st.integers(0, (1 << MODEL.m) - 1)), max_size=2)

    def build(parts):
        terms, h = parts
        out = ctx.coeff(HElement.from_terms(h))
        for s, I, k in terms:
            out = out + ctx.basis(s, I, k)
        return out
    return st.tuples(pos, coeff).map(build)


CONTEXTS = [ctx_of(*us) for us in ([A], [A, B], [A, B, C], [A, B, C, D], [A, B, C, D, E])]


# -- ring structure -----------------------------------------------------------------

@pytest.mark.parametrize("ctx", CONTEXTS, ids=lambda c: f"n{c.n}")
def test_basis_product_associative_commutative(ctx):
    basis = [ctx.basis(*t) for t in chech.positive_basis(ctx, 1, 1)][:24]
    coeffs = [ctx.coeff(HElement.term(1, 0)), ctx.coeff(HElement.term(0, 0b100000))]
    items = basis + coeffs
    for x, y in itertools.product(items, repeat=2):
        assert x * y == y * x
    for x, y, z in itertools.product(items[:12] + coeffs, repeat=3):
        assert (x * y) * z == x * (y * z)


@pytest.mark.parametrize("ctx", CONTEXTS, ids=lambda c: f"n{c.n}")
def test_products_and_operations_add_bidegrees(ctx):
    terms = chech.positive_basis(ctx, 1, 1)
    for s, t in itertools.product(terms[:20], repeat=2):
        x, y = ctx.basis(*s), ctx.basis(*t)
        p = x * y
        if p:
            (b1, a1), (b2, a2) = x.bidegree(), y.bidegree()
            assert p.bidegree() == (b1 + b2, a1 + a2)
    for s in terms:
        x = ctx.basis(*s)
        b, a = x.bidegree()
        for i in range(ctx.n):
            y = chech.q_op(i, x)
            if y:
                assert y.bidegree() == (b + 2 ** (i + 1) - 1, a + 2 ** i - 1)


@pytest.mark.parametrize("n", range(1, 5))
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_q_operations_are_derivations(n, data):
    ctx = CONTEXTS[n - 1]
    x = data.draw(elements(ctx))
    y = data.draw(elements(ctx))
    for i in range(n):
        assert chech.q_op(i, x * y) == chech.q_op(i, x) * y + x * chech.q_op(i, y)
        assert not chech.q_op(i, chech.q_op(i, x))


def test_q_of_gamma_squared_vanishes():
    for ctx in CONTEXTS[1:]:
        g = ctx.gamma()
        for i in range(ctx.n):
            assert not chech.q_op(i, g * g)


def test_tau_action():
    ctx = ctx_of(A, B)
    assert chech.tau_act(ctx.gamma()).coeff == ctx.alpha.to_h()
    assert not chech.tau_act(ctx.mu())
    assert not chech.tau_act(chech.q_op(0, ctx.gamma()))
    # tau g = alpha is killed by the relation alpha * {a} = 0
    assert not chech.tau_act(ctx.gamma().times_h(HElement.term(0, 1)))


def test_dependent_units_rejected():
    with pytest.raises(DependentSymbol):
        ctx_of(A, B, A * B)
    with pytest.raises(IndexRangeError):
        ctx_of(A, B).basis(0, 0b10)


def test_coefficients_reduced_modulo_annihilator():
    ctx = ctx_of(A * B)
    # {a} and {b} agree modulo Ann({ab})
    assert ctx.gamma().times_h(HElement.term(0, 0b01)) == ctx.gamma().times_h(HElement.term(0, 0b10))


# -- u-classes ----------------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 6))
def test_u_classes_lie_in_their_bidegrees(n):
    ctx = CONTEXTS[n - 1]
    v = chech.u_pfister(ctx)
    for i in v.nonzero():
        assert v[i].bidegree() == (i, i // 2)
    w = chech.u_alpha_divisible(ctx, [MODEL.one(), F])
    for i in w.nonzero():
        assert w[i].bidegree() == (i, i // 2)


def test_pfister_closed_form_golden():
    v = chech.u_pfister(ctx_of(A, B, C))
    assert {i: v[i].render() for i in v.nonzero()} == {4: "Q[0](g)", 6: "Q[1](g)", 7: "mu"}


@pytest.mark.parametrize("n", range(1, 5))
def test_closed_form_matches_induction(n):
    model = FieldModel.standard(5)
    singles = [model.unit(x) for x in model.names]
    choices = list(itertools.combinations(singles, n))
    choices += [tuple(singles[i] * singles[(i + 1) % 5] for i in range(n))]
    for units in choices:
        ctx = chech.PfisterContext(model, units)
        assert chech.u_pfister_inductive_check(ctx)


def test_gap_in_j_form_golden():
    fc = chech.uclasses_of_form(form("pf(a,b) (x) <1,c,d>"), MODEL)
    v = fc.vector
    assert fc.ctx.describe() == "{a,b}"
    assert v[11].render() == "mu^3*{c,d}"
    assert v[11] == v[3] * v[8]
    assert v[3] == fc.ctx.mu()
    assert chech.j_min(v) == 1
    assert 5 in chech.j_lower_set(v)


def test_one_dim_form_golden():
    fc = chech.uclasses_of_form(form("<a>"), MODEL)
    assert fc.shape == "one-dim"
    assert fc.vector[1].render() == "g"
    assert chech.tau_act(fc.vector[1]).coeff == KElement.monomial(1).to_h()


def test_split_forms_have_trivial_classes():
    for text in ["<a,a>", "<1>", "pf(a,a)", "<a,b,a,b,1>"]:
        fc = chech.uclasses_of_form(form(text), MODEL)
        assert fc.shape == "split"
        assert fc.vector.nonzero() == []


def test_unsupported_shape():
    with pytest.raises(UnsupportedShape):
        chech.uclasses_of_form(form("<a,b,c>"), MODEL)


pfister_divisible = st.tuples(
    st.integers(1, 4),
    st.lists(st.integers(0, (1 << 6) - 1), min_size=1, max_size=5),
)


@given(pfister_divisible)
@settings(max_examples=50, deadline=None)
def test_low_classes_vanish_on_pfister_multiples(args):
    n, slots = args
    units = [A, B, C, D][:n]
    ctx = ctx_of(*units)
    bs = [UnitMonomial(b, 6) for b in slots]
    v = chech.u_alpha_divisible(ctx, bs)
    q = witt.tensor(witt.pfister(units, 6), witt.QForm(tuple(bs), 6))
    assert witt.in_fundamental_power(q, n)
    assert all(not v[i] for i in range(1, 2 ** (n - 1)))
    assert chech.arason_from_u(ctx, v) == witt.e_invariant(q, n)


@given(pfister_divisible)
@settings(max_examples=40, deadline=None)
def test_milnor_classes_are_tau_multiples(args):
    # w_i = tau^{[(i+1)/2]} u_i, read in the model
    n, slots = args
    units = [A, B, C, D][:n]
    ctx = ctx_of(*units)
    bs = [UnitMonomial(b, 6) for b in slots]
    v = chech.u_alpha_divisible(ctx, bs)
    w = witt.milnor_total_w(witt.tensor(witt.pfister(units, 6), witt.QForm(tuple(bs), 6)))
    for i in range(1, v.dim + 1):
        assert chech.tau_act(v[i], (i + 1) // 2) == ctx.coeff(w.part(i).to_h())


@pytest.mark.parametrize("n", range(1, 5))
def test_anisotropic_pfister_has_nonzero_power_classes(n):
    v = chech.u_pfister(CONTEXTS[n - 1])
    assert any(v[2 ** r] for r in range(n + 1))
    assert any(v[2 ** r - 1] for r in range(1, n + 1))


@pytest.mark.parametrize("n", [2, 4])
def test_scaling_formula_matches_bo_automorphism(n):
    ctx = CONTEXTS[0] if n == 2 else CONTEXTS[1]
    v = chech.u_pfister(ctx)
    for lam in (C, D, C * D):
        scaled = chech.scale_uclasses(v, lam)
        for i in range(1, n + 1):
            assert scaled[i] == chech.evaluate(bo.scale_auto(bo.u_class(i, n), lam), [v])


def test_scaling_needs_even_dimension():
    ctx = CONTEXTS[0]
    with pytest.raises(OddDimension):
        chech.scale_uclasses(chech.one_dim_vector(ctx), C)


@pytest.mark.parametrize("slots", [(C,), (C, D), (MODEL.one(), C, D)])
def test_sum_formula_matches_bo_restriction(slots):
    ctx = ctx_of(A, B)
    base = chech.u_pfister(ctx)
    vs = [chech.scale_uclasses(base, b) for b in slots]
    acc = vs[0]
    for w in vs[1:]:
        total = chech.sum_uclasses(acc, w)
        n = acc.dim + w.dim
        for r in range(1, n + 1):
            y = bo.corestrict_sum(bo.u_class(r, n), acc.dim, w.dim)
            assert total[r] == chech.evaluate(y, [acc, w])
        acc = total


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("t", range(1, 6))
def test_arason_agreement(n, t):
    units = [A, B, C, D][:n]
    ctx = ctx_of(*units)
    for slots in itertools.islice(itertools.combinations([MODEL.one(), E, F, A * E, E * F, B * F], t), 6):
        v = chech.u_alpha_divisible(ctx, list(slots))
        q = witt.tensor(witt.pfister(units, 6), witt.QForm(tuple(slots), 6))
        assert chech.arason_from_u(ctx, v) == witt.e_invariant(q, n)


def test_arason_needs_image():
    ctx = ctx_of(A, B)
    v = chech.UClassVector(ctx, (ctx.one(), ctx.zero(), ctx.zero(), ctx.gamma()))
    with pytest.raises(NotInImage):
        chech.arason_from_u(ctx, v)


# -- J bounds and the vanishing region ---------------------------------------------

@pytest.mark.parametrize("n", range(1, 6))
def test_j_min_of_pfister(n):
    assert chech.j_min(chech.u_pfister(CONTEXTS[n - 1])) == 2 ** (n - 1) - 1


def test_ideal_membership():
    ctx = ctx_of(A, B)
    mu = ctx.mu()
    assert chech.ideal_contains(mu * mu, [mu])
    assert not chech.ideal_contains(mu, [ctx.gamma()])
    assert chech.ideal_contains(ctx.zero(), [])


@pytest.mark.parametrize("n", range(2, 6))
def test_model_ring_avoids_vanishing_region(n):
    ctx = CONTEXTS[n - 1]
    for term in chech.positive_basis(ctx, 4, 4):
        b, a = ctx.term_bidegree(term)
        assert not chech.region_car(n, a, b)
    b, a = ctx.mu().bidegree()
    assert Fraction(b, a) == 2 + Fraction(1, 2 ** (n - 1) - 1)


def test_region_golden():
    assert chech.region_car(3, 2, 5)
    assert not chech.region_car(3, 3, 7)
    assert chech.region_car(3, 3, 8)
    assert chech.region_car(2, 0, 1)
    assert chech.region_car(3, 3, 3, reduced=True)
    assert not chech.region_car(3, 3, 3)
    with pytest.raises(PreconditionError):
        chech.region_car(1, 1, 1)


# -- text ----------------------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 5))
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_model_element_round_trip(n, data):
    ctx = CONTEXTS[n - 1]
    x = data.draw(elements(ctx))
    assert parse_model_element(x.render(), ctx) == x


def test_render_golden():
    ctx = ctx_of(A, B, C)
    x = ctx.basis(2, 0b01, 0b110000) + ctx.basis(1, 0b11)
    assert x.render() == "mu^2 + mu^2*Q[0](g)*{e,f}"
    assert ctx_of(A).basis(2).render() == "g^3"
