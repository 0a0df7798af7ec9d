import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qfi import witt
from qfi.errors import PreconditionError
from qfi.kfield import FieldModel, KElement, UnitMonomial, k_symbol

M = 4
MODEL = FieldModel.standard(M)


def units(m=M):
    return st.integers(0, (1 << m) - 1).map(lambda b: UnitMonomial(b, m))


def forms(m=M, max_dim=6):
    return st.lists(units(m), max_size=max_dim).map(lambda us: witt.QForm(tuple(us), m))


def in_power_forms(n, m=M):
    # sums of scaled n-fold Pfister forms lie in I^n
    pf = st.tuples(units(m), st.lists(units(m), min_size=n, max_size=n))
    return st.lists(pf, min_size=1, max_size=3).map(
        lambda parts: _sum_forms([witt.scale(lam, witt.pfister(slots, m)) for lam, slots in parts], m))


def _sum_forms(qs, m):
    out = witt.QForm((), m)
    for q in qs:
        out = witt.oplus(out, q)
    return out


@given(forms(), forms())
def test_witt_class_additive_and_multiplicative(q, r):
    assert witt.witt_class(witt.oplus(q, r)) == witt.witt_class(q) + witt.witt_class(r)
    assert witt.witt_class(witt.tensor(q, r)) == witt.witt_class(q) * witt.witt_class(r)


def test_membership_low_powers_exhaustive():
    for dim in range(7):
        for entries in itertools.combinations_with_replacement(range(1 << M), dim):
            q = witt.QForm(tuple(UnitMonomial(b, M) for b in entries), M)
            even = dim % 2 == 0
            assert witt.in_fundamental_power(q, 1) == even
            assert witt.in_fundamental_power(q, 2) == (even and witt.det_pm(q).is_one)


@pytest.mark.parametrize("n", range(0, 5))
def test_membership_matches_pfister_span(n):
    # every Witt class of a 3-generator model
    m = 3
    span = witt.pfister_span(n, m)
    for bits in range(1 << (1 << m)):
        q = witt.QForm(tuple(UnitMonomial(u, m) for u in range(1 << m) if bits >> u & 1), m)
        assert witt.in_fundamental_power(q, n) == witt.in_pfister_span(q, n, span)


@given(forms(max_dim=8), st.integers(0, 4))
@settings(max_examples=80)
def test_membership_matches_pfister_span_m4(q, n):
    assert witt.in_fundamental_power(q, n) == witt.in_pfister_span(q, n)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), in_power_forms(n), in_power_forms(n))))
@settings(max_examples=60)
def test_e_invariant_additive(args):
    n, q, r = args
    assert witt.e_invariant(witt.oplus(q, r), n) == witt.e_invariant(q, n) + witt.e_invariant(r, n)


@pytest.mark.parametrize("n", range(1, 5))
def test_e_of_pfister_is_pure_symbol(n):
    for slots in itertools.product(range(1, 1 << M), repeat=n):
        us = [UnitMonomial(b, M) for b in slots]
        assert witt.e_invariant(witt.pfister(us, M), n) == k_symbol(us)


def test_e_invariant_requires_membership():
    with pytest.raises(PreconditionError):
        witt.e_invariant(witt.QForm((MODEL.unit("a"),), M), 1)


def test_milnor_weight_one_vanishes_on_i2():
    for dim in range(0, 7, 2):
        for entries in itertools.combinations_with_replacement(range(1 << 3), dim):
            q = witt.QForm(tuple(UnitMonomial(b, 3) for b in entries), 3)
            if witt.in_fundamental_power(q, 2):
                assert not witt.milnor_total_w(q).part(1)


def test_milnor_total_w_golden():
    a, b = MODEL.unit("a"), MODEL.unit("b")
    w = witt.milnor_total_w(witt.QForm((a, b), M))
    assert MODEL.k_text(w) == "1 + {a} + {a,b} + {b}"


def test_levels_golden():
    a, b = MODEL.unit("a"), MODEL.unit("b")
    assert witt.level(witt.pfister([a, b], M)) == 2
    assert witt.level(witt.QForm((a, a), M)) == float("inf")
    assert witt.level(witt.QForm((a, b), M)) == 1
    assert witt.level(witt.QForm((a,), M)) == 0


def test_nil_coords_golden():
    a, b, c = (MODEL.unit(x) for x in "abc")
    q = witt.oplus(witt.pfister([a, b], M), witt.QForm((c,), M))
    nil = witt.to_nil_coords(witt.witt_class(q))
    assert nil.render(MODEL) == "1 + y_c + y_a*y_b"
    assert nil.valuation() == 0
    assert witt.to_nil_coords(witt.witt_class(witt.pfister([a, b, c], M))).valuation() == 3


@given(forms(max_dim=8))
def test_nil_valuation_is_level(q):
    assert witt.to_nil_coords(witt.witt_class(q)).valuation() == witt.level(q)


def test_split_form():
    q = witt.split_form(6, M)
    assert q.dim == 6 and not witt.witt_class(q)
    assert witt.e_invariant(q, 3) == KElement.zero()
