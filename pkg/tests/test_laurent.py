from hypothesis import given, strategies as st

from bingcalc.laurent import ONE, T, LaurentPoly

polys = st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=5).map(LaurentPoly)


def test_canonical_form():
    p = LaurentPoly({-2: 3, 1: -1})
    assert p.canonical().coeffs == {0: 3, 3: -1}
    assert (-(T ** 5) * LaurentPoly.from_list([1, -1, 1])).canonical() == LaurentPoly.from_list([1, -1, 1])


def test_format_and_evaluate():
    p = LaurentPoly.from_list([1, 2, 3])
    assert p.format() == "3*t^2 + 2*t + 1"
    assert p(2) == 17
    assert LaurentPoly().format() == "0"


def test_exact_division():
    a = LaurentPoly.from_list([1, -1, 1])
    b = LaurentPoly.from_list([3, -7, 3])
    assert (a * b).divmod_exact(b) == a


def test_substitute_power_and_conjugate():
    p = LaurentPoly.from_list([1, -1, 1])
    assert p.substitute_power(2) == LaurentPoly({0: 1, 2: -1, 4: 1})
    assert p.conjugate() == LaurentPoly({0: 1, -1: -1, -2: 1})
    assert p.same_as(p.conjugate())


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == LaurentPoly()
    assert a * ONE == a


@given(polys)
def test_canonicalization_idempotent(a):
    c = a.canonical()
    assert c.canonical() == c
    if not a.is_zero():
        assert c.min_exp == 0
        assert c.coeffs[0] > 0


@given(polys, st.integers(-3, 3), st.sampled_from([1, -1]))
def test_units_do_not_change_canonical_form(a, k, s):
    assert (a * LaurentPoly({k: s})).canonical() == a.canonical()


@given(polys)
def test_json_round_trip(a):
    assert LaurentPoly.from_json(a.to_json()) == a
