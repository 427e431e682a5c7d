import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from bingcalc import algc
from bingcalc.algc import CapExceeded, JumpPointError, SeifertMatrix
from bingcalc.laurent import LaurentPoly

FIVE_TWO = SeifertMatrix([[-1, 1], [0, -2]])
TREFOIL_DELTA = LaurentPoly.from_list([1, -1, 1])


def dense_signature(a, turns):
    """Signatures of (1-ω)A + (1-ω̄)Aᵀ at many angles in one batched eigvalsh."""
    m = a.array.astype(complex)
    w = np.exp(2j * np.pi * np.asarray(turns))[:, None, None]
    h = (1 - w) * m + (1 - np.conj(w)) * m.T
    ev = np.linalg.eigvalsh(h)
    return (ev > 0).sum(axis=1) - (ev < 0).sum(axis=1)


def near_jump(sf, x, eps=1e-6):
    return any(abs(j.turn - x) < eps for j in sf.jumps)


@st.composite
def seifert_matrices(draw, sizes=(2, 4)):
    """B + J⁺ with B symmetric has A - Aᵀ = J; a unimodular change of basis keeps det(A - Aᵀ) = 1."""
    n = draw(st.sampled_from(sizes))
    vals = draw(st.lists(st.integers(-3, 3), min_size=n * n, max_size=n * n))
    b = np.array(vals, dtype=np.int64).reshape(n, n)
    a = np.triu(b) + np.triu(b, 1).T
    for k in range(0, n, 2):
        a[k, k + 1] += 1
    p = np.eye(n, dtype=np.int64)
    for i, j, s in draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(-2, 2)),
                                 max_size=3)):
        if i != j:
            e = np.eye(n, dtype=np.int64)
            e[i, j] = s
            p = p @ e
    return SeifertMatrix(p.T @ a @ p)


@st.composite
def metabolic_matrices(draw):
    """[[0, B], [C, D]] with B - Cᵀ unimodular; the first half of the basis is a metabolizer."""
    g = draw(st.sampled_from([1, 2]))
    ints = st.integers(-2, 2)
    b = np.array(draw(st.lists(ints, min_size=g * g, max_size=g * g)), dtype=np.int64).reshape(g, g)
    d = np.array(draw(st.lists(ints, min_size=g * g, max_size=g * g)), dtype=np.int64).reshape(g, g)
    u = np.eye(g, dtype=np.int64)
    if g == 2 and draw(st.booleans()):
        u = np.array([[1, draw(ints)], [0, 1]])
    c = (b - u).T
    return SeifertMatrix(np.block([[np.zeros((g, g), dtype=np.int64), b], [c, d]]))


def test_seifert_matrix_validation():
    with pytest.raises(ValueError, match="square"):
        SeifertMatrix([[1, 2], [3]])
    with pytest.raises(ValueError, match="even"):
        SeifertMatrix([[1]])
    with pytest.raises(ValueError, match="det"):
        SeifertMatrix([[1, 0], [0, 1]])
    a = SeifertMatrix.from_json({"matrix": [[-1, 1], [0, -1]]})
    assert a == algc.TREFOIL
    assert SeifertMatrix.from_json(a.to_json()) == a


def test_alexander_examples():
    assert algc.alexander(SeifertMatrix([[0, 1], [0, 0]])) == LaurentPoly(1)
    assert algc.alexander(algc.TREFOIL) == TREFOIL_DELTA
    assert algc.alexander(algc.FIGURE8) == LaurentPoly.from_list([1, -3, 1])
    both = algc.block_sum(algc.TREFOIL, algc.FIGURE8)
    assert algc.alexander(both) == (TREFOIL_DELTA * LaurentPoly.from_list([1, -3, 1])).canonical()
    assert algc.alexander(algc.METABOLIC_P2) == (algc.P_GENUS2 * algc.P_GENUS2).canonical()


def test_trefoil_signature_function():
    sf = algc.signature_function(algc.TREFOIL)
    assert [j.exact for j in sf.jumps] == [Fraction(1, 6), Fraction(5, 6)]
    assert sf.values == (0, -2, 0)
    assert algc.lt_signature(algc.TREFOIL, -1) == -2
    assert algc.lt_signature(algc.TREFOIL, 1) == 0
    with pytest.raises(JumpPointError):
        algc.lt_signature(algc.TREFOIL, complex(math.cos(math.pi / 3), math.sin(math.pi / 3)))
    with pytest.raises(JumpPointError):
        sf.value_at(Fraction(5, 6))
    with pytest.raises(ValueError):
        algc.lt_signature(algc.TREFOIL, 2)


def test_trefoil_step_function_dense_oracle():
    sf = algc.signature_function(algc.TREFOIL)
    turns = (np.arange(10 ** 4) + 0.5) / 10 ** 4
    got = dense_signature(algc.TREFOIL, turns)
    for x, v in zip(turns, got):
        if not near_jump(sf, x):
            assert sf.value_at(x) == v


def test_non_cyclotomic_roots():
    # 2t^2 - 3t + 2 has roots e^{±iθ} with cos θ = 3/4
    sf = algc.signature_function(FIVE_TWO)
    theta = math.acos(0.75) / (2 * math.pi)
    assert [j.exact for j in sf.jumps] == [None, None]
    assert sf.jumps[0].turn == pytest.approx(theta, abs=1e-12)
    assert sf.values == (0, -2, 0)
    r = algc.rho0(FIVE_TWO)
    assert not r.exact
    assert r.value == pytest.approx(-2 * (1 - 2 * theta), abs=1e-11)


def test_rho0_examples():
    assert algc.rho0(algc.TREFOIL).value == Fraction(-4, 3)
    assert algc.rho0(algc.TREFOIL).exact
    assert algc.rho0(algc.FIGURE8).value == 0
    assert algc.rho0(algc.block_sum(algc.TREFOIL, algc.TREFOIL)).value == Fraction(-8, 3)
    assert algc.rho0(algc.TREFOIL, exact=False).value == pytest.approx(-4 / 3, abs=1e-11)


def test_cable_pullback_examples():
    s = algc.signature_function(algc.TREFOIL)
    assert algc.cable_pullback(s, 1) == s
    two = algc.cable_pullback(s, 2)
    assert [j.exact for j in two.jumps] == [Fraction(k, 12) for k in (1, 5, 7, 11)]
    assert two.values == (0, -2, 0, -2, 0)
    for c in (0, -1):
        with pytest.raises(ValueError):
            algc.cable_pullback(s, c)
    with pytest.raises(TypeError):
        algc.cable_pullback(s, 1.5)


def test_reverse_and_mirror():
    for a in (algc.TREFOIL, FIVE_TWO, algc.METABOLIC_P2):
        assert algc.signature_function(algc.reverse(a)) == algc.signature_function(a)
        m = algc.signature_function(algc.mirror(a))
        assert m.values == tuple(-v for v in algc.signature_function(a).values)


def test_fox_milnor_examples():
    assert algc.fox_milnor_witness(algc.P_GENUS2 * algc.P_GENUS2).witness == algc.P_GENUS2
    t = algc.fox_milnor_witness(TREFOIL_DELTA)
    assert not t.found and "square" in t.reason
    assert algc.fox_milnor_witness(LaurentPoly(1)).witness == LaurentPoly(1)
    assert not algc.fox_milnor_witness(LaurentPoly.from_list([1, -3, 1])).found
    with pytest.raises(ValueError):
        algc.fox_milnor_witness(LaurentPoly())


def test_fox_milnor_cap(monkeypatch):
    big = TREFOIL_DELTA ** 5
    with pytest.raises(CapExceeded, match="MAX_FM_DEGREE"):
        algc.fox_milnor_witness(big)
    monkeypatch.setenv("MAX_FM_DEGREE", "10")
    assert not algc.fox_milnor_witness(big).found
    with pytest.raises(CapExceeded):
        algc.fox_milnor_witness(algc.P_GENUS2 * algc.P_GENUS2, max_degree=2)


def test_metabolizer_examples():
    r = algc.metabolizer_witness(SeifertMatrix([[0, 1], [0, 0]]))
    assert r.status == "witness" and r.basis == ((1, 0),)
    r = algc.metabolizer_witness(algc.TREFOIL)
    assert r.status == "impossible" and "signature" in r.reason
    r = algc.metabolizer_witness(algc.FIGURE8)
    assert r.status == "impossible" and "Fox-Milnor" in r.reason
    r = algc.metabolizer_witness(algc.METABOLIC_P2)
    assert r.basis == ((1, 0, 0, 0), (0, 1, 0, 0))
    m = np.array(r.basis)
    assert not (m @ algc.METABOLIC_P2.array @ m.T).any()


def test_metabolizer_search_is_bounded(monkeypatch):
    p = np.array([[1, 3, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [5, 0, 2, 1]])
    b = SeifertMatrix(p.T @ algc.METABOLIC_P2.array @ p)
    assert algc.metabolizer_witness(b, bound=1).status == "inconclusive"
    monkeypatch.setenv("METAB_BOUND", "1")
    assert algc.metabolizer_witness(b).status == "inconclusive"
    monkeypatch.delenv("METAB_BOUND")
    r = algc.metabolizer_witness(b)
    assert r.status == "witness"
    m = np.array(r.basis)
    assert not (m @ b.array @ m.T).any()
    with pytest.raises(CapExceeded):
        algc.metabolizer_witness(algc.block_sum(*[algc.TREFOIL] * 5))


def test_eval_expression_examples():
    atoms = {"A": algc.TREFOIL}
    r = algc.eval_expression("3*i(1)[A] + 3*[A]", atoms)
    assert str(r.expression) == "6*[A]"
    assert r.value_at_minus_one == -12 and not r.vanishes
    r = algc.eval_expression("i(2)[A] + i(1)[A] + [A]", atoms)
    assert r.function.value_at(0.25) == -6
    assert algc.eval_expression("3*i(2)[A] + i(1)[A] + 3*[A]", {"A": algc.METABOLIC_P2}).vanishes
    assert algc.eval_expression("2*i(0)[A] + [A] - [A]", atoms).vanishes
    with pytest.raises(KeyError):
        algc.eval_expression("[B]", atoms)
    with pytest.raises(ValueError):
        algc.eval_expression("[A] [A]", atoms)


def test_main2_deduction():
    t = algc.main2_deduction(algc.TREFOIL, [1, 2])
    assert t.fires and t.fires_at == "relation c=1"
    assert t.steps[0].value_at_minus_one == -12
    m = algc.main2_deduction(algc.METABOLIC_P2, range(1, 4))
    assert not m.fires and m.fox_milnor.found and m.verdict == "obstruction silent"
    f = algc.main2_deduction(algc.FIGURE8, [1, 2])
    assert not f.fires and not f.fox_milnor.found
    assert "not algebraically slice" in f.verdict
    with pytest.raises(ValueError):
        algc.main2_deduction(algc.TREFOIL, [0])


def test_rho_equation_check():
    assert algc.rho_equation_check(Fraction(-4, 3)).status == "impossible"
    r = algc.rho_equation_check(Fraction(-4, 3), Fraction(4, 3))
    assert r.status == "satisfiable" and r.witness == (0, 1)
    assert algc.rho_equation_check(0).witness == (0, 0)
    # ε' = (1 + ε)·2/3 needs 3 | 1 + ε
    r = algc.rho_equation_check(2, -3)
    assert r.witness == (2, 2)
    assert algc.rho_equation_check(2, 3).status == "impossible"
    assert algc.rho_equation_check(1, -1, pairs=[(1, 1)]).status == "impossible"
    assert algc.rho_equation_check(1, -1, pairs=[(1, 1), (0, 1)]).witness == (0, 1)


def test_additive_invariant_rule():
    assert algc.additive_invariant_rule((2, -1)).fires
    assert not algc.additive_invariant_rule(0).fires
    assert algc.additive_invariant_rule([0, 0, 3]).phi == (0, 0, 3)


def test_obstruction_report():
    rep = algc.obstruction_report(algc.METABOLIC_P2)
    assert rep.algebraically_slice is True
    assert algc.obstruction_report(algc.TREFOIL).algebraically_slice is False
    f = algc.obstruction_report(algc.FIGURE8)
    assert f.signature_vanishes.holds and f.rho0_zero.holds and f.algebraically_slice is False


def test_export_text():
    text = algc.signature_function(algc.TREFOIL).export_text()
    assert text.splitlines() == ["# turn value", "0.0 0", "0.16666666666666666 -2", "0.8333333333333334 0", "1.0 0"]
    assert algc.SignatureFunction.zero().export_text() == "# turn value\n0.0 0\n1.0 0\n"


@settings(max_examples=60)
@given(seifert_matrices())
def test_signature_properties(a):
    delta = algc.alexander(a)
    assert abs(delta(1)) == 1
    sf = algc.signature_function(a)
    assert all(v % 2 == 0 for v in sf.values)
    assert sf.values == tuple(reversed(sf.values))
    assert [j.turn for j in sf.jumps] == pytest.approx([1 - j.turn for j in reversed(sf.jumps)], abs=1e-12)
    assert all(abs(v) <= a.n for v in sf.values)
    for j in sf.jumps:
        assert abs(delta(complex(math.cos(2 * math.pi * j.turn), math.sin(2 * math.pi * j.turn)))) < 1e-6
    turns = (np.arange(400) + 0.37) / 400
    for x, v in zip(turns, dense_signature(a, turns)):
        if not near_jump(sf, x):
            assert sf.value_at(x) == v


@settings(max_examples=40)
@given(seifert_matrices(), seifert_matrices())
def test_rho0_additive_and_mirror(a, b):
    ra, rb = algc.rho0(a), algc.rho0(b)
    s = algc.rho0(algc.block_sum(a, b))
    if s.exact and ra.exact and rb.exact:
        assert s.value == ra.value + rb.value
    else:
        assert float(s) == pytest.approx(float(ra) + float(rb), abs=1e-9)
    assert algc.signature_function(algc.block_sum(a, algc.mirror(a))).is_zero()
    assert float(algc.rho0(algc.mirror(a))) == pytest.approx(-float(ra), abs=1e-12)


@settings(max_examples=30)
@given(seifert_matrices(), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_cable_pullback_pointwise(a, c, seed):
    sf = algc.signature_function(a)
    pulled = algc.cable_pullback(sf, c)
    rng = np.random.default_rng(seed)
    for x in rng.random(100):
        y = (c * x) % 1.0
        if near_jump(sf, y) or near_jump(pulled, x) or min(y, 1 - y) < 1e-6:
            continue
        assert pulled.value_at(x) == sf.value_at(y) == algc.hermitian_signature(a, y)


@settings(max_examples=40)
@given(metabolic_matrices())
def test_metabolic_matrices_pass_every_test(a):
    assume(algc.alexander(a).span <= algc.DEFAULT_FM_DEGREE)
    assert algc.signature_function(a).is_zero()
    assert algc.fox_milnor_witness(algc.alexander(a)).found
    r = algc.metabolizer_witness(a)
    assert r.status == "witness"
    m = np.array(r.basis)
    assert not (m @ a.array @ m.T).any()
