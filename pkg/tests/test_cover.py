import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bingcalc.cover import (BranchedCover, CalculusScript, Ledger, ScriptError, Sublink, advance, branched_cover,
                            lift_counts, parse_script, run_script, solvability_chain)
from bingcalc.disk import NotCertified, certify
from bingcalc.fox import alexander_from_diagram
from bingcalc.knots import hopf, trefoil, unknot
from bingcalc.laurent import LaurentPoly
from bingcalc.linkdiag import (disjoint_union, jones_coefficients, linking_matrix, sublink, validate,
                               with_certified)
from bingcalc.morse import MorseBuilder
from bingcalc.satellite import apply_pattern, bd_template, bing_double_n, bing_double_n_infected
from bingcalc.scenarios import fixture_script
from moves import braid_cycles, closed_braid, random_word

ONE = LaurentPoly(1)
TREFOIL_DELTA = LaurentPoly.from_list([1, -1, 1])


def alex(d, name):
    return alexander_from_diagram(sublink(d, [name], record=False)).canonical()


def braid_with_axis(n, word):
    """Closure of the braid together with its axis, the round component 'a'."""
    lab = braid_cycles(n, word)
    b = MorseBuilder([1] * n, [f"L{c}" for c in lab])
    for g, s in word:
        b.sigma(g - 1, s)
    return apply_pattern(hopf(1, names=("K", "a")), "K", b.finish("braid"))


def sheet_orbits(d, branch, n):
    """Brute-force lift count: walk each component, moving up a sheet at each disk crossing."""
    cert = certify(d, branch)
    step = dict(zip(cert.crossed, cert.directions))
    out = {}
    for k, (name, comp) in enumerate(zip(d.names, d.components)):
        if k == cert.index:
            continue
        shift = sum(step.get(e, 0) for e in comp)
        seen, orbits = set(), 0
        for s in range(n):
            if s in seen:
                continue
            orbits += 1
            while s not in seen:
                seen.add(s)
                s = (s + shift) % n
        out[name] = orbits
    return out


def test_split_unknot_lifts_to_p_copies():
    u = disjoint_union(unknot("U"), unknot("X"))
    u = with_certified(u, ["U", "X"])
    for p in (2, 3, 5):
        cov = branched_cover(u, "U", p)
        assert cov.n_components == p + 1
        assert all(alex(cov, n) == ONE for n in cov.names)


def test_cover_argument_errors():
    d = bing_double_n_infected(trefoil(), 1)
    with pytest.raises(ValueError, match="prime"):
        branched_cover(d, "K.2", 4)
    with pytest.raises(ValueError):
        branched_cover(d, "K.2", 2, a=0)
    with pytest.raises(NotCertified):
        branched_cover(d.with_provenance(None), "K.2", 2)


def test_bd_trefoil_double_cover_contains_ksum():
    d = bing_double_n_infected(trefoil(), 1)
    cov = branched_cover(d, "K.2", 2)
    assert validate(cov).passed
    knots = [n for n in cov.names if n != "K.2~"]
    assert TREFOIL_DELTA ** 2 in [alex(cov, n) for n in knots]


def test_lift_counts_match_brute_force():
    for d, branch in ((bing_double_n_infected(trefoil(), 1), "K.2"), (bd_template(2), "a"),
                      (bd_template(1), "a"), (hopf(), "a")):
        for p, a in ((2, 1), (3, 1), (2, 2), (5, 1)):
            n = p ** a
            oracle = sheet_orbits(d, branch, n)
            assert lift_counts(d, branch, n) == oracle
            if n <= 4 or d.n_crossings < 20:
                cov = branched_cover(d, branch, p, a)
                assert cov.n_components == 1 + sum(oracle.values())


def test_identity_braid_axis_cover():
    # the axis cover of the k-strand identity closure is again k strands plus the lift
    for k in (1, 2, 3):
        d = braid_with_axis(k, [])
        for p in (2, 3):
            cov = branched_cover(d, "a", p)
            assert cov.n_components == k + 1
            assert not linking_matrix(sublink(cov, cov.names[:k], record=False)).off_diagonal().any()


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_axis_cover_is_closure_of_power(seed, p):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    w = random_word(rng, n, rng.randint(1, 5))
    cov = branched_cover(braid_with_axis(n, w), "a", p)
    rest = sublink(cov, [x for x in cov.names if x != "a~"], record=False)
    ref = closed_braid(n, w * p)
    assert rest.n_components == ref.n_components == len(set(braid_cycles(n, w * p)))
    assert sorted(alex(rest, x).to_list() for x in rest.names) == sorted(alex(ref, x).to_list() for x in ref.names)
    assert alexander_from_diagram(rest).canonical() == alexander_from_diagram(ref).canonical()
    if ref.n_crossings <= 16:
        assert jones_coefficients(rest) == jones_coefficients(ref)


def test_run_script_empty():
    d = trefoil()
    out, ledger = run_script(d, CalculusScript())
    assert out == d
    assert ledger == Ledger(0)


def test_run_script_solvability():
    d = bing_double_n_infected(trefoil(), 2)
    script = fixture_script("bd2-to-bd-ksum")
    assert script.height == 2
    out, ledger = run_script(d, script, Ledger(0, "zp", Fraction(5, 2), Fraction(5, 2)))
    assert ledger.height == 2
    assert ledger.solvability == Fraction(1, 2)
    assert ledger.sliceness == "zp"
    assert out.n_components == 2
    assert [alex(out, n) for n in out.names] == [ONE, ONE]
    assert not linking_matrix(out).off_diagonal().any()
    _, low = run_script(d, script, Ledger(0, None, Fraction(1), Fraction(1)))
    assert low.solvability is None


def test_script_errors_carry_step_index():
    d = bing_double_n_infected(trefoil(), 1)
    bad = parse_script("prime=2\nbranch comp=K.2 p=2\nsublink keep=nope\n")
    with pytest.raises(ScriptError) as exc:
        run_script(d, bad)
    assert exc.value.step == 2
    with pytest.raises(ValueError, match="one prime"):
        parse_script("branch comp=1 p=2\nbranch comp=1 p=3\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_script("frobnicate x=1\n")
    with pytest.raises(ValueError, match="slice claim"):
        parse_script("assume slice=maybe\n")


def test_parse_and_dump_round_trip():
    text = "prime=2\nassume slice=zp\nassume solvable=2.5\nbranch comp=K.2 p=2 a=1\nsublink keep=1,3\n"
    s = parse_script(text)
    assert s.steps == (BranchedCover("K.2", 2, 1), Sublink((0, 2)))
    assert s.input_ledger() == Ledger(0, "zp", Fraction(5, 2), Fraction(5, 2))
    assert parse_script(s.dumps()) == s


def test_height_additivity_and_claim_monotone():
    d = bing_double_n_infected(trefoil(), 2)
    a = parse_script("prime=2\nbranch comp=K.2.2 p=2\n")
    b = parse_script("prime=2\nbranch comp=K.2.1~1 p=2\n")
    claims = Ledger(0, "rational", Fraction(4), Fraction(4))
    mid, la = run_script(d, a, claims)
    _, lb = run_script(mid, b, la)
    _, lab = run_script(d, a.then(b), claims)
    assert lb.height == la.height + b.height == lab.height == 2
    assert lb == lab
    assert lab.sliceness == claims.sliceness


def test_advance():
    assert advance(Ledger(1, None, Fraction(3), Fraction(3)), 2) == Ledger(3, None, Fraction(1), Fraction(3))
    assert advance(Ledger(0, None, Fraction(1, 2), Fraction(1, 2)), 1).solvability is None


def test_solvability_chain_examples():
    rep = solvability_chain(1, 2)
    assert rep.heights == (0, 2, 3)
    assert rep.conclusion_text() == "(1.5)-solvable"
    rep = solvability_chain(3, 5)
    assert rep.heights[-1] == 9
    assert rep.conclusion_text() == "(3.5)-solvable"
    one = solvability_chain(2, 1)
    assert one.heights == (1,)
    assert one.assumed == Fraction(7, 2) and one.conclusion == Fraction(5, 2)
    assert solvability_chain(Fraction(3, 2), 2).conclusion == 2
    for h, r in ((0, 2), (1, 0), (Fraction(5, 4), 2)):
        with pytest.raises(ValueError):
            solvability_chain(h, r)


@given(st.integers(2, 40).map(lambda k: Fraction(k, 2)), st.integers(1, 30))
def test_solvability_chain_arithmetic(h, r):
    rep = solvability_chain(h, r)
    assert rep.assumed == h + 2 * r - Fraction(1, 2)
    assert rep.conclusion == rep.assumed - (2 * r - 1) == h + Fraction(1, 2)
    if r >= 2:
        assert rep.heights == (2 * r - 4, 2 * r - 2, 2 * r - 1)
