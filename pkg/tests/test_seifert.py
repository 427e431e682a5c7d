import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bingcalc import algc
from bingcalc.fox import alexander_from_diagram
from bingcalc.knots import figure8, hopf, trefoil, unknot
from bingcalc.laurent import LaurentPoly
from bingcalc.linkdiag import DiagramError, OrientedDiagram, disjoint_union, mirror, reverse, validate
from bingcalc.polymat import bareiss_det, signature
from bingcalc.seifert import braid_seifert_matrix, braid_word, braided, seifert_circles, seifert_from_diagram
from bingcalc.linkdiag import _diagram_pieces
from moves import braid_cycles, closed_braid, kink, random_plat, random_word

T = LaurentPoly.t(1)
TI = LaurentPoly.t(-1)


def burau_alexander(n, word):
    """Alexander polynomial of a braid closure knot: a principal minor of I - Burau."""
    m = [[LaurentPoly(int(i == j)) for j in range(n)] for i in range(n)]
    for g, s in word:
        i = g - 1
        b = [[LaurentPoly(int(r == c)) for c in range(n)] for r in range(n)]
        if s > 0:
            b[i][i], b[i][i + 1], b[i + 1][i], b[i + 1][i + 1] = 1 - T, T, LaurentPoly(1), LaurentPoly()
        else:
            b[i][i], b[i][i + 1], b[i + 1][i], b[i + 1][i + 1] = LaurentPoly(), LaurentPoly(1), TI, 1 - TI
        m = [[sum((m[r][k] * b[k][c] for k in range(n)), LaurentPoly()) for c in range(n)] for r in range(n)]
    minor = [[LaurentPoly(int(r == c)) - m[r][c] for c in range(1, n)] for r in range(1, n)]
    return (bareiss_det(minor) if n > 1 else LaurentPoly(1)).canonical()


def seifert_alex(v):
    return algc.alexander(algc.SeifertMatrix(v.tolist()))


def knot_braids(rng, count, max_n=4, max_len=10):
    out = []
    while len(out) < count:
        n = rng.randint(2, max_n)
        w = random_word(rng, n, rng.randint(n - 1, max_len))
        if len(set(braid_cycles(n, w))) == 1 and all(any(g == k for g, _ in w) for k in range(1, n)):
            out.append((n, w))
    return out


def test_burau_oracle_on_known_knots():
    assert burau_alexander(2, [(1, 1)] * 3) == LaurentPoly.from_list([1, -1, 1])
    assert burau_alexander(3, [(1, 1), (2, -1)] * 2) == LaurentPoly.from_list([1, -3, 1])
    assert burau_alexander(2, [(1, 1)] * 5) == LaurentPoly.from_list([1, -1, 1, -1, 1])
    assert burau_alexander(3, [(1, 1), (2, 1)] * 4) == LaurentPoly.from_list([1, -1, 0, 1, 0, -1, 1])


def test_braid_seifert_matrix_against_burau():
    for n, w in knot_braids(random.Random(11), 120):
        v = braid_seifert_matrix(n, w)
        assert round(np.linalg.det((v - v.T).astype(float))) == 1
        assert seifert_alex(v) == burau_alexander(n, w)


def test_torus_knot_signatures():
    # positive torus knots: T(2,k) has signature -(k-1); T(3,4) -6; T(3,5) -8
    for k in (3, 5, 7, 9):
        v = braid_seifert_matrix(2, [(1, 1)] * k)
        assert signature((v + v.T).tolist()) == -(k - 1)
    for q, sig in ((4, -6), (5, -8)):
        v = braid_seifert_matrix(3, [(1, 1), (2, 1)] * q)
        assert signature((v + v.T).tolist()) == sig


def test_fixture_knots_dual_route():
    for k, delta, sigma in ((trefoil(), [1, -1, 1], -2), (figure8(), [1, -3, 1], 0)):
        a = algc.seifert_from_diagram(k)
        assert algc.alexander(a) == LaurentPoly.from_list(delta)
        assert alexander_from_diagram(k).canonical() == LaurentPoly.from_list(delta)
        assert algc.lt_signature(a, -1) == sigma


def test_unknot_gives_empty_matrix():
    assert seifert_from_diagram(unknot()).shape == (0, 0)
    assert algc.seifert_from_diagram(unknot()).n == 0


def test_refusals():
    with pytest.raises(DiagramError, match="knot"):
        seifert_from_diagram(hopf())
    split = disjoint_union(trefoil(), trefoil(), prefix=("a", "b"))
    with pytest.raises(DiagramError):
        braid_word(split)


def test_braided_form_has_coherent_circles():
    d = braided(figure8())
    assert validate(d).passed
    n, word = braid_word(figure8())
    assert n == len(seifert_circles(d))
    assert {g for g, _ in word} == set(range(1, n))


@st.composite
def knot_diagrams(draw):
    n = draw(st.integers(2, 4))
    w = draw(st.lists(st.tuples(st.integers(1, n - 1), st.sampled_from([1, -1])), min_size=n - 1, max_size=9))
    if len(set(braid_cycles(n, w))) != 1 or any(all(g != k for g, _ in w) for k in range(1, n)):
        w = w + [(g, 1) for g in range(1, n)]
    d = closed_braid(n, w)
    if d.n_components != 1:
        d = closed_braid(2, [(1, 1)] * 3)
    kinks = draw(st.lists(st.tuples(st.integers(0, 40), st.booleans(), st.booleans()), max_size=2))
    for e, lr, fo in kinks:
        edges = d.edges()
        d = kink(d, edges[e % len(edges)], lr, fo)
    return d


@settings(max_examples=60)
@given(knot_diagrams())
def test_dual_route_alexander(d):
    assert algc.alexander(algc.seifert_from_diagram(d)) == alexander_from_diagram(d).canonical()


@settings(max_examples=40)
@given(knot_diagrams())
def test_seifert_signature_mirror_and_reverse(d):
    v = seifert_from_diagram(d)
    s = signature((v + v.T).tolist())
    vm = seifert_from_diagram(mirror(d))
    vr = seifert_from_diagram(reverse(d))
    assert signature((vm + vm.T).tolist()) == -s
    assert signature((vr + vr.T).tolist()) == s


def plat_knot(seed):
    rng = random.Random(seed)
    while True:
        try:
            d = random_plat(rng, rng.randint(2, 4), rng.randint(3, 12))
        except DiagramError:
            continue
        if d.n_components == 1 and d.n_crossings and _diagram_pieces(d) == 1:
            return d


@settings(max_examples=80)
@given(st.integers(0, 10 ** 6))
def test_dual_route_on_plats(seed):
    d = plat_knot(seed)
    assert validate(braided(d)).passed
    a = algc.seifert_from_diagram(d)
    assert algc.alexander(a) == alexander_from_diagram(d).canonical()
    # Δ(-1) is odd for a knot, so ω = -1 is never a jump
    assert algc.lt_signature(algc.seifert_from_diagram(mirror(d)), -1) == -algc.lt_signature(a, -1)
