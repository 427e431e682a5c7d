import numpy as np
from hypothesis import given, settings, strategies as st

from bingcalc.laurent import LaurentPoly
from bingcalc.polymat import bareiss_det, inertia, modular_det, signature, sparse_det_up_to_units

small = st.integers(-3, 3)
polys = st.dictionaries(st.integers(-2, 2), small, max_size=3).map(LaurentPoly)


@st.composite
def symmetric(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    m = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            m[i, j] = m[j, i] = draw(st.integers(-4, 4))
    # sprinkle in rank deficiency
    if n >= 2 and draw(st.booleans()):
        m[-1] = m[0]
        m[:, -1] = m[:, 0]
        m[-1, -1] = m[0, 0]
    return m


def numpy_inertia(m):
    if m.size == 0:
        return 0, 0, 0
    ev = np.linalg.eigvalsh(m.astype(float))
    tol = 1e-9 * max(1.0, np.abs(ev).max())
    return int((ev > tol).sum()), int((ev < -tol).sum()), int((np.abs(ev) <= tol).sum())


@settings(max_examples=200)
@given(symmetric())
def test_inertia_matches_eigvalsh(m):
    assert inertia(m.tolist()) == numpy_inertia(m)
    p, q, _ = inertia(m.tolist())
    assert signature(m.tolist()) == p - q


def test_inertia_needs_two_by_two_pivots():
    # zero diagonal forces the 2x2 pivot path
    assert inertia([[0, 1], [1, 0]]) == (1, 1, 0)
    assert inertia([[0, 2, 0], [2, 0, 0], [0, 0, 0]]) == (1, 1, 1)
    assert inertia([]) == (0, 0, 0)


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(polys, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_and_modular_agree(m):
    assert bareiss_det(m) == modular_det(m)


def test_det_examples():
    t = LaurentPoly.t(1)
    one = LaurentPoly(1)
    m = [[one - t, t], [one, LaurentPoly()]]
    assert bareiss_det(m) == -t
    assert sparse_det_up_to_units({0: {0: one - t, 1: t}, 1: {0: one}}) == LaurentPoly(1)
    assert sparse_det_up_to_units({0: {0: one + t}, 1: {0: one}}).is_zero()
    assert bareiss_det([]) == one
