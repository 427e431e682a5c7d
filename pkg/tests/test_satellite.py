import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bingcalc.disk import NotCertified, certify, cut_along, is_round
from bingcalc.fox import alexander_from_diagram
from bingcalc.knots import figure8, hopf, trefoil, unknot
from bingcalc.laurent import LaurentPoly
from bingcalc.linkdiag import (DiagramError, OrientedDiagram, UnionFind, assemble, bracket_polynomial,
                               certified_names, jones_coefficients, linking_matrix, sublink, validate, writhe)
from bingcalc.satellite import (ConstructionTree, apply_pattern, bd_template, bing_double, bing_double_n,
                                bing_double_n_infected, bing_pattern, core_pattern, infect, parallel_copies,
                                pattern_by_name)
from moves import braid_cycles, closed_braid, kink, random_word

ONE = LaurentPoly(1)
TREFOIL_DELTA = LaurentPoly.from_list([1, -1, 1])
UNLINK2 = OrientedDiagram((), (), ((1,), (2,)), ("a", "b"))


def alex(d, name):
    return alexander_from_diagram(sublink(d, [name], record=False)).canonical()


def invariants(d):
    return (d.n_components, linking_matrix(d).off_diagonal().tolist(), [alex(d, n) for n in d.names])


def small_knots(count, seed=5):
    rng = random.Random(seed)
    out = [unknot(), trefoil(), figure8()]
    while len(out) < count:
        n = rng.randint(2, 3)
        w = random_word(rng, n, rng.randint(2, 5))
        if len(set(braid_cycles(n, w))) == 1 and all(any(g == k for g, _ in w) for k in range(1, n)):
            out.append(closed_braid(n, w).with_names(["K"]))
    return out


def test_bing_pattern_shape():
    p = bing_pattern()
    assert p.winding_number == 0
    assert p.k == 2
    assert p.n_crossings == 4
    assert p.meta["clasps"] == {"lower": 1, "upper": -1}
    assert pattern_by_name("bing").n_crossings == 4
    assert pattern_by_name("parallel:3").k == 3
    with pytest.raises(ValueError):
        pattern_by_name("nope")


def test_bing_of_unknot_is_unlink():
    bd = apply_pattern(unknot(), "K", bing_pattern())
    assert bracket_polynomial(bd) == bracket_polynomial(UNLINK2)
    assert not linking_matrix(bd).off_diagonal().any()
    assert bracket_polynomial(bing_double_n(unknot(), 1)) == bracket_polynomial(UNLINK2)


def test_clasp_signs_cancel():
    bd = bing_double_n(unknot(), 1)
    comp = bd.component_of_edge()
    mixed = [bd.sign(i) for i, x in enumerate(bd.crossings) if comp[x[0]] != comp[x[1]]]
    assert sorted(mixed) == [-1, -1, 1, 1]


def test_apply_pattern_trefoil():
    bd = apply_pattern(trefoil(), "K", bing_pattern())
    assert bd.n_components == 2
    assert [alex(bd, n) for n in bd.names] == [ONE, ONE]
    assert linking_matrix(bd).off_diagonal().tolist() == [[0, 0], [0, 0]]
    assert validate(bd).passed


def test_core_pattern_is_identity():
    for k in (trefoil(), figure8(), hopf()):
        out = apply_pattern(k, 0, core_pattern())
        assert invariants(out) == invariants(k)
        assert jones_coefficients(out) == jones_coefficients(k)


def test_bing_double_n_basics():
    t = trefoil()
    assert bing_double_n(t, 0) is t
    assert bing_double_n_infected(t, 0) is t
    d3 = bing_double_n_infected(t, 3)
    assert d3.n_components == 8
    assert not linking_matrix(d3).off_diagonal().any()
    with pytest.raises(DiagramError):
        bing_double_n(hopf(), 1)
    with pytest.raises(ValueError):
        bing_double_n(t, -1)


def test_every_component_certified_and_owned():
    for route in (bing_double_n, bing_double_n_infected):
        for n in (1, 2):
            d = route(trefoil(), n)
            assert sorted(certified_names(d)) == sorted(d.names)
            tree = ConstructionTree.of(d)
            assert all(tree.owner(name) is not None for name in d.names)


def test_randomized_constructions_validate():
    knots = small_knots(100)
    for i, k in enumerate(knots):
        d = bing_double_n(k, 1 + (i % 5 == 0))
        assert validate(d).passed
        assert d.n_components == 2 ** (1 + (i % 5 == 0))
        assert not linking_matrix(d).off_diagonal().any()


def test_infection_matches_pattern_route():
    for n in (1, 2):
        a = bing_double_n_infected(trefoil(), n)
        b = bing_double_n(trefoil(), n)
        assert sorted(a.names) == sorted(b.names)
        b = sublink(b, list(a.names), record=False)
        assert invariants(a) == invariants(b)
        assert alexander_from_diagram(a).canonical() == alexander_from_diagram(b).canonical()
    a, b = bing_double_n_infected(trefoil(), 1), bing_double_n(trefoil(), 1)
    assert a.n_crossings <= 24 and b.n_crossings <= 24
    assert jones_coefficients(a) == jones_coefficients(b)


def test_trivial_infection():
    t = bd_template(1)
    out = infect(t, "a", unknot())
    ref = sublink(t, [n for n in t.names if n != "a"], record=False)
    assert invariants(out) == invariants(ref)
    assert "a" not in out.names


def test_infection_preserves_structure():
    for n in (1, 2):
        t = bd_template(n)
        ref = sublink(t, [x for x in t.names if x != "a"], record=False)
        for j in (trefoil(), figure8()):
            out = infect(t, "a", j)
            assert out.n_components == ref.n_components
            assert linking_matrix(out).off_diagonal().tolist() == linking_matrix(ref).off_diagonal().tolist()


def test_infection_errors():
    h = hopf()
    with pytest.raises(DiagramError, match="linking number"):
        infect(h, "a", trefoil())
    bd = bing_double_n(trefoil(), 1)
    plain = bd.with_provenance(None)
    with pytest.raises(DiagramError, match="certified"):
        infect(plain, "K.2", trefoil())


def test_parallel_copies():
    t = trefoil()
    assert invariants(parallel_copies(t, "K", 1)) == invariants(t)
    two = parallel_copies(t, "K", 2)
    assert two.n_components == 2
    assert linking_matrix(two).off_diagonal().tolist() == [[0, 0], [0, 0]]
    assert [alex(two, n) for n in two.names] == [TREFOIL_DELTA, TREFOIL_DELTA]
    bd = bing_double_n_infected(t, 1)
    assert parallel_copies(bd, 0, 3).n_components == bd.n_components + 2
    with pytest.raises(ValueError):
        parallel_copies(t, "K", 0)


def test_writhe_compensation_with_kink():
    t = trefoil()
    for e in t.edges()[:3]:
        for lr in (False, True):
            for fo in (False, True):
                kinked = kink(t, e, lr, fo).with_names(["K"])
                assert writhe(kinked) != writhe(t)
                for p in (bing_pattern(), pattern_by_name("parallel:2")):
                    assert invariants(apply_pattern(kinked, "K", p)) == invariants(apply_pattern(t, "K", p))


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.sampled_from(["bing", "parallel:2", "core"]))
def test_pattern_linking_with_other_components(seed, pname):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    d = closed_braid(n, random_word(rng, n, rng.randint(1, 6)))
    comp = rng.randrange(d.n_components)
    before = linking_matrix(d).off_diagonal()
    p = pattern_by_name(pname)
    out = apply_pattern(d, comp, p)
    lm = linking_matrix(out).off_diagonal()
    created = [i for i, nm in enumerate(out.names) if nm.startswith(d.names[comp] + ".")]
    others = [i for i in range(out.n_components) if i not in created]
    old_others = [i for i in range(d.n_components) if i != comp]
    assert lm[np.ix_(others, others)].tolist() == before[np.ix_(old_others, old_others)].tolist()
    if pname == "bing":
        assert p.winding_number == 0
        assert not lm[np.ix_(created, others)].any()
    elif pname == "parallel:2":
        # each copy links the others as the companion did; the copies are unlinked
        for c in created:
            assert lm[c, others].tolist() == before[comp, old_others].tolist()
        assert not lm[np.ix_(created, created)].any()
    else:
        assert lm.tolist() == before.tolist()


def reclose(d, cert):
    """Close up the cut along the certificate's disk, without the certified component."""
    cut = cut_along(d, cert, remove_u=True)
    uf = UnionFind()
    for v, r in cut.merge.items():
        uf.union(v, r)
    for a, b in zip(cut.a_half, cut.b_half):
        uf.union(a, b)
    ids = set(cut.merge) | set(cut.a_half) | set(cut.b_half)
    return assemble(cut.raw, cut.seeds, (), merge={v: uf.find(v) for v in ids})


def test_disk_certificates_verify():
    for d in (hopf(), hopf(-1), bd_template(1), bd_template(2), bing_double_n(trefoil(), 2),
              bing_double_n_infected(trefoil(), 2)):
        lm = linking_matrix(d).tolist()
        cmap = d.component_of_edge()
        for name in d.names:
            if not is_round(d, name):
                continue
            cert = certify(d, name)
            rest = [x for x in d.names if x != name]
            assert invariants(reclose(d, cert)) == invariants(sublink(d, rest, record=False))
            through = {x: 0 for x in rest}
            for e, s in zip(cert.crossed, cert.directions):
                through[d.names[cmap[e]]] += s
            k = d.index(name)
            # strands pass B -> A against the linking orientation
            assert through == {x: -lm[k][d.index(x)] for x in rest}
            assert cert.strands == len(cert.crossed) >= sum(abs(v) for v in through.values())


def test_knotted_component_has_no_disk():
    with pytest.raises(NotCertified):
        certify(trefoil(), 0)


def test_infection_can_keep_alpha():
    for n in (1, 2):
        t = bd_template(n)
        for j in (trefoil(), figure8()):
            plain = infect(t, "a", j)
            kept = infect(t, "a", j, keep_alpha=True)
            assert validate(kept).passed
            assert "a" in certified_names(kept) and is_round(kept, "a")
            rest = sublink(kept, list(plain.names), record=False)
            assert invariants(rest) == invariants(plain)
            assert alexander_from_diagram(rest).canonical() == alexander_from_diagram(plain).canonical()
            assert not linking_matrix(kept).off_diagonal().any()
            assert invariants(reclose(kept, certify(kept, "a"))) == invariants(plain)
