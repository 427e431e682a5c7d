"""Alexander polynomial of a diagram by Fox calculus on the Wirtinger presentation.

All meridians are sent to t.  For a knot the result is Δ(t); for a link of
μ ≥ 2 components it is the first Wirtinger minor, which equals
(t - 1)·Δ(t, ..., t) up to units (so the Hopf link gives t - 1 and split
links give 0).  Results are canonical: lowest exponent 0, positive constant.
"""
from __future__ import annotations

from typing import Dict, List, Tuple

from .laurent import LaurentPoly
from .linkdiag import OrientedDiagram, UnionFind, require_valid
from .polymat import sparse_det_up_to_units

_ONE = LaurentPoly(1)
_T = LaurentPoly.t(1)


def wirtinger_arcs(d: OrientedDiagram) -> Tuple[Dict[int, int], int]:
    """Map each edge to its over-arc (generator) index; returns (map, count)."""
    uf = UnionFind()
    for i, x in enumerate(d.crossings):
        o = d.over_in[i]
        uf.union(x[o], x[4 - o])
    arc: Dict[int, int] = {}
    roots: Dict[int, int] = {}
    for e in d.edges():
        r = uf.find(e)
        if r not in roots:
            roots[r] = len(roots)
        arc[e] = roots[r]
    return arc, len(roots)


def fox_matrix(d: OrientedDiagram) -> Tuple[List[Dict[int, LaurentPoly]], int]:
    """Rows of the abelianised Fox Jacobian (one per crossing) and the generator count."""
    arc, g = wirtinger_arcs(d)
    rows = []
    for i, x in enumerate(d.crossings):
        o = d.over_in[i]
        k, a, b = arc[x[o]], arc[x[0]], arc[x[2]]
        if o == 3:
            entries = ((k, _ONE - _T), (a, _T), (b, -_ONE))
        else:
            entries = ((k, _T - _ONE), (a, _ONE), (b, -_T))
        row: Dict[int, LaurentPoly] = {}
        for c, v in entries:
            row[c] = row.get(c, LaurentPoly()) + v
        rows.append({c: v for c, v in row.items() if not v.is_zero()})
    return rows, g


def alexander_from_diagram(d: OrientedDiagram) -> LaurentPoly:
    require_valid(d)
    if d.n_crossings == 0:
        return _ONE if d.n_components == 1 else LaurentPoly()
    rows, g = fox_matrix(d)
    n = len(rows)
    if g - 1 > n:
        return LaurentPoly()
    drop_col = g - 1
    use = {r: {c: v for c, v in row.items() if c != drop_col} for r, row in enumerate(rows)}
    if g - 1 < n:
        # one Wirtinger relation is a consequence of the others
        use.pop(n - 1)
    if len(use) != g - 1:
        return LaurentPoly()
    return sparse_det_up_to_units(use)
