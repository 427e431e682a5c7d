"""Oriented planar link diagrams stored as PD codes.

A crossing is a 4-tuple of edge ids listed counterclockwise, starting at the
incoming under-strand.  ``over_in`` records which slot (1 or 3) the over-strand
enters through; a crossing with ``over_in == 3`` is positive.  Components with
no crossings ("free loops") are allowed and are represented by a single edge id
that appears in no crossing.
"""
from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .laurent import LaurentPoly

Crossing = Tuple[int, int, int, int]

MAX_BRACKET_CROSSINGS = 24


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class OrientedDiagram:
    crossings: Tuple[Crossing, ...]
    over_in: Tuple[int, ...]
    components: Tuple[Tuple[int, ...], ...]
    names: Tuple[str, ...]
    provenance: Optional[Dict[str, Any]] = field(default=None, compare=False, hash=False)

    # ----- basic queries -------------------------------------------------
    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_components(self) -> int:
        return len(self.components)

    def edges(self) -> List[int]:
        return [e for comp in self.components for e in comp]

    def sign(self, i: int) -> int:
        return 1 if self.over_in[i] == 3 else -1

    def signs(self) -> List[int]:
        return [1 if o == 3 else -1 for o in self.over_in]

    def component_of_edge(self) -> Dict[int, int]:
        return {e: ci for ci, comp in enumerate(self.components) for e in comp}

    def index(self, comp) -> int:
        """Resolve a component given by name or 0-based index."""
        if isinstance(comp, (int, np.integer)):
            if not 0 <= comp < len(self.components):
                raise DiagramError(f"no component with index {comp}")
            return int(comp)
        try:
            return self.names.index(comp)
        except ValueError:
            raise DiagramError(f"no component named {comp!r}") from None

    def strands(self, i: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """((under_in, under_out), (over_in, over_out)) edge ids of crossing i."""
        x = self.crossings[i]
        o = self.over_in[i]
        return (x[0], x[2]), (x[o], x[4 - o])

    def successor(self) -> Dict[int, int]:
        succ: Dict[int, int] = {}
        for comp in self.components:
            for k, e in enumerate(comp):
                succ[e] = comp[(k + 1) % len(comp)]
        return succ

    def with_provenance(self, prov: Optional[Dict[str, Any]]) -> "OrientedDiagram":
        return replace(self, provenance=prov)

    def with_names(self, names: Sequence[str]) -> "OrientedDiagram":
        if len(names) != len(self.components):
            raise DiagramError("name count does not match component count")
        return replace(self, names=tuple(names))

    # ----- serialisation -------------------------------------------------
    def to_json(self) -> Dict[str, Any]:
        succ = self.successor()
        data: Dict[str, Any] = {
            "crossings": [list(x) for x in self.crossings],
            "orientations": {str(e): succ[e] for e in sorted(succ)},
            "components": [list(c) for c in self.components],
            "names": list(self.names),
        }
        if self.provenance is not None:
            data["provenance"] = self.provenance
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "OrientedDiagram":
        crossings = [tuple(int(v) for v in x) for x in data["crossings"]]
        if "components" in data:
            comps = [tuple(int(e) for e in c) for c in data["components"]]
        else:
            comps = None
        succ = None
        if "orientations" in data:
            succ = {int(k): int(v) for k, v in data["orientations"].items()}
        names = data.get("names")
        d = from_pd(crossings, components=comps, successor=succ, names=names)
        return d.with_provenance(data.get("provenance"))

    def __str__(self):
        return f"OrientedDiagram({self.n_crossings} crossings, components={list(self.names)})"


# ---------------------------------------------------------------------------
# construction from raw PD data
# ---------------------------------------------------------------------------

def _occurrences(crossings: Sequence[Crossing]) -> Dict[int, List[Tuple[int, int]]]:
    occ: Dict[int, List[Tuple[int, int]]] = {}
    for i, x in enumerate(crossings):
        for s, e in enumerate(x):
            occ.setdefault(e, []).append((i, s))
    return occ


def _infer_over_in(crossings: Sequence[Crossing], successor: Optional[Dict[int, int]]) -> List[int]:
    """Work out which over slot is incoming, by propagating head/tail constraints."""
    occ = _occurrences(crossings)
    for e, o in occ.items():
        if len(o) != 2:
            raise DiagramError(f"edge {e} occurs {len(o)} times")
    # head[(i, s)] = True if the edge at slot s has its head at crossing i
    head: Dict[Tuple[int, int], bool] = {}
    for i in range(len(crossings)):
        head[(i, 0)] = True
        head[(i, 2)] = False
    over_in: List[Optional[int]] = [None] * len(crossings)

    def set_slot(i: int, s: int, is_head: bool, stack: list):
        if (i, s) in head:
            if head[(i, s)] != is_head:
                raise DiagramError(f"inconsistent orientation at crossing {i}")
            return
        head[(i, s)] = is_head
        stack.append((i, s))

    stack: List[Tuple[int, int]] = [(i, s) for i in range(len(crossings)) for s in (0, 2)]
    while True:
        while stack:
            i, s = stack.pop()
            e = crossings[i][s]
            a, b = occ[e]
            other = b if a == (i, s) else a
            set_slot(other[0], other[1], not head[(i, s)], stack)
            if s in (1, 3):
                set_slot(i, 4 - s, not head[(i, s)], stack)
        undecided = [i for i in range(len(crossings)) if (i, 1) not in head]
        if not undecided:
            break
        i = undecided[0]
        x = crossings[i]
        if successor is not None and successor.get(x[3]) == x[1] and successor.get(x[1]) != x[3]:
            choice = 3
        elif successor is not None and successor.get(x[1]) == x[3]:
            choice = 1
        else:
            choice = 3 if (x[3] + 1 == x[1]) else 1
        set_slot(i, choice, True, stack)
    for i in range(len(crossings)):
        over_in[i] = 1 if head[(i, 1)] else 3
    return over_in  # type: ignore[return-value]


def _trace(crossings: Sequence[Crossing], over_in: Sequence[int], start: int) -> List[int]:
    nxt = _next_edge_map(crossings, over_in)
    comp = [start]
    e = nxt[start]
    while e != start:
        comp.append(e)
        e = nxt[e]
        if len(comp) > 4 * len(crossings) + 2:
            raise DiagramError("component trace did not close")
    return comp


def _next_edge_map(crossings: Sequence[Crossing], over_in: Sequence[int]) -> Dict[int, int]:
    nxt: Dict[int, int] = {}
    for x, o in zip(crossings, over_in):
        nxt[x[0]] = x[2]
        nxt[x[o]] = x[4 - o]
    return nxt


def from_pd(
    crossings: Sequence[Sequence[int]],
    components: Optional[Sequence[Sequence[int]]] = None,
    successor: Optional[Dict[int, int]] = None,
    names: Optional[Sequence[str]] = None,
    over_in: Optional[Sequence[int]] = None,
    free_loops: Sequence[int] = (),
) -> OrientedDiagram:
    """Build a diagram from a PD code.

    Orientation comes from ``over_in`` if given, else from ``successor`` or the
    component edge order, else from the incoming-under convention plus the
    usual consecutive-numbering rule for over-only components.
    """
    xs = [tuple(int(v) for v in x) for x in crossings]
    if successor is None and components is not None:
        successor = {}
        for comp in components:
            for k, e in enumerate(comp):
                successor[int(e)] = int(comp[(k + 1) % len(comp)])
    if over_in is None:
        over_in = _infer_over_in(xs, successor)
    over_in = [int(o) for o in over_in]
    nxt = _next_edge_map(xs, over_in)
    if components is not None:
        comps = []
        for comp in components:
            comp = [int(e) for e in comp]
            if len(comp) == 1 and comp[0] not in nxt:
                comps.append(tuple(comp))
                continue
            traced = _trace(xs, over_in, comp[0])
            if successor is not None and sorted(traced) != sorted(comp):
                raise DiagramError(f"component {comp} is not a closed strand of the PD code")
            comps.append(tuple(traced))
    else:
        comps = []
        seen = set()
        for e in sorted(nxt):
            if e in seen:
                continue
            traced = _trace(xs, over_in, e)
            seen.update(traced)
            comps.append(tuple(traced))
        for e in free_loops:
            comps.append((int(e),))
    if names is None:
        names = [str(k + 1) for k in range(len(comps))]
    return OrientedDiagram(tuple(xs), tuple(over_in), tuple(comps), tuple(str(n) for n in names))


def crossing_from_slots(ccw: Sequence[int], under_in: int, over_in: int) -> Tuple[Crossing, int]:
    """Rotate a counterclockwise slot list so the incoming under edge comes first."""
    if (over_in - under_in) % 2 == 0:
        raise DiagramError("under and over strands must alternate around a crossing")
    rot = tuple(ccw[(under_in + k) % 4] for k in range(4))
    return rot, (over_in - under_in) % 4


def assemble(
    raw: Sequence[Tuple[Sequence[int], int, int]],
    seeds: Sequence[Tuple[str, int]],
    free: Sequence[Tuple[str, int]] = (),
    merge: Optional[Dict[int, int]] = None,
    provenance: Optional[Dict[str, Any]] = None,
) -> OrientedDiagram:
    """Assemble a diagram from slot-level crossings.

    ``raw`` holds (ccw edge list, incoming-under slot, incoming-over slot);
    ``merge`` identifies edge ids (union-find parent map, applied first);
    ``seeds`` name components by one of their edges, in the desired order.
    Edge ids are compacted to 1..n in traversal order.
    """
    find = _make_find(merge or {})
    xs: List[Crossing] = []
    ov: List[int] = []
    for ccw, ui, oi in raw:
        x, o = crossing_from_slots([find(e) for e in ccw], ui, oi)
        xs.append(x)
        ov.append(o)
    nxt = _next_edge_map(xs, ov)
    comps: List[List[int]] = []
    names: List[str] = []
    seen = set()
    items = [(n, find(e), False) for n, e in seeds] + [(n, find(e), True) for n, e in free]
    # keep seed order, which is the caller's component order
    for name, e, is_free in items:
        if e in seen:
            raise DiagramError(f"component seed {name!r} duplicates an earlier component")
        if e not in nxt:
            comp = [e]
        else:
            comp = _trace(xs, ov, e)
        seen.update(comp)
        comps.append(comp)
        names.append(name)
    missing = set(nxt) - seen
    if missing:
        raise DiagramError(f"edges not covered by component seeds: {sorted(missing)[:8]}")
    return _compact(xs, ov, comps, names, provenance)


def _make_find(parent: Dict[int, int]):
    parent = dict(parent)

    def find(e: int) -> int:
        root = e
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(e, e) != root:
            parent[e], e = root, parent[e]
        return root

    return find


class UnionFind:
    def __init__(self):
        self.parent: Dict[Any, Any] = {}

    def find(self, a):
        p = self.parent
        root = a
        while p.get(root, root) != root:
            root = p[root]
        while p.get(a, a) != root:
            p[a], a = root, p[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _compact(xs, ov, comps, names, provenance=None) -> OrientedDiagram:
    relabel: Dict[Any, int] = {}
    for comp in comps:
        for e in comp:
            if e not in relabel:
                relabel[e] = len(relabel) + 1
    new_x = tuple(tuple(relabel[e] for e in x) for x in xs)
    new_c = tuple(tuple(relabel[e] for e in c) for c in comps)
    return OrientedDiagram(new_x, tuple(ov), new_c, tuple(names), provenance)


def relabel_compact(d: OrientedDiagram) -> OrientedDiagram:
    return _compact(d.crossings, d.over_in, d.components, d.names, d.provenance)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    invariant: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...]
    warnings: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed


def validate(d: OrientedDiagram) -> ValidationReport:
    v: List[Violation] = []
    warn: List[str] = []
    occ = _occurrences(d.crossings)
    comp_edges = [e for c in d.components for e in c]
    comp_set = set(comp_edges)
    for e, o in sorted(occ.items()):
        if len(o) != 2:
            v.append(Violation("edge occurs exactly twice", f"edge {e} occurs {len(o)} time(s)"))
    for e in sorted(comp_set - set(occ)):
        comp = next(c for c in d.components if e in c)
        if len(comp) != 1:
            v.append(Violation("edge occurs exactly twice", f"edge {e} occurs 0 times"))
    if len(comp_edges) != len(comp_set):
        v.append(Violation("components pairwise disjoint", "an edge is listed in two components"))
    for e in sorted(set(occ) - comp_set):
        v.append(Violation("components cover all arcs", f"edge {e} is in no component"))
    if len(d.over_in) != len(d.crossings):
        v.append(Violation("sign function is total", "over_in length mismatch"))
    else:
        for i, o in enumerate(d.over_in):
            if o not in (1, 3):
                v.append(Violation("sign function is total", f"crossing {i} has over slot {o}"))
    if len(d.names) != len(d.components):
        v.append(Violation("component labels", "name count differs from component count"))
    if not v:
        # orientation consistency: each edge has exactly one successor and the
        # component lists follow it
        heads: Dict[int, int] = {}
        tails: Dict[int, int] = {}
        for i, (x, o) in enumerate(zip(d.crossings, d.over_in)):
            for s_in, s_out in ((0, 2), (o, 4 - o)):
                heads[x[s_in]] = heads.get(x[s_in], 0) + 1
                tails[x[s_out]] = tails.get(x[s_out], 0) + 1
        for e in occ:
            if heads.get(e, 0) != 1 or tails.get(e, 0) != 1:
                v.append(Violation("orientations consistent", f"edge {e} has {heads.get(e, 0)} heads and {tails.get(e, 0)} tails"))
        if not v:
            nxt = _next_edge_map(d.crossings, d.over_in)
            for comp in d.components:
                if len(comp) == 1 and comp[0] not in nxt:
                    continue
                for k, e in enumerate(comp):
                    if nxt.get(e) != comp[(k + 1) % len(comp)]:
                        v.append(Violation("orientations consistent", f"edge {e} is not followed by {comp[(k + 1) % len(comp)]}"))
                        break
    if not v and d.crossings:
        try:
            f = len(faces(d))
            pieces = _diagram_pieces(d)
            chi = len(d.crossings) - 2 * len(d.crossings) + f
            if chi != 2 * pieces:
                warn.append(f"Euler count V-E+F = {chi}, expected {2 * pieces}: PD code may not be planar")
        except DiagramError as exc:  # pragma: no cover - defensive
            warn.append(f"face tracing failed: {exc}")
    return ValidationReport(tuple(v), tuple(warn))


def require_valid(d: OrientedDiagram) -> None:
    rep = validate(d)
    if not rep.passed:
        raise DiagramError("invalid diagram: " + "; ".join(f"{x.invariant}: {x.detail}" for x in rep.violations))


def _diagram_pieces(d: OrientedDiagram) -> int:
    uf = UnionFind()
    for i, x in enumerate(d.crossings):
        for e in x:
            uf.union(("x", i), ("e", e))
    return len({uf.find(("x", i)) for i in range(len(d.crossings))})


# ---------------------------------------------------------------------------
# faces
# ---------------------------------------------------------------------------

def _other_end(occ, e, at):
    a, b = occ[e]
    return b if a == at else a


def faces(d: OrientedDiagram) -> List[List[Tuple[int, int]]]:
    """Faces as cycles of darts (crossing, slot): leave the crossing through ``slot``
    with the face on the left."""
    occ = _occurrences(d.crossings)
    seen = set()
    out = []
    for i in range(len(d.crossings)):
        for s in range(4):
            if (i, s) in seen:
                continue
            face = []
            dart = (i, s)
            while dart not in seen:
                seen.add(dart)
                face.append(dart)
                e = d.crossings[dart[0]][dart[1]]
                j, t = _other_end(occ, e, dart)
                dart = (j, (t - 1) % 4)
            out.append(face)
    return out


def edge_faces(d: OrientedDiagram) -> Tuple[Dict[int, int], Dict[int, int], List[List[Tuple[int, int]]]]:
    """Map each crossing edge to the index of its left and right face."""
    fs = faces(d)
    left: Dict[int, int] = {}
    right: Dict[int, int] = {}
    for fi, face in enumerate(fs):
        for (i, s) in face:
            e = d.crossings[i][s]
            o = d.over_in[i]
            outgoing = s == 2 or s == 4 - o
            if outgoing:
                left[e] = fi
            else:
                right[e] = fi
    return left, right, fs


# ---------------------------------------------------------------------------
# combinatorial invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkingMatrix:
    names: Tuple[str, ...]
    matrix: np.ndarray = field(compare=False)

    def __eq__(self, other):
        return isinstance(other, LinkingMatrix) and np.array_equal(self.matrix, other.matrix)

    def off_diagonal(self) -> np.ndarray:
        m = self.matrix.copy()
        np.fill_diagonal(m, 0)
        return m

    def tolist(self):
        return self.matrix.tolist()


def linking_matrix(d: OrientedDiagram) -> LinkingMatrix:
    require_valid(d)
    cmap = d.component_of_edge()
    n = d.n_components
    twice = np.zeros((n, n), dtype=np.int64)
    for i, x in enumerate(d.crossings):
        (ui, _), (oi, _) = d.strands(i)
        a, b = cmap[ui], cmap[oi]
        s = d.sign(i)
        if a == b:
            twice[a, a] += 2 * s
        else:
            twice[a, b] += s
            twice[b, a] += s
    if np.any(twice % 2):
        raise DiagramError("odd signed crossing count between two components")
    return LinkingMatrix(d.names, twice // 2)


def writhe(d: OrientedDiagram, comp=None) -> int:
    if comp is None:
        return int(sum(d.signs()))
    c = d.index(comp)
    edges = set(d.components[c])
    w = 0
    for i, x in enumerate(d.crossings):
        (ui, _), (oi, _) = d.strands(i)
        if ui in edges and oi in edges:
            w += d.sign(i)
    return w


# ---------------------------------------------------------------------------
# diagram surgery
# ---------------------------------------------------------------------------

def _keep_indices(d: OrientedDiagram, keep: Iterable) -> List[int]:
    idx = sorted({d.index(k) for k in keep})
    if not idx:
        raise DiagramError("sublink needs a nonempty set of components")
    return idx


def sublink(d: OrientedDiagram, keep: Iterable, record: bool = True) -> OrientedDiagram:
    """Delete the components not in ``keep`` and smooth the crossings they touched."""
    keep_idx = _keep_indices(d, keep)
    cmap = d.component_of_edge()
    kept = set(keep_idx)
    uf = UnionFind()
    raw = []
    for i, x in enumerate(d.crossings):
        (ui, uo), (oi, oo) = d.strands(i)
        ku, ko = cmap[ui] in kept, cmap[oi] in kept
        if ku and ko:
            raw.append((x, 0, d.over_in[i]))
        elif ku:
            uf.union(ui, uo)
        elif ko:
            uf.union(oi, oo)
    seeds = []
    free = []
    for c in keep_idx:
        comp = d.components[c]
        rep = uf.find(comp[0])
        if all(uf.find(e) == rep for e in comp):
            free.append((d.names[c], comp[0]))
            seeds.append(None)
        else:
            seeds.append((d.names[c], comp[0]))
    find = uf.find
    parent = {e: find(e) for c in keep_idx for e in d.components[c]}
    # keep caller order: assemble handles seeds then free loops, so interleave manually
    prov = _child_provenance(d, {"op": "sublink", "keep": [d.names[c] for c in keep_idx]}) if record else d.provenance
    out = assemble(raw, [s for s in seeds if s is not None], free, merge=parent, provenance=prov)
    order = [d.names[c] for c in keep_idx]
    return reorder(out, order)


def reorder(d: OrientedDiagram, order: Sequence[str]) -> OrientedDiagram:
    idx = [d.names.index(n) for n in order]
    return replace(d, components=tuple(d.components[i] for i in idx), names=tuple(d.names[i] for i in idx))


def mirror(d: OrientedDiagram) -> OrientedDiagram:
    xs = []
    ov = []
    for x, o in zip(d.crossings, d.over_in):
        # the old over strand becomes the under strand
        nx, no = crossing_from_slots(x, o, 0)
        xs.append(nx)
        ov.append(no)
    return OrientedDiagram(tuple(xs), tuple(ov), d.components, d.names,
                           _child_provenance(d, {"op": "mirror"}))


def reverse(d: OrientedDiagram, comps: Optional[Iterable] = None) -> OrientedDiagram:
    """Reverse the orientation of the named components (all if ``comps`` is None)."""
    if comps is None:
        idx = set(range(d.n_components))
    else:
        idx = {d.index(c) for c in comps}
    flip = {e for c in idx for e in d.components[c]}
    xs = []
    ov = []
    for x, o in zip(d.crossings, d.over_in):
        ui = 2 if x[0] in flip else 0
        oi = (4 - o) if x[o] in flip else o
        nx, no = crossing_from_slots(x, ui, oi)
        xs.append(nx)
        ov.append(no)
    comps_new = tuple(
        (tuple([c[0]] + list(reversed(c[1:]))) if ci in idx else c) for ci, c in enumerate(d.components)
    )
    return OrientedDiagram(tuple(xs), tuple(ov), comps_new, d.names,
                           _child_provenance(d, {"op": "reverse", "components": [d.names[c] for c in sorted(idx)]}))


def _shift_edges(d: OrientedDiagram, offset: int) -> OrientedDiagram:
    return OrientedDiagram(
        tuple(tuple(e + offset for e in x) for x in d.crossings),
        d.over_in,
        tuple(tuple(e + offset for e in c) for c in d.components),
        d.names,
        d.provenance,
    )


def max_edge(d: OrientedDiagram) -> int:
    es = d.edges()
    return max(es) if es else 0


def disjoint_union(d1: OrientedDiagram, d2: OrientedDiagram, prefix: Tuple[str, str] = ("", "")) -> OrientedDiagram:
    d2s = _shift_edges(d2, max_edge(d1))
    names = tuple(prefix[0] + n for n in d1.names) + tuple(prefix[1] + n for n in d2.names)
    if len(set(names)) != len(names):
        names = tuple(f"{k + 1}" for k in range(len(names)))
    prov = {"op": "disjoint_union", "parents": [d1.provenance, d2.provenance]}
    cert = [names[k] for k, n in enumerate(d1.names) if n in certified_names(d1)]
    cert += [names[len(d1.names) + k] for k, n in enumerate(d2.names) if n in certified_names(d2)]
    prov["certified"] = cert
    return OrientedDiagram(d1.crossings + d2s.crossings, d1.over_in + d2s.over_in,
                           d1.components + d2s.components, names, prov)


def connected_sum(d1: OrientedDiagram, c1, d2: OrientedDiagram, c2, edge1: Optional[int] = None,
                  edge2: Optional[int] = None) -> OrientedDiagram:
    """Band component ``c1`` of ``d1`` to component ``c2`` of ``d2``.

    The result keeps the components of ``d1`` (the joined one in place and
    carrying its name) followed by the other components of ``d2``.
    """
    i1, i2 = d1.index(c1), d2.index(c2)
    d2s = _shift_edges(d2, max_edge(d1))
    e1 = d1.components[i1][0] if edge1 is None else edge1
    e2 = d2s.components[i2][0] if edge2 is None else edge2 + max_edge(d1)
    if e1 not in d1.components[i1] or e2 not in d2s.components[i2]:
        raise DiagramError("connected_sum edges must lie on the chosen components")
    xs = list(d1.crossings) + list(d2s.crossings)
    ov = list(d1.over_in) + list(d2s.over_in)
    free1 = len(d1.components[i1]) == 1 and not any(e1 in x for x in d1.crossings)
    free2 = len(d2s.components[i2]) == 1 and not any(e2 in x for x in d2s.crossings)
    # e1: X1 -> Y1, e2: X2 -> Y2 become X1 -> Y2 (named e1) and X2 -> Y1 (named e2)
    new_xs = []
    for x, o in zip(xs, ov):
        x = list(x)
        for s in range(4):
            is_head = s == 0 or s == o
            if x[s] == e1 and is_head:
                x[s] = e2
            elif x[s] == e2 and is_head:
                x[s] = e1
        new_xs.append(tuple(x))
    if free1 and free2:
        merge = {e2: e1}
    elif free1:
        merge = {e1: e2}
    elif free2:
        merge = {e2: e1}
    else:
        merge = {}
    raw = [(x, 0, o) for x, o in zip(new_xs, ov)]
    seeds = []
    free = []
    for k, (name, comp) in enumerate(zip(d1.names, d1.components)):
        e = e1 if k == i1 else comp[0]
        if k == i1:
            if free1 and free2:
                free.append((name, e1))
                continue
            seeds.append((name, e if not (free1 and not free2) else e2))
        elif len(comp) == 1 and not any(comp[0] in x for x in d1.crossings):
            free.append((name, comp[0]))
        else:
            seeds.append((name, comp[0]))
    for k, (name, comp) in enumerate(zip(d2s.names, d2s.components)):
        if k == i2:
            continue
        nm = name if name not in d1.names else f"{name}'"
        if len(comp) == 1 and not any(comp[0] in x for x in d2s.crossings):
            free.append((nm, comp[0]))
        else:
            seeds.append((nm, comp[0]))
    c1s, c2s = certified_names(d1), certified_names(d2)
    cert = [n for n in c1s if n != d1.names[i1]]
    if d1.names[i1] in c1s and d2.names[i2] in c2s:
        cert.append(d1.names[i1])
    cert += [(n if n not in d1.names else f"{n}'") for k, n in enumerate(d2.names) if k != i2 and n in c2s]
    prov = {"op": "connected_sum", "parents": [d1.provenance, d2.provenance], "certified": cert}
    out = assemble(raw, seeds, free, merge=merge, provenance=prov)
    order = [d1.names[k] for k in range(d1.n_components)] + [
        (n if n not in d1.names else f"{n}'") for k, n in enumerate(d2s.names) if k != i2
    ]
    return reorder(out, order)


def certified_names(d: OrientedDiagram) -> List[str]:
    """Components recorded by a constructor as unknotted (nearest record wins)."""
    p = d.provenance
    while isinstance(p, dict):
        if "certified" in p:
            return [n for n in p["certified"] if n in d.names]
        p = p.get("parent")
    return []


def with_certified(d: OrientedDiagram, names: Iterable[str]) -> OrientedDiagram:
    prov = dict(d.provenance or {})
    prov["certified"] = [n for n in names if n in d.names]
    return d.with_provenance(prov)


def _child_provenance(d: OrientedDiagram, record: Dict[str, Any]) -> Dict[str, Any]:
    rec = dict(record)
    if d.provenance is not None:
        rec["parent"] = d.provenance
    return rec


# ---------------------------------------------------------------------------
# Kauffman bracket / Jones polynomial
# ---------------------------------------------------------------------------

def _bracket_order(d: OrientedDiagram) -> List[int]:
    """Crossing order that keeps the open boundary small (greedy adjacency)."""
    n = d.n_crossings
    occ = _occurrences(d.crossings)
    nbrs = [set() for _ in range(n)]
    for e, o in occ.items():
        (i, _), (j, _) = o
        if i != j:
            nbrs[i].add(j)
            nbrs[j].add(i)
    order: List[int] = []
    placed = set()
    while len(order) < n:
        start = min(set(range(n)) - placed)
        frontier = {start}
        while frontier:
            # pick the crossing with most edges into the placed set
            best = max(frontier, key=lambda c: (len(nbrs[c] & placed), -c))
            frontier.discard(best)
            order.append(best)
            placed.add(best)
            frontier |= nbrs[best] - placed
    return order


def _join(mate: Dict[int, int], a: int, b: int) -> int:
    """Connect strand ends a and b; return the number of loops closed."""
    ea = mate.pop(a, None)
    eb = mate.pop(b, None)
    if ea is not None:
        mate.pop(ea, None)
    if eb is not None:
        mate.pop(eb, None)
    if ea is None and eb is None:
        if a == b:
            return 1
        mate[a], mate[b] = b, a
    elif ea is None:
        mate[a], mate[eb] = eb, a
    elif eb is None:
        mate[b], mate[ea] = ea, b
    elif ea == b:
        return 1
    else:
        mate[ea], mate[eb] = eb, ea
    return 0


def bracket_polynomial(d: OrientedDiagram, normalized: bool = True, cap: Optional[int] = None) -> LaurentPoly:
    """Writhe-normalised Kauffman bracket in the variable A.

    Returns f(A) = (-A^3)^(-w) <D> with <unknot> = 1; the Jones polynomial is
    f evaluated at A = t^(-1/4).  Diagrams above the crossing cap are refused.
    """
    import os
    from collections import defaultdict

    limit = cap if cap is not None else int(os.environ.get("MAX_BRACKET_CROSSINGS", MAX_BRACKET_CROSSINGS))
    if d.n_crossings > limit:
        raise DiagramError(f"bracket_polynomial refuses diagrams with more than {limit} crossings "
                           f"(got {d.n_crossings}); raise MAX_BRACKET_CROSSINGS to override")
    require_valid(d)
    A = LaurentPoly.t(1)
    Ainv = LaurentPoly.t(-1)
    delta = LaurentPoly({2: -1, -2: -1})
    powers = [LaurentPoly(1), delta, delta * delta]
    # a state is the pairing of open strand ends, each labelled by the edge id
    # whose far end is still unprocessed
    cur: Dict[frozenset, LaurentPoly] = {frozenset(): LaurentPoly(1)}
    for ci in _bracket_order(d):
        x = d.crossings[ci]
        nxt: Dict[frozenset, LaurentPoly] = defaultdict(LaurentPoly)
        for pairing, poly in cur.items():
            for weight, joins in ((A, ((x[0], x[1]), (x[2], x[3]))), (Ainv, ((x[0], x[3]), (x[1], x[2])))):
                mate: Dict[int, int] = {}
                for a, b in pairing:
                    mate[a], mate[b] = b, a
                loops = _join(mate, *joins[0]) + _join(mate, *joins[1])
                key = frozenset((a, b) for a, b in mate.items() if a < b)
                nxt[key] = nxt[key] + poly * weight * powers[loops]
        cur = {k: v for k, v in nxt.items() if not v.is_zero()}
    free = sum(1 for c in d.components if len(c) == 1 and not any(c[0] in x for x in d.crossings))
    if d.n_crossings:
        total = cur.get(frozenset(), LaurentPoly()).divmod_exact(delta)
        total = total * delta ** free
    else:
        total = delta ** (free - 1)
    if not normalized:
        return total
    w = writhe(d)
    return total * LaurentPoly({-3 * w: (-1) ** (w % 2)})


def jones_coefficients(d: OrientedDiagram) -> Dict[str, int]:
    """Jones polynomial as {exponent of t (as a string, may be half-integral): coefficient}."""
    f = bracket_polynomial(d)
    out: Dict[str, int] = {}
    for e, v in sorted(f.coeffs.items()):
        # A^e = t^(-e/4)
        out[str(Fraction(-e, 4))] = v
    return out


# ---------------------------------------------------------------------------
# simplification
# ---------------------------------------------------------------------------

def remove_crossings(d: OrientedDiagram, drop: Iterable[int]) -> OrientedDiagram:
    """Delete crossings, joining each strand's incoming and outgoing edges.

    Only an isotopy when the dropped set is a union of R1 curls and R2 bigons.
    """
    drop = set(drop)
    uf = UnionFind()
    raw = []
    for i, x in enumerate(d.crossings):
        if i in drop:
            (a, b), (c, e) = d.strands(i)
            uf.union(a, b)
            uf.union(c, e)
        else:
            raw.append((x, 0, d.over_in[i]))
    merge = {e: uf.find(e) for e in d.edges()}
    remaining = {e for i, x in enumerate(d.crossings) if i not in drop for e in x}
    return _rebuild(d, raw, merge, remaining, uf)


def _rebuild(d, raw, merge, remaining, uf) -> OrientedDiagram:
    seeds, free = [], []
    for name, comp in zip(d.names, d.components):
        alive = [e for e in comp if e in remaining]
        if alive:
            seeds.append((name, alive[0]))
        else:
            free.append((name, uf.find(comp[0])))
    out = assemble(raw, seeds, free, merge=merge, provenance=d.provenance)
    return reorder(out, list(d.names))


def _r1_sites(d: OrientedDiagram) -> List[int]:
    return [i for i, x in enumerate(d.crossings) if any(x[s] == x[(s + 1) % 4] for s in range(4))]


def _r2_sites(d: OrientedDiagram, blocked: set) -> List[Tuple[int, int]]:
    occ = _occurrences(d.crossings)
    out = []
    used = set(blocked)
    for face in faces(d):
        if len(face) != 2:
            continue
        (i, s), (j, t) = face
        if i == j or i in used or j in used:
            continue
        e = d.crossings[i][s]
        o = occ[e]
        # e runs between i and j; same parity of slot means same level at both ends
        if {o[0][0], o[1][0]} != {i, j}:
            continue
        if o[0][1] % 2 != o[1][1] % 2:
            continue
        out.append((i, j))
        used.update((i, j))
    return out


def simplify(d: OrientedDiagram, max_rounds: int = 10000) -> OrientedDiagram:
    """Greedily remove Reidemeister I curls and II bigons until none remain."""
    for _ in range(max_rounds):
        drop = set(_r1_sites(d))
        for i, j in _r2_sites(d, drop):
            drop.update((i, j))
        if not drop:
            return d
        d = remove_crossings(d, drop)
    return d
