"""Spanning disks of round unknotted components and cutting along them.

A component U is *round* in a diagram when it has no self-crossings and its
cyclic sequence of over/under passes switches at most twice.  Lifting the
over-run above the diagram and the under-run below it, U bounds an explicit
disk: the planar region R on one side of U, folded along an arc gamma in R
that joins the two switch points.  Other strands meet this disk exactly where
they cross gamma, so the certificate below records gamma's crossed edges.

Side A of the disk is the part next to U's over-run, side B the part next to
the under-run.  A crossed strand is "up" when it passes from side B to side A.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .linkdiag import DiagramError, OrientedDiagram, UnionFind, edge_faces, require_valid


class NotCertified(DiagramError):
    pass


@dataclass(frozen=True)
class DiskCertificate:
    component: str
    index: int
    crossed: Tuple[int, ...]          # edges met by gamma, in gamma order
    directions: Tuple[int, ...]       # +1 if the strand passes B -> A
    faces: Tuple[int, ...]            # face indices visited by gamma
    r_on_left: bool                   # R lies on U's left
    switches: int

    @property
    def strands(self) -> int:
        return len(self.crossed)

    def to_json(self):
        return {"component": self.component, "strands": self.strands,
                "crossed_edges": list(self.crossed), "directions": list(self.directions),
                "switches": self.switches}


def crossing_sequence(d: OrientedDiagram, comp: int) -> List[Tuple[int, str]]:
    """(crossing index, 'O' or 'U') in order along the component."""
    head: Dict[int, Tuple[int, str]] = {}
    for i, x in enumerate(d.crossings):
        o = d.over_in[i]
        head[x[0]] = (i, "U")
        head[x[o]] = (i, "O")
    return [head[e] for e in d.components[comp] if e in head]


def is_round(d: OrientedDiagram, comp) -> bool:
    try:
        _round_data(d, d.index(comp))
        return True
    except NotCertified:
        return False


def _round_data(d: OrientedDiagram, c: int):
    seq = crossing_sequence(d, c)
    crossings = [i for i, _ in seq]
    if len(set(crossings)) != len(crossings):
        raise NotCertified(f"component {d.names[c]!r} crosses itself")
    kinds = [k for _, k in seq]
    n = len(kinds)
    switches = sum(1 for j in range(n) if kinds[j] != kinds[j - 1]) if n else 0
    if switches > 2:
        raise NotCertified(f"component {d.names[c]!r} has {switches} over/under switches")
    return seq, switches


def certify(d: OrientedDiagram, comp) -> DiskCertificate:
    """Build the spanning-disk certificate of a round component, or raise NotCertified."""
    require_valid(d)
    c = d.index(comp)
    seq, switches = _round_data(d, c)
    name = d.names[c]
    if switches == 0:
        return DiskCertificate(name, c, (), (), (), True, 0)
    u_edges = list(d.components[c])
    u_set = set(u_edges)
    left, right, fs = edge_faces(d)
    # region R on U's left, flood-filled without crossing U
    start = left[u_edges[0]]
    region = {start}
    queue = deque([start])
    adj: Dict[int, List[Tuple[int, int]]] = {}
    for e in left:
        adj.setdefault(left[e], []).append((right[e], e))
        adj.setdefault(right[e], []).append((left[e], e))
    while queue:
        f = queue.popleft()
        for g, e in adj.get(f, []):
            if e in u_set or g in region:
                continue
            region.add(g)
            queue.append(g)
    if any(right[e] in region for e in u_edges):
        raise NotCertified(f"component {name!r} does not separate the plane as a simple curve")
    # switch edges: the U-edge entering the first over-crossing of the over-run (s_start)
    # and the U-edge leaving its last one (s_end)
    head_kind = {}
    for i, x in enumerate(d.crossings):
        o = d.over_in[i]
        if x[0] in u_set:
            head_kind[x[0]] = "U"
        if x[o] in u_set:
            head_kind[x[o]] = "O"
    tail_kind = {}
    for i, x in enumerate(d.crossings):
        o = d.over_in[i]
        if x[2] in u_set:
            tail_kind[x[2]] = "U"
        if x[4 - o] in u_set:
            tail_kind[x[4 - o]] = "O"
    s_start = [e for e in u_edges if tail_kind.get(e) == "U" and head_kind.get(e) == "O"]
    s_end = [e for e in u_edges if tail_kind.get(e) == "O" and head_kind.get(e) == "U"]
    if len(s_start) != 1 or len(s_end) != 1:  # pragma: no cover - excluded by the switch count
        raise NotCertified("could not locate the switch points")
    f_from, f_to = left[s_end[0]], left[s_start[0]]
    path = _bfs(f_from, f_to, adj, region, u_set)
    crossed = []
    dirs = []
    for (f, g, e) in path:
        crossed.append(e)
        # gamma runs from s_end to s_start with side A on its left
        dirs.append(1 if (left[e] == f and right[e] == g) else -1)
    faces_visited = (f_from,) + tuple(g for _, g, _ in path)
    return DiskCertificate(name, c, tuple(crossed), tuple(dirs), faces_visited, True, switches)


def _bfs(src: int, dst: int, adj, region, u_set) -> List[Tuple[int, int, int]]:
    prev: Dict[int, Optional[Tuple[int, int]]] = {src: None}
    queue = deque([src])
    while queue:
        f = queue.popleft()
        if f == dst:
            break
        for g, e in sorted(adj.get(f, []), key=lambda t: (t[1], t[0])):
            if e in u_set or g not in region or g in prev:
                continue
            prev[g] = (f, e)
            queue.append(g)
    if dst not in prev:  # pragma: no cover - R is connected
        raise NotCertified("no fold arc inside the spanning region")
    path = []
    g = dst
    while prev[g] is not None:
        f, e = prev[g]
        path.append((f, g, e))
        g = f
    path.reverse()
    return path


# ---------------------------------------------------------------------------
# cutting
# ---------------------------------------------------------------------------

@dataclass
class CutDiagram:
    """Slot-level data of D minus U, with each gamma-crossed edge split in two.

    ``a_half[j]`` / ``b_half[j]`` are the ids of the pieces of crossed edge j
    lying on side A / side B; the piece ids appear in ``raw`` and ``merge``.
    """
    raw: List[Tuple[Tuple[Hashable, ...], int, int]]
    merge: Dict[Hashable, Hashable]
    a_half: List[Hashable]
    b_half: List[Hashable]
    directions: List[int]
    seeds: List[Tuple[str, Hashable]]   # other components, by a surviving edge id
    cert: DiskCertificate


def cut_along(d: OrientedDiagram, cert: DiskCertificate, remove_u: bool = True) -> CutDiagram:
    c = cert.index
    u_set = set(d.components[c])
    crossed = {e: j for j, e in enumerate(cert.crossed)}
    # which end of a crossed edge is on side A: the head iff the strand goes up
    def half(e, at_head: bool):
        if e not in crossed:
            return e
        up = cert.directions[crossed[e]] > 0
        return ("A", e) if at_head == up else ("B", e)

    uf = UnionFind()
    raw = []
    for i, x in enumerate(d.crossings):
        o = d.over_in[i]
        heads = {0, o}
        ids = tuple(half(x[s], s in heads) for s in range(4))
        under_u, over_u = x[0] in u_set, x[o] in u_set
        if remove_u and (under_u or over_u):
            if under_u and over_u:  # pragma: no cover - round components have no self-crossings
                raise DiagramError("self-crossing on a certified component")
            if under_u:
                uf.union(ids[o], ids[4 - o])
            else:
                uf.union(ids[0], ids[2])
            continue
        raw.append((ids, 0, o))
    a_half = [("A", e) for e in cert.crossed]
    b_half = [("B", e) for e in cert.crossed]
    all_ids = {v for ids, _, _ in raw for v in ids} | set(a_half) | set(b_half)
    for e in d.edges():
        if e not in crossed:
            all_ids.add(e)
    merge = {v: uf.find(v) for v in all_ids}
    seeds = []
    for k, (name, comp) in enumerate(zip(d.names, d.components)):
        if k == c and remove_u:
            continue
        e = comp[0]
        seeds.append((name, half(e, True) if e in crossed else e))
    return CutDiagram(raw, merge, a_half, b_half, list(cert.directions), seeds, cert)
