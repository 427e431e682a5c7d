"""Seifert's algorithm on a diagram, by way of a braided diagram.

The diagram is first brought to braided form with Vogel moves (a
Reidemeister II move between two edges that bound a common face, belong to
different Seifert circles and run the same way around that face).  When no
such face remains the Seifert circles are coherent and concentric, and a
closed braid word can be read off.  The Seifert surface of a closed braid
is a stack of disks joined by one half-twisted band per letter, and its
Seifert matrix has a simple combinatorial description.
"""
from __future__ import annotations

from collections import defaultdict, deque
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .linkdiag import DiagramError, OrientedDiagram, _diagram_pieces, assemble, edge_faces, require_valid

BraidWord = List[Tuple[int, int]]     # (generator index i >= 1, sign +-1)


def smoothing_successor(d: OrientedDiagram) -> Dict[int, int]:
    """Oriented smoothing: incoming under continues as outgoing over and vice versa."""
    nxt = {}
    for x, o in zip(d.crossings, d.over_in):
        nxt[x[0]] = x[4 - o]
        nxt[x[o]] = x[2]
    return nxt


def seifert_circles(d: OrientedDiagram) -> List[List[int]]:
    nxt = smoothing_successor(d)
    seen = set()
    out = []
    for e in sorted(nxt):
        if e in seen:
            continue
        circ = [e]
        seen.add(e)
        f = nxt[e]
        while f != e:
            circ.append(f)
            seen.add(f)
            f = nxt[f]
        out.append(circ)
    return out


def _circle_of(circles: Sequence[Sequence[int]]) -> Dict[int, int]:
    return {e: k for k, c in enumerate(circles) for e in c}


def _defect(d: OrientedDiagram):
    """A face with two same-way edges on different Seifert circles, or None."""
    circ = _circle_of(seifert_circles(d))
    left, right, fs = edge_faces(d)
    by_face: Dict[Tuple[int, str], List[int]] = defaultdict(list)
    for e, f in left.items():
        by_face[(f, "L")].append(e)
    for e, f in right.items():
        by_face[(f, "R")].append(e)
    for key in sorted(by_face):
        es = by_face[key]
        first = es[0]
        for e in es[1:]:
            if circ[e] != circ[first]:
                return key[1], first, e
    return None


def vogel_move(d: OrientedDiagram, side: str, e1: int, e2: int) -> OrientedDiagram:
    """Push edge e1 over edge e2 across their common face (two new crossings)."""
    pieces = {e: (("v", e, 0), ("v", e, 1), ("v", e, 2)) for e in (e1, e2)}
    raw = []
    for x, o in zip(d.crossings, d.over_in):
        heads = {0, o}
        ids = []
        for s, e in enumerate(x):
            if e in pieces:
                ids.append(pieces[e][2] if s in heads else pieces[e][0])
            else:
                ids.append(e)
        raw.append((tuple(ids), 0, o))
    a1, b1, c1 = pieces[e1]
    a2, b2, c2 = pieces[e2]
    if side == "L":
        raw.append(((b2, b1, c2, a1), 0, 3))
        raw.append(((a2, b1, b2, c1), 0, 1))
    else:
        raw.append(((b2, a1, c2, b1), 0, 1))
        raw.append(((a2, c1, b2, b1), 0, 3))
    seeds = [(name, comp[0] if comp[0] not in pieces else pieces[comp[0]][0])
             for name, comp in zip(d.names, d.components)]
    return assemble(raw, seeds, (), provenance=d.provenance)


def braided(d: OrientedDiagram, max_moves: int = 100000) -> OrientedDiagram:
    require_valid(d)
    for _ in range(max_moves):
        found = _defect(d)
        if found is None:
            return d
        d = vogel_move(d, *found)
    raise DiagramError("Vogel moves did not terminate")  # pragma: no cover


def braid_word(d: OrientedDiagram) -> Tuple[int, BraidWord]:
    """(strand count, word) of a connected diagram after Vogel moves."""
    if d.n_crossings == 0:
        if d.n_components != 1:
            raise DiagramError("a crossingless diagram of several components is disconnected")
        return 1, []
    if _diagram_pieces(d) != 1 or any(not any(e in x for x in d.crossings for e in c) for c in d.components):
        raise DiagramError("diagram is disconnected; present split links as separate diagrams "
                           "and knots as connected sums")
    d = braided(d)
    circles = seifert_circles(d)
    circ = _circle_of(circles)
    n = len(circles)
    # circles adjacent through crossings form a path 0 - 1 - ... - n-1
    adj: Dict[int, set] = defaultdict(set)
    for x, o in zip(d.crossings, d.over_in):
        a, b = circ[x[0]], circ[x[o]]
        adj[a].add(b)
        adj[b].add(a)
    ends = [k for k in range(n) if len(adj[k]) == 1]
    if n > 1 and (len(ends) != 2 or any(len(adj[k]) > 2 for k in range(n))):
        raise DiagramError("Seifert circles are not concentric after Vogel moves")  # pragma: no cover
    level = {}
    k, prev = min(ends) if n > 1 else 0, None
    for i in range(n):
        level[k] = i
        nxt = [j for j in adj[k] if j != prev]
        prev, k = k, (nxt[0] if nxt else None)
    # a ray from inside circle 0 to the outside of circle n-1, crossing each circle once
    left, right, fs = edge_faces(d)
    by_level = sorted(range(n), key=lambda c: level[c])
    # the innermost face is bounded by circle 0 alone
    face_circles = [{circ[d.crossings[i][s]] for i, s in fs[f]} for f in range(len(fs))]
    cur = next((f for f in range(len(fs)) if face_circles[f] == {by_level[0]}), None)
    if cur is None:  # pragma: no cover
        raise DiagramError("no innermost face")
    cut: Dict[int, int] = {}
    for lv in range(n):
        c = by_level[lv]
        edges = [e for e in circles[c] if left.get(e) == cur or right.get(e) == cur]
        if not edges:  # pragma: no cover
            raise DiagramError("ray construction failed")
        e = min(edges)
        cut[c] = e
        cur = right[e] if left[e] == cur else left[e]
    # order of crossings along each circle, starting just after the cut edge
    at: Dict[int, int] = {}      # edge -> crossing where it ends
    for i, (x, o) in enumerate(zip(d.crossings, d.over_in)):
        at[x[0]] = i
        at[x[o]] = i
    preds: Dict[int, set] = defaultdict(set)
    for c in range(n):
        cyc = circles[c]
        j = cyc.index(cut[c])
        seq = [at[e] for e in cyc[j:] + cyc[:j]]
        for a, b in zip(seq, seq[1:]):
            preds[b].add(a)
    order = _toposort(range(d.n_crossings), preds)
    word = []
    for i in order:
        x, o = d.crossings[i], d.over_in[i]
        lo = min(level[circ[x[0]]], level[circ[x[o]]])
        word.append((lo + 1, d.sign(i)))
    return n, word


def _toposort(nodes, preds: Dict[int, set]) -> List[int]:
    indeg = {v: len(preds[v]) for v in nodes}
    succ: Dict[int, List[int]] = defaultdict(list)
    for v, ps in preds.items():
        for p in ps:
            succ[p].append(v)
    queue = deque(sorted(v for v in indeg if indeg[v] == 0))
    out = []
    while queue:
        v = queue.popleft()
        out.append(v)
        for w in sorted(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if len(out) != len(indeg):
        raise DiagramError("crossing order along the Seifert circles is cyclic")  # pragma: no cover
    return out


def braid_seifert_matrix(n: int, word: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Seifert matrix of the closure of a braid word, V[i, j] = lk(x_i, x_j^+).

    Generators of H_1 are the loops through two consecutive bands of the
    same generator.  Loops interact only when they share a band or run in
    adjacent columns with interleaved bands.
    """
    occ: Dict[int, List[int]] = defaultdict(list)
    for pos, (g, s) in enumerate(word):
        if not 1 <= g < n:
            raise ValueError(f"generator {g} out of range for {n} strands")
        occ[g].append(pos)
    loops = []
    for g in range(1, n):
        ps = occ[g]
        if not ps:
            raise DiagramError("braid closure is split")
        for a, b in zip(ps, ps[1:]):
            loops.append((g, a, b))
    sign = [s for _, s in word]
    m = len(loops)
    v = np.zeros((m, m), dtype=np.int64)
    for i, (g, a, b) in enumerate(loops):
        if sign[a] > 0 and sign[b] > 0:
            v[i, i] = -1
        elif sign[a] < 0 and sign[b] < 0:
            v[i, i] = 1
        for j, (h, c, e) in enumerate(loops):
            if i == j:
                continue
            if h == g and c == b:           # x_j follows x_i across band b
                if sign[b] > 0:
                    v[j, i] = 1
                else:
                    v[i, j] = -1
            elif h == g + 1:
                if a < c < b < e:
                    v[j, i] = -1
                elif c < a < e < b:
                    v[j, i] = 1
    return v


def seifert_from_diagram(d: OrientedDiagram) -> np.ndarray:
    if d.n_components != 1:
        raise DiagramError("the Seifert route takes knot diagrams")
    n, word = braid_word(d)
    return braid_seifert_matrix(n, word)
