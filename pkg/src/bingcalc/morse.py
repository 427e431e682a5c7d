"""Planar tangles built from Morse events: cups, caps and crossings.

Strands sit at integer positions on a horizontal line that sweeps upward.
Each position carries the id of the edge currently there, a direction
(+1 travelling up, -1 travelling down) and a component label.  Crossings are
emitted at slot level (counterclockwise edge list plus incoming slots) and
turned into PD codes by :func:`linkdiag.assemble`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .linkdiag import DiagramError, OrientedDiagram, UnionFind, assemble

_ids = itertools.count(1)

RawCrossing = Tuple[Tuple[Hashable, Hashable, Hashable, Hashable], int, int]


def fresh_id() -> Tuple[str, int]:
    return ("m", next(_ids))


@dataclass(frozen=True)
class CylinderTangle:
    """A tangle in a cylinder with ordered bottom and top endpoint rows.

    ``bottom_dirs[i] = +1`` means the strand enters the cylinder upward at
    bottom position i; ``top_dirs[i] = +1`` means it leaves upward at top
    position i.  ``seeds`` lists (label, edge id) for each component label in
    the order components should appear after closure.
    """
    crossings: Tuple[RawCrossing, ...]
    merges: Tuple[Tuple[Hashable, Hashable], ...]
    bottom: Tuple[Hashable, ...]
    top: Tuple[Hashable, ...]
    bottom_dirs: Tuple[int, ...]
    top_dirs: Tuple[int, ...]
    seeds: Tuple[Tuple[str, Hashable], ...]
    name: str = "tangle"
    meta: Dict[str, object] = field(default_factory=dict, compare=False, hash=False)

    @property
    def k(self) -> int:
        if len(self.bottom) != len(self.top):
            raise DiagramError("bottom and top rows differ in size")
        return len(self.bottom)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def _strand_roots(self) -> UnionFind:
        uf = UnionFind()
        for a, b in self.merges:
            uf.union(a, b)
        for ccw, ui, oi in self.crossings:
            uf.union(ccw[ui], ccw[(ui + 2) % 4])
            uf.union(ccw[oi], ccw[(oi + 2) % 4])
        return uf

    def endpoint_matching(self) -> Dict[Tuple[str, int], Tuple[str, int]]:
        """Which boundary endpoint each endpoint is joined to inside the tangle."""
        uf = self._strand_roots()
        groups: Dict[Hashable, List[Tuple[str, int]]] = {}
        for row, ids in (("bottom", self.bottom), ("top", self.top)):
            for i, e in enumerate(ids):
                groups.setdefault(uf.find(e), []).append((row, i))
        out = {}
        for g in groups.values():
            if len(g) != 2:
                raise DiagramError("tangle strand with a number of endpoints other than two")
            out[g[0]] = g[1]
            out[g[1]] = g[0]
        return out

    def strand_permutation(self) -> Dict[int, int]:
        """Bottom position -> top position for strands that traverse the cylinder."""
        m = self.endpoint_matching()
        return {i: j for (row, i), (row2, j) in m.items() if row == "bottom" and row2 == "top"}

    @property
    def winding_number(self) -> int:
        perm = self.strand_permutation()
        return sum(self.bottom_dirs[i] for i in perm)

    def relabel(self, mapping: Dict[str, str]) -> "CylinderTangle":
        return CylinderTangle(self.crossings, self.merges, self.bottom, self.top, self.bottom_dirs,
                              self.top_dirs, tuple((mapping.get(n, n), e) for n, e in self.seeds),
                              self.name, dict(self.meta))


class MorseBuilder:
    """Sweep-line construction of a CylinderTangle."""

    def __init__(self, dirs: Sequence[int] = (), labels: Optional[Sequence[str]] = None):
        self.pos: List[List] = []
        self.raw: List[RawCrossing] = []
        self.merges: List[Tuple[Hashable, Hashable]] = []
        self.seeds: Dict[str, Hashable] = {}
        labels = list(labels) if labels is not None else [f"s{i}" for i in range(len(dirs))]
        for d, lab in zip(dirs, labels):
            e = fresh_id()
            self.pos.append([e, int(d), lab])
            self.seeds.setdefault(lab, e)
        self.bottom = tuple(p[0] for p in self.pos)
        self.bottom_dirs = tuple(p[1] for p in self.pos)

    @property
    def width(self) -> int:
        return len(self.pos)

    def labels(self) -> List[str]:
        return [p[2] for p in self.pos]

    def cup(self, i: int, label: str, left_up: bool = True) -> "MorseBuilder":
        """New arc occupying positions i, i+1 (a local minimum)."""
        if not 0 <= i <= len(self.pos):
            raise DiagramError(f"cup position {i} out of range")
        e = fresh_id()
        d = 1 if left_up else -1
        self.pos[i:i] = [[e, d, label], [e, -d, label]]
        self.seeds.setdefault(label, e)
        return self

    def cap(self, i: int) -> "MorseBuilder":
        """Join positions i, i+1 (a local maximum)."""
        a, b = self.pos[i], self.pos[i + 1]
        if a[1] != -b[1]:
            raise DiagramError(f"cap at {i} joins strands with incompatible directions")
        if a[2] != b[2]:
            raise DiagramError(f"cap at {i} joins components {a[2]!r} and {b[2]!r}")
        self.merges.append((a[0], b[0]))
        del self.pos[i:i + 2]
        return self

    def cross(self, i: int, a_over: bool) -> "MorseBuilder":
        """Swap positions i and i+1.  Strand A runs SW->NE, strand B runs SE->NW."""
        a, b = self.pos[i], self.pos[i + 1]
        ne, nw = fresh_id(), fresh_id()
        ccw = (a[0], b[0], ne, nw)  # SW, SE, NE, NW
        a_in = 0 if a[1] > 0 else 2
        b_in = 1 if b[1] > 0 else 3
        if a_over:
            self.raw.append((ccw, b_in, a_in))
        else:
            self.raw.append((ccw, a_in, b_in))
        self.pos[i], self.pos[i + 1] = [nw, b[1], b[2]], [ne, a[1], a[2]]
        return self

    def sigma(self, i: int, s: int) -> "MorseBuilder":
        """Braid generator: s = +1 puts the strand coming from the left over."""
        for _ in range(abs(s)):
            self.cross(i, s > 0)
        return self

    def full_twists(self, n: int, lo: int = 0, hi: Optional[int] = None) -> "MorseBuilder":
        """n full twists (σ_lo ... σ_{hi-2})^(hi-lo) on positions lo..hi-1; sign of n picks handedness."""
        hi = len(self.pos) if hi is None else hi
        k = hi - lo
        for _ in range(abs(n)):
            for _ in range(k):
                for j in range(lo, hi - 1):
                    self.cross(j, n > 0)
        return self

    def finish(self, name: str = "tangle", order: Optional[Sequence[str]] = None) -> CylinderTangle:
        seeds = dict(self.seeds)
        names = list(order) if order is not None else list(seeds)
        return CylinderTangle(tuple(self.raw), tuple(self.merges), self.bottom, tuple(p[0] for p in self.pos),
                              self.bottom_dirs, tuple(p[1] for p in self.pos),
                              tuple((n, seeds[n]) for n in names), name)


def stack(lower: CylinderTangle, upper: CylinderTangle, name: Optional[str] = None) -> CylinderTangle:
    if len(lower.top) != len(upper.bottom):
        raise DiagramError("cannot stack tangles with different row sizes")
    if tuple(lower.top_dirs) != tuple(upper.bottom_dirs):
        raise DiagramError("stacked tangles disagree on strand directions")
    merges = lower.merges + upper.merges + tuple(zip(lower.top, upper.bottom))
    seeds = list(lower.seeds)
    have = {n for n, _ in seeds}
    seeds += [(n, e) for n, e in upper.seeds if n not in have]
    return CylinderTangle(lower.crossings + upper.crossings, merges, lower.bottom, upper.top,
                          lower.bottom_dirs, upper.top_dirs, tuple(seeds), name or f"{lower.name}*{upper.name}")


def identity_tangle(dirs: Sequence[int], labels: Optional[Sequence[str]] = None, name: str = "core") -> CylinderTangle:
    return MorseBuilder(dirs, labels).finish(name)


def twist_tangle(dirs: Sequence[int], n: int, labels: Optional[Sequence[str]] = None) -> CylinderTangle:
    b = MorseBuilder(dirs, labels)
    b.full_twists(n)
    return b.finish(f"twist{n}", order=[])


def close(t: CylinderTangle, order: Optional[Sequence[str]] = None, provenance=None) -> OrientedDiagram:
    """Closure in the solid torus: top position i is joined to bottom position i."""
    if tuple(t.top_dirs) != tuple(t.bottom_dirs):
        raise DiagramError("closure needs matching directions on the two rows")
    merge_uf = UnionFind()
    for a, b in t.merges + tuple(zip(t.top, t.bottom)):
        merge_uf.union(a, b)
    ids = {e for ccw, _, _ in t.crossings for e in ccw} | set(t.bottom) | set(t.top)
    ids |= {e for pair in t.merges for e in pair}
    merge = {e: merge_uf.find(e) for e in ids}
    seeds = list(t.seeds)
    if order is not None:
        lookup = dict(seeds)
        seeds = [(n, lookup[n]) for n in order]
    return assemble(t.crossings, seeds, (), merge=merge, provenance=provenance)


def plat(builder_steps, labels_order=None) -> OrientedDiagram:
    """Convenience: run ``builder_steps(b)`` on an empty builder and close it."""
    b = MorseBuilder()
    builder_steps(b)
    if b.width:
        raise DiagramError("plat construction left open strands")
    return close(b.finish(), order=labels_order)
