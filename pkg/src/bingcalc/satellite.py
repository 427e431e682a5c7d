"""Satellites: Bing doubling, parallel copies and infection.

Cabling uses the blackboard grid model: a crossing whose under-strand is
cabled u times and over-strand o times becomes a u-by-o grid of crossings.
Copy 0 of a cabled strand is the leftmost copy relative to the strand's
orientation.  Blackboard framing is corrected to the 0-framing by inserting
-w full twists, where w is the companion's writhe.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

from .disk import DiskCertificate, certify, cut_along
from .linkdiag import (DiagramError, OrientedDiagram, UnionFind, assemble, certified_names,
                       reorder, require_valid, writhe)
from .knots import hopf
from .morse import CylinderTangle, MorseBuilder, identity_tangle, stack, twist_tangle

_tags = itertools.count(1)

# handedness of the compensating twist: a companion of writhe w gets
# TWIST_SIGN * w full twists (fixed by the zero-linking test on parallel copies)
TWIST_SIGN = -1


# ---------------------------------------------------------------------------
# patterns
# ---------------------------------------------------------------------------

def bing_pattern() -> CylinderTangle:
    """Two antiparallel strands capped into B1, with the loop B2 clasping both caps.

    The lower clasp is positive and the upper clasp negative, so the two
    components have linking number 0.  Each component is unknotted; B2 is drawn
    as a round loop while B1 follows the companion.
    """
    b = MorseBuilder([1, -1], ["1", "1"])
    b.cup(2, "2", left_up=True)
    b.cross(1, False)
    b.cross(0, True)
    b.cap(1)
    b.cup(1, "1", left_up=True)
    b.cross(2, False)
    b.cross(1, True)
    b.cap(0)
    t = b.finish("bing", order=["1", "2"])
    t.meta.update({"unknotted": ["1", "2"], "clasps": {"lower": +1, "upper": -1}})
    return t


def core_pattern() -> CylinderTangle:
    t = identity_tangle([1], ["1"], name="core")
    t.meta["unknotted"] = []
    return t


def parallel_pattern(m: int) -> CylinderTangle:
    if m < 1:
        raise ValueError("need at least one parallel copy")
    t = identity_tangle([1] * m, [str(i + 1) for i in range(m)], name=f"parallel:{m}")
    t.meta["unknotted"] = []
    return t


PATTERNS = {"bing": bing_pattern, "core": core_pattern}


def pattern_by_name(name: str) -> CylinderTangle:
    if name.startswith("parallel:"):
        return parallel_pattern(int(name.split(":", 1)[1]))
    try:
        return PATTERNS[name]()
    except KeyError:
        raise ValueError(f"unknown pattern {name!r}") from None


# ---------------------------------------------------------------------------
# grid cabling
# ---------------------------------------------------------------------------

@dataclass
class _Grid:
    raw: List[Tuple[Tuple[Hashable, ...], int, int]]
    tag: int
    cut: Dict[int, int]

    def tail(self, e: int, q: int) -> Hashable:
        return (self.tag, "c", e, q)

    def head(self, e: int, q: int) -> Hashable:
        return (self.tag, "x" if e in self.cut.values() else "c", e, q)


def _grid(d: OrientedDiagram, mult: Dict[int, Sequence[int]], cut: Dict[int, int]) -> _Grid:
    """Cable component c of d with len(mult[c]) copies (directions mult[c]).

    Edge ``cut[c]`` of each cabled component gets distinct ids at its two ends
    so a tangle can be spliced in.
    """
    tag = next(_tags)
    g = _Grid([], tag, cut)
    cmap = d.component_of_edge()
    for i, x in enumerate(d.crossings):
        o = d.over_in[i]
        east = o == 3
        du = tuple(mult.get(cmap[x[0]], (1,)))
        do = tuple(mult.get(cmap[x[o]], (1,)))
        mu, mo = len(du), len(do)
        V = [[None] * (mo + 1) for _ in range(mu)]
        for q in range(mu):
            V[q][0] = g.head(x[0], q)
            V[q][mo] = g.tail(x[2], q)
            for r in range(1, mo):
                V[q][r] = (tag, "g", i, "V", q, r)
        H = [[None] * (mu + 1) for _ in range(mo)]
        for j in range(mo):
            r = mo - 1 - j if east else j
            inc, out = g.head(x[o], j), g.tail(x[4 - o], j)
            if east:
                H[r][0], H[r][mu] = inc, out
            else:
                H[r][mu], H[r][0] = inc, out
            for c in range(1, mu):
                H[r][c] = (tag, "g", i, "H", r, c)
        for q in range(mu):
            for r in range(mo):
                j = mo - 1 - r if east else r
                ccw = (V[q][r], H[r][q + 1], V[q][r + 1], H[r][q])
                ui = 0 if du[q] > 0 else 2
                going_east = east if do[j] > 0 else not east
                g.raw.append((ccw, ui, 3 if going_east else 1))
    return g


def _has_crossings(d: OrientedDiagram, c: int) -> bool:
    edges = set(d.components[c])
    return any(e in edges for x in d.crossings for e in x)


def _merge_map(pairs, ids) -> Dict[Hashable, Hashable]:
    uf = UnionFind()
    for a, b in pairs:
        uf.union(a, b)
    return {v: uf.find(v) for v in ids}


def _ids_of(raw, extra=()) -> set:
    out = {v for ccw, _, _ in raw for v in ccw}
    out.update(extra)
    return out


def framing_twists(w: int) -> int:
    return TWIST_SIGN * w


def long_cable(j: OrientedDiagram, dirs: Sequence[int], zero_framed: bool = True) -> CylinderTangle:
    """The len(dirs)-strand cable of the long knot obtained by cutting J open."""
    if j.n_components != 1:
        raise DiagramError("infection needs a knot")
    k = len(dirs)
    twists = framing_twists(writhe(j)) if zero_framed else 0
    tw = twist_tangle(dirs, twists) if twists else identity_tangle(dirs)
    if not _has_crossings(j, 0):
        return tw
    e0 = j.components[0][0]
    g = _grid(j, {0: dirs}, {0: e0})
    # strands enter the grid at the head end of the cut edge and leave at its tail end
    body = CylinderTangle(tuple(g.raw), (), tuple(g.head(e0, q) for q in range(k)),
                          tuple(g.tail(e0, q) for q in range(k)), tuple(dirs), tuple(dirs), (), f"cable:{k}")
    return stack(tw, body, name=f"cable:{k}")


# ---------------------------------------------------------------------------
# satellite operations
# ---------------------------------------------------------------------------

def _record(d: OrientedDiagram, rec: Dict[str, Any], certified: Sequence[str]) -> Dict[str, Any]:
    rec = dict(rec)
    rec["certified"] = list(certified)
    if d.provenance is not None:
        rec["parent"] = d.provenance
    return rec


def apply_pattern(d: OrientedDiagram, comp, p: CylinderTangle, separator: str = ".") -> OrientedDiagram:
    """Replace a neighbourhood of ``comp`` by the 0-framed pattern ``p``."""
    require_valid(d)
    c = d.index(comp)
    name = d.names[c]
    dirs = tuple(p.bottom_dirs)
    if tuple(p.top_dirs) != dirs:
        raise DiagramError("pattern rows must carry matching directions")
    w = writhe(d, c)
    tw = framing_twists(w)
    pat = stack(twist_tangle(dirs, tw), p, name=p.name) if tw else p
    has = _has_crossings(d, c)
    e0 = d.components[c][0]
    g = _grid(d, {c: dirs}, {c: e0} if has else {})
    pairs = list(pat.merges)
    if has:
        pairs += [(pat.bottom[q], g.tail(e0, q)) for q in range(len(dirs))]
        pairs += [(pat.top[q], g.head(e0, q)) for q in range(len(dirs))]
    else:
        pairs += list(zip(pat.top, pat.bottom))
    raw = list(g.raw) + list(pat.crossings)
    ids = _ids_of(raw, [v for pr in pairs for v in pr])
    for k, comp_edges in enumerate(d.components):
        if k != c:
            ids.add(g.tail(comp_edges[0], 0))
    merge = _merge_map(pairs, ids)
    seeds = []
    order = []
    new_names = []
    for k, comp_edges in enumerate(d.components):
        if k == c:
            for lab, e in pat.seeds:
                nm = f"{name}{separator}{lab}"
                seeds.append((nm, e))
                order.append(nm)
                new_names.append(nm)
        else:
            seeds.append((d.names[k], g.tail(comp_edges[0], 0)))
            order.append(d.names[k])
    prior = [n for n in certified_names(d) if n != name]
    if p.name == "core" or p.name.startswith("parallel:"):
        # parallel copies of an unknot are unknots
        unk = {lab for lab, _ in p.seeds} if name in certified_names(d) else set()
    else:
        unk = set(p.meta.get("unknotted", []))
    created_cert = [f"{name}{separator}{lab}" for lab, _ in p.seeds if lab in unk]
    rec = _record(d, {"op": "apply_pattern", "companion": name, "pattern": p.name, "twists": tw,
                      "created": new_names}, prior + created_cert)
    out = assemble(raw, seeds, (), merge=merge, provenance=rec)
    return reorder(out, order)


def bing_double(d: OrientedDiagram, comp=None) -> OrientedDiagram:
    """BD of one component, or of every component when ``comp`` is None."""
    if comp is not None:
        return apply_pattern(d, comp, bing_pattern())
    out = d
    for name in list(d.names):
        out = apply_pattern(out, name, bing_pattern())
    return out


def bing_double_n(k: OrientedDiagram, n: int) -> OrientedDiagram:
    if k.n_components != 1:
        raise DiagramError("bing_double_n expects a knot")
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = k
    for level in range(n):
        out = bing_double(out)
        prov = dict(out.provenance or {})
        prov["bing_level"] = level + 1
        out = out.with_provenance(prov)
    return out


def rename(d: OrientedDiagram, mapping: Dict[str, str]) -> OrientedDiagram:
    """Rename components, carrying construction certificates along."""
    names = [mapping.get(n, n) for n in d.names]
    rec = _record(d, {"op": "rename", "mapping": dict(mapping)},
                  [mapping.get(n, n) for n in certified_names(d)])
    return d.with_names(names).with_provenance(rec)


def bd_template(n: int, alpha: str = "a") -> OrientedDiagram:
    """BD_n of the unknot together with a meridian curve alpha of its solid torus.

    BD_1 together with alpha is the Borromean rings, and the Borromean rings
    are symmetric in their components.  The drawing exploits this: alpha is
    taken to be the clasp of a Bing pair, and the hook of that pair and the
    Hopf partner are then Bing doubled n-1 more times.  In this drawing every
    clasp, alpha, and several lifted hooks come out round.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    h = hopf(+1, names=("X", "C"))
    if n == 0:
        return rename(h, {"X": "K", "C": alpha})
    out = bing_double(h, "X")
    out = rename(out, {"X.1": "K.1", "X.2": alpha, "C": "K.2"})
    for level in range(1, n):
        for name in list(out.names):
            if name != alpha:
                out = apply_pattern(out, name, bing_pattern())
    prov = dict(out.provenance or {})
    prov["bing_level"] = n
    prov["alpha"] = alpha
    return out.with_provenance(prov)


def bing_double_n_infected(k: OrientedDiagram, n: int) -> OrientedDiagram:
    """BD_n(K) as the image of the template under infection by K along alpha."""
    if k.n_components != 1:
        raise DiagramError("bing_double_n_infected expects a knot")
    if n == 0:
        return k
    t = bd_template(n)
    out = infect(t, "a", k)
    prov = dict(out.provenance or {})
    prov["bing_level"] = n
    return out.with_provenance(prov)


def parallel_copies(d: OrientedDiagram, comp, m: int) -> OrientedDiagram:
    if m < 1:
        raise ValueError("m must be a positive integer")
    return apply_pattern(d, comp, parallel_pattern(m))


def infect(d: OrientedDiagram, alpha, j: OrientedDiagram, keep_alpha: bool = False) -> OrientedDiagram:
    """Tie the strands through alpha's spanning disk into 0-framed parallel copies of J.

    alpha must be construction-certified and have linking number 0 with the
    rest of the link.  It is removed from the output unless ``keep_alpha``,
    in which case it still bounds a disk meeting each strand once.
    """
    require_valid(d)
    a = d.index(alpha)
    name = d.names[a]
    if name not in certified_names(d):
        raise DiagramError(f"component {name!r} is not construction-certified unknotted")
    cert = certify(d, a)
    cut = cut_along(d, cert, remove_u=not keep_alpha)
    lk = sum(cert.directions)
    if lk != 0:
        raise DiagramError(f"alpha has linking number {lk} with the rest of the link")
    dirs = tuple(cert.directions)
    pairs = list(cut.merge.items())
    raw = list(cut.raw)
    if dirs:
        t = long_cable(j, dirs)
        raw += list(t.crossings)
        pairs += list(t.merges)
        pairs += list(zip(t.bottom, cut.b_half)) + list(zip(t.top, cut.a_half))
    ids = _ids_of(raw, [v for pr in pairs for v in pr] + [e for _, e in cut.seeds])
    merge = _merge_map(pairs, ids)
    order = [n for n, _ in cut.seeds]
    rec = _record(d, {"op": "infect", "alpha": name, "strands": len(dirs),
                      "companion": (j.provenance or {}).get("name", "J")},
                  [n for n in certified_names(d) if keep_alpha or n != name])
    out = assemble(raw, cut.seeds, (), merge=merge, provenance=rec)
    return reorder(out, order)


# ---------------------------------------------------------------------------
# construction tree view
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstructionTree:
    records: Tuple[Dict[str, Any], ...]

    @classmethod
    def of(cls, d: OrientedDiagram) -> "ConstructionTree":
        recs = []
        p = d.provenance
        while isinstance(p, dict):
            recs.append({k: v for k, v in p.items() if k not in ("parent", "parents")})
            p = p.get("parent")
        return cls(tuple(reversed(recs)))

    def owner(self, component: str) -> Optional[int]:
        """Index of the record that created ``component``, following renames back."""
        name = component
        for idx in range(len(self.records) - 1, -1, -1):
            rec = self.records[idx]
            if name in rec.get("created", ()) or rec.get("op") == "atom":
                return idx
            if rec.get("op") == "rename":
                back = {v: k for k, v in rec["mapping"].items()}
                name = back.get(name, name)
        return None

    def certified(self) -> List[str]:
        for rec in reversed(self.records):
            if "certified" in rec:
                return list(rec["certified"])
        return []
