"""Covering link calculus: sublinks, cyclic branched covers, height and claims.

A branched cover over a round component U is built from the disk
certificate: cut the rest of the link along U's fold arc, stack p^a copies
of the resulting tangle, and close up through a small loop (the lift of U)
that encircles the closing strands.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

from .disk import DiskCertificate, NotCertified, certify, cut_along, is_round
from .linkdiag import (DiagramError, OrientedDiagram, UnionFind, assemble, certified_names, reorder,
                       require_valid, reverse, sublink)

BRANCH_SUFFIX = "~"


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(math.isqrt(p)) + 1))


class ScriptError(RuntimeError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"step {step}: {reason}")
        self.step = step
        self.reason = reason


# ---------------------------------------------------------------------------
# branched covers
# ---------------------------------------------------------------------------

def _sheet(s: int, v: Hashable) -> Hashable:
    return ("s", s, v)


def lift_counts(d: OrientedDiagram, comp, n: int) -> Dict[str, int]:
    """Number of lifts of every other component: gcd(n, winding through the disk)."""
    cert = certify(d, comp)
    cmap = d.component_of_edge()
    wind = {name: 0 for k, name in enumerate(d.names) if k != cert.index}
    for e, s in zip(cert.crossed, cert.directions):
        wind[d.names[cmap[e]]] += s
    return {name: math.gcd(n, abs(w)) if w else n for name, w in wind.items()}


def branched_cover(d: OrientedDiagram, comp, p: int, a: int = 1, require_certified: bool = True) -> OrientedDiagram:
    """The p^a-fold cyclic branched cover of S^3 along the round component ``comp``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if a < 1:
        raise ValueError("exponent a must be positive")
    require_valid(d)
    c = d.index(comp)
    name = d.names[c]
    certified = certified_names(d)
    if require_certified and name not in certified:
        raise NotCertified(f"component {name!r} carries no construction certificate")
    cert = certify(d, c)
    n = p ** a
    cut = cut_along(d, cert)
    k = len(cut.a_half)
    raw = []
    pairs = []
    for s in range(n):
        for ids, ui, oi in cut.raw:
            raw.append((tuple(_sheet(s, v) for v in ids), ui, oi))
        for v, root in cut.merge.items():
            pairs.append((_sheet(s, v), _sheet(s, root)))
    for s in range(n - 1):
        for j in range(k):
            pairs.append((_sheet(s, cut.b_half[j]), _sheet(s + 1, cut.a_half[j])))
    # the lift of U: a thin loop around the closing strands, over on the A side
    e = {j: ("U", "e", j) for j in range(-1, k)}
    f = {j: ("U", "f", j) for j in range(k - 1)}
    for j in range(k):
        up = cut.directions[j] > 0
        s_j = _sheet(n - 1, cut.b_half[j])
        t_j = _sheet(0, cut.a_half[j])
        m_j = ("U", "m", j)
        raw.append(((m_j, e[j], t_j, e[j - 1]), 0 if up else 2, 3))
        prev = e[k - 1] if j == k - 1 else f[j]
        nxt = e[-1] if j == 0 else f[j - 1]
        raw.append(((s_j, prev, m_j, nxt), 1, 0 if up else 2))
    strands = UnionFind()
    for a_, b_ in pairs:
        strands.union(a_, b_)
    for ccw, ui, oi in raw:
        strands.union(ccw[ui], ccw[(ui + 2) % 4])
        strands.union(ccw[oi], ccw[(oi + 2) % 4])
    ids = {v for ccw, _, _ in raw for v in ccw} | {v for pr in pairs for v in pr} | {e[-1]}
    seeds_by_name = dict(cut.seeds)
    for nm, v in cut.seeds:
        for s in range(n):
            ids.add(_sheet(s, v))
    merge_uf = UnionFind()
    for a_, b_ in pairs:
        merge_uf.union(a_, b_)
    merge = {v: merge_uf.find(v) for v in ids}
    lift_name = name + BRANCH_SUFFIX
    seeds: List[Tuple[str, Hashable]] = []
    order: List[str] = []
    lifts: Dict[str, List[str]] = {}
    for kk, nm in enumerate(d.names):
        if kk == c:
            seeds.append((lift_name, e[-1]))
            order.append(lift_name)
            continue
        groups: Dict[Hashable, List[int]] = {}
        for s in range(n):
            groups.setdefault(strands.find(_sheet(s, seeds_by_name[nm])), []).append(s)
        ordered = sorted(groups.values(), key=min)
        lifts[nm] = []
        for idx, sheets in enumerate(ordered):
            ln = f"{nm}{BRANCH_SUFFIX}{idx + 1}"
            seeds.append((ln, _sheet(sheets[0], seeds_by_name[nm])))
            order.append(ln)
            lifts[nm].append(ln)
    new_cert = [lift_name]
    for nm in certified:
        if nm == name or nm not in lifts:
            continue
        if _disk_avoids(d, nm, cert):
            new_cert += lifts[nm]
    rec = {"op": "branched_cover", "branch": name, "p": p, "a": a, "sheets": n, "strands": k,
           "lifts": lifts, "certified": new_cert}
    if d.provenance is not None:
        rec["parent"] = d.provenance
    out = assemble(raw, seeds, (), merge=merge, provenance=rec)
    out = reorder(out, order)
    if AXIS_SIGN < 0 and k:
        out = reverse(out, [lift_name])
    # a lift of an unknotted component that comes out round carries its own disk
    for nm in certified:
        for ln in lifts.get(nm, ()):
            if ln not in new_cert and is_round(out, ln):
                new_cert.append(ln)
    rec["certified"] = [n for n in out.names if n in new_cert]
    return out.with_provenance(rec)


# orientation of the branch lift relative to the closing-loop model (the model
# links every upward strand positively; fixed by the linking test in the suite)
AXIS_SIGN = -1


def _disk_avoids(d: OrientedDiagram, comp: str, branch: DiskCertificate) -> bool:
    """True if ``comp`` is round and its spanning disk misses the branch locus."""
    try:
        cx = certify(d, comp)
    except NotCertified:
        return False
    u_edges = set(d.components[branch.index])
    return not any(e in u_edges for e in cx.crossed)


# ---------------------------------------------------------------------------
# scripts and ledgers
# ---------------------------------------------------------------------------

SLICE_CLAIMS = ("zp", "rational", "none")


@dataclass(frozen=True)
class Ledger:
    height: int = 0
    sliceness: Optional[str] = None
    solvability: Optional[Fraction] = None
    input_solvability: Optional[Fraction] = None

    def to_json(self):
        return {
            "height": self.height,
            "sliceness": self.sliceness,
            "solvability": None if self.solvability is None else _half(self.solvability),
            "input_solvability": None if self.input_solvability is None else _half(self.input_solvability),
        }


def _half(x: Fraction) -> Union[int, float]:
    return int(x) if x.denominator == 1 else float(x)


def _as_half_integer(v) -> Fraction:
    f = Fraction(str(v))
    if (2 * f).denominator != 1:
        raise ValueError(f"{v} is not a half-integer")
    return f


@dataclass(frozen=True)
class Sublink:
    keep: Tuple[Union[int, str], ...]

    def describe(self) -> str:
        return "sublink keep=" + ",".join(_ref_text(k) for k in self.keep)


@dataclass(frozen=True)
class BranchedCover:
    component: Union[int, str]
    p: int
    a: int = 1

    def describe(self) -> str:
        return f"branch comp={_ref_text(self.component)} p={self.p} a={self.a}"


CalculusStep = Union[Sublink, BranchedCover]


@dataclass(frozen=True)
class CalculusScript:
    steps: Tuple[CalculusStep, ...] = ()
    prime: Optional[int] = None
    assume_slice: Optional[str] = None
    assume_solvable: Optional[Fraction] = None
    name: str = "script"

    def __post_init__(self):
        primes = {s.p for s in self.steps if isinstance(s, BranchedCover)}
        if self.prime is not None:
            primes.add(self.prime)
        if len(primes) > 1:
            raise ValueError(f"all covers in a script must use one prime, got {sorted(primes)}")

    @property
    def height(self) -> int:
        return sum(1 for s in self.steps if isinstance(s, BranchedCover))

    def then(self, other: "CalculusScript") -> "CalculusScript":
        return CalculusScript(self.steps + other.steps, self.prime or other.prime, self.assume_slice,
                              self.assume_solvable, f"{self.name}+{other.name}")

    def input_ledger(self) -> Ledger:
        return Ledger(0, self.assume_slice, self.assume_solvable, self.assume_solvable)

    def dumps(self) -> str:
        lines = []
        if self.prime is not None:
            lines.append(f"prime={self.prime}")
        if self.assume_slice:
            lines.append(f"assume slice={self.assume_slice}")
        if self.assume_solvable is not None:
            lines.append(f"assume solvable={_half(self.assume_solvable)}")
        lines += [s.describe() for s in self.steps]
        return "\n".join(lines) + "\n"


def _ref_text(ref: Union[int, str]) -> str:
    return str(ref + 1) if isinstance(ref, int) else ref


def _component_ref(tok: str) -> Union[int, str]:
    """Scripts use 1-based indices; anything non-numeric is a component name."""
    return int(tok) - 1 if tok.isdigit() else tok


def parse_script(text: str, name: str = "script") -> CalculusScript:
    steps: List[CalculusStep] = []
    prime = None
    slice_claim = None
    solvable = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = dict(tok.split("=", 1) for tok in line.split()[1:] if "=" in tok) if " " in line else {}
        head = line.split()[0]
        try:
            if head.startswith("prime="):
                prime = int(head.split("=", 1)[1])
            elif head == "assume":
                if "slice" in fields:
                    if fields["slice"] not in SLICE_CLAIMS:
                        raise ValueError(f"unknown slice claim {fields['slice']!r}")
                    slice_claim = fields["slice"]
                if "solvable" in fields:
                    solvable = _as_half_integer(fields["solvable"])
            elif head == "sublink":
                keep = tuple(_component_ref(t) for t in fields["keep"].split(",") if t)
                steps.append(Sublink(keep))
            elif head == "branch":
                steps.append(BranchedCover(_component_ref(fields["comp"]), int(fields.get("p", prime or 0)),
                                           int(fields.get("a", 1))))
            else:
                raise ValueError(f"unknown directive {head!r}")
        except (KeyError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return CalculusScript(tuple(steps), prime, slice_claim, solvable, name)


def load_script(path) -> CalculusScript:
    with open(path) as fh:
        return parse_script(fh.read(), name=str(path))


def advance(ledger: Ledger, covers: int) -> Ledger:
    """Ledger after ``covers`` more (C2) steps: height adds, solvability drops by one each."""
    h = ledger.height + covers
    solv = ledger.solvability
    if solv is not None:
        solv = solv - covers
        if solv < 0:
            solv = None
    return replace(ledger, height=h, solvability=solv)


def run_script(d: OrientedDiagram, script: CalculusScript, claims: Optional[Ledger] = None,
               simplify_each: bool = True) -> Tuple[OrientedDiagram, Ledger]:
    from .linkdiag import simplify

    ledger = claims if claims is not None else script.input_ledger()
    cur = d
    for idx, step in enumerate(script.steps, 1):
        try:
            if isinstance(step, Sublink):
                cur = sublink(cur, step.keep)
            else:
                if script.prime is not None and step.p != script.prime:
                    raise ValueError(f"cover prime {step.p} differs from script prime {script.prime}")
                cur = branched_cover(cur, step.component, step.p, step.a)
                ledger = advance(ledger, 1)
            if simplify_each:
                cur = simplify(cur)
        except (DiagramError, ValueError, KeyError) as exc:
            raise ScriptError(idx, str(exc)) from exc
    return cur, ledger


# ---------------------------------------------------------------------------
# solvability arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainReport:
    h: Fraction
    r: int
    assumed: Fraction
    heights: Tuple[int, ...]
    labels: Tuple[str, ...]
    conclusion: Fraction

    def conclusion_text(self) -> str:
        return f"({_fmt(self.conclusion)})-solvable"

    def to_json(self):
        return {"h": _half(self.h), "r": self.r, "assumed": _fmt(self.assumed),
                "heights": list(self.heights), "stages": list(self.labels),
                "conclusion": self.conclusion_text()}


def _fmt(x: Fraction) -> str:
    return str(int(x)) if x.denominator == 1 else f"{float(x):.1f}"


def solvability_chain(h, r: int) -> ChainReport:
    """If BD_r(K) were (h + 2r - 0.5)-solvable, 2K#2K^r would be (h + 0.5)-solvable.

    Heights are cumulative: 2r-4 down to BD_2(K), 2r-2 to BD(K#K^r), 2r-1 to
    2K#2K^r.  For r = 1 the chain is the single height-1 step BD(K) -> K#K^r.
    """
    h = _as_half_integer(h)
    if h < 1:
        raise ValueError("h must be at least 1")
    if r < 1:
        raise ValueError("r must be >= 1")
    assumed = h + 2 * r - Fraction(1, 2)
    if r == 1:
        heights: Tuple[int, ...] = (1,)
        labels: Tuple[str, ...] = ("K#K^r",)
    else:
        heights = (2 * r - 4, 2 * r - 2, 2 * r - 1)
        labels = ("BD_2(K)", "BD(K#K^r)", "2K#2K^r")
    ledger = Ledger(0, None, assumed, assumed)
    ledger = advance(ledger, heights[-1])
    return ChainReport(h, r, assumed, heights, labels, ledger.solvability)
