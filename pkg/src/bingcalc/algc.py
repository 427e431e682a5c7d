"""Algebraic concordance layer.

Seifert matrices and their Alexander polynomials, Levine-Tristram signature
step functions and their integrals, the cabling pullback ω ↦ ω^c, slice
witnesses, and the bookkeeping that turns relations among cables of a class
into checkable signature identities.

Angles are stored in turns (θ/2π) so that roots of unity are exact fractions.
"""
from __future__ import annotations

import bisect
import functools
import itertools
import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .fox import alexander_from_diagram
from .laurent import LaurentPoly, T
from .linkdiag import OrientedDiagram
from .polymat import bareiss_det
from . import seifert as _seifert

Turn = Union[Fraction, float]

ANGLE_TOL = 1e-12          # turns; two root angles closer than this are the same
JUMP_TOL = 1e-12           # evaluation this close to a jump is refused
DEFAULT_FM_DEGREE = 8
DEFAULT_METAB_BOUND = 6
METAB_MAX_SIZE = 8


class JumpPointError(ValueError):
    """Raised when a signature is requested exactly at a root of Δ on the circle."""


class CapExceeded(ValueError):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"environment variable {name} must be an integer, got {raw!r}") from None


def _int_det(rows: Sequence[Sequence[int]]) -> int:
    m = [[Fraction(v) for v in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return int(det)


# ---------------------------------------------------------------------------
# Seifert matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeifertMatrix:
    """Square integer matrix A of even size with det(A - Aᵀ) = 1."""
    rows: Tuple[Tuple[int, ...], ...]

    def __init__(self, rows, check: bool = True):
        if not isinstance(rows, np.ndarray) and any(len(r) != len(rows) for r in rows):
            raise ValueError("Seifert matrix must be square")
        rows = tuple(tuple(int(v) for v in r) for r in (np.asarray(rows, dtype=np.int64).tolist()
                                                          if len(rows) else ()))
        object.__setattr__(self, "rows", rows)
        if check:
            n = len(rows)
            if any(len(r) != n for r in rows):
                raise ValueError("Seifert matrix must be square")
            if n % 2:
                raise ValueError(f"Seifert matrix of a knot has even size, got {n}")
            skew = [[rows[i][j] - rows[j][i] for j in range(n)] for i in range(n)]
            if _int_det(skew) != 1:
                raise ValueError("det(A - A^T) must be 1 for a knot Seifert matrix")

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.n, self.n)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def to_json(self) -> List[List[int]]:
        return [list(r) for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "SeifertMatrix":
        if isinstance(data, Mapping):
            data = data["matrix"]
        return cls(data)

    def __repr__(self):
        return f"SeifertMatrix({self.to_json()})"


def block_sum(*mats: SeifertMatrix) -> SeifertMatrix:
    n = sum(m.n for m in mats)
    out = np.zeros((n, n), dtype=np.int64)
    k = 0
    for m in mats:
        out[k:k + m.n, k:k + m.n] = m.array
        k += m.n
    return SeifertMatrix(out, check=False)


def reverse(a: SeifertMatrix) -> SeifertMatrix:
    return SeifertMatrix(a.array.T, check=False)


def mirror(a: SeifertMatrix) -> SeifertMatrix:
    return SeifertMatrix(-a.array.T, check=False)


def seifert_from_diagram(d: OrientedDiagram) -> SeifertMatrix:
    """Seifert matrix of a connected knot diagram (Vogel moves, then the braid surface)."""
    return SeifertMatrix(_seifert.seifert_from_diagram(d))


def alexander(a: SeifertMatrix) -> LaurentPoly:
    """Canonical form of det(A - tAᵀ)."""
    if a.n == 0:
        return LaurentPoly(1)
    m = [[LaurentPoly(a[i, j]) - T * a[j, i] for j in range(a.n)] for i in range(a.n)]
    return bareiss_det(m).canonical()


TREFOIL = SeifertMatrix([[-1, 1], [0, -1]])
FIGURE8 = SeifertMatrix([[1, 1], [0, -1]])
# first hit of scripts/search_metabolic.py; e1, e2 span a metabolizer and Δ ≐ (3t²-7t+3)²
METABOLIC_P2 = SeifertMatrix([[0, 0, -4, -3], [0, 0, -3, -3], [-3, -3, -4, -4], [-3, -4, -4, -4]])
P_GENUS2 = LaurentPoly.from_list([3, -7, 3])


# ---------------------------------------------------------------------------
# roots of Δ on the unit circle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootAngle:
    """A root e^{2πi·turn} of Δ.  ``exact`` is set for roots of unity."""
    turn: float
    exact: Optional[Fraction] = None
    source: str = ""

    @property
    def value(self) -> Turn:
        return self.exact if self.exact is not None else self.turn

    @property
    def radians(self) -> float:
        return 2 * math.pi * self.turn

    def to_json(self):
        return {"turn": self.turn, "exact": None if self.exact is None else str(self.exact),
                "source": self.source}


@functools.lru_cache(maxsize=None)
def cyclotomic(m: int) -> LaurentPoly:
    p = LaurentPoly({m: 1, 0: -1})
    for d in range(1, m):
        if m % d == 0:
            p = p.divmod_exact(cyclotomic(d))
    return p


def _totient(m: int) -> int:
    return sum(1 for k in range(1, m + 1) if math.gcd(k, m) == 1)


def split_cyclotomic(delta: LaurentPoly) -> Tuple[Dict[int, int], LaurentPoly]:
    """Strip cyclotomic factors Φ_m (m ≥ 2) from Δ; returns ({m: multiplicity}, rest)."""
    rest = delta.canonical()
    found: Dict[int, int] = {}
    deg = rest.span
    m = 2
    # φ(m) >= sqrt(m/2), so no Φ_m of degree <= deg has m beyond 2 deg^2
    while m <= max(2, 2 * deg * deg):
        if _totient(m) <= rest.span:
            phi = cyclotomic(m)
            while rest.span >= phi.span:
                try:
                    rest = rest.divmod_exact(phi).canonical()
                except ValueError:
                    break
                found[m] = found.get(m, 0) + 1
        m += 1
    return found, rest


# exact real polynomial helpers; coefficient lists are in increasing degree

def _trim(p: List[Fraction]) -> List[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _peval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pdivmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    a = _trim(a)
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = a[-1] / b[-1]
        q[k] = f
        for i, c in enumerate(b):
            a[i + k] -= f * c
        a = _trim(a)
    return q, a


def _pgcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return a


def _deriv(p):
    return [i * c for i, c in enumerate(p)][1:]


def _sturm(p):
    seq = [_trim(p), _trim(_deriv(p))]
    while seq[-1] and len(seq[-1]) > 1:
        r = _pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _changes(seq, x: Fraction) -> int:
    signs = [v for v in (_peval(s, x) for s in seq) if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u > 0) != (v > 0))


def real_roots(p: Sequence[int], lo: Fraction, hi: Fraction, width: Fraction = Fraction(1, 2 ** 64)) -> List[Fraction]:
    """Distinct real roots of p in the open interval (lo, hi), each to within ``width``.

    Roots are isolated with a Sturm sequence of the square-free part and
    refined by bisection; a rational root met on the way is returned exactly.
    """
    p = _trim([Fraction(c) for c in p])
    if len(p) <= 1:
        return []
    g = _pgcd(p, _deriv(p))
    q = _pdivmod(p, g)[0] if len(g) > 1 else p
    seq = _sturm(q)

    def count(a, b):
        return _changes(seq, a) - _changes(seq, b)

    out: List[Fraction] = []

    def refine(a, b):
        fa = _peval(q, a)
        while b - a > width:
            m = (a + b) / 2
            fm = _peval(q, m)
            if fm == 0:
                return m
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        return (a + b) / 2

    def isolate(a, b):
        # q(a), q(b) are nonzero here
        n = count(a, b)
        if n == 0:
            return
        if n == 1:
            out.append(refine(a, b))
            return
        m = (a + b) / 2
        if _peval(q, m) == 0:
            out.append(m)
            eps = (b - a) / 4
            while True:
                if _peval(q, m - eps) != 0 and _peval(q, m + eps) != 0 and count(m - eps, m + eps) == 1:
                    break
                eps /= 2
            isolate(a, m - eps)
            isolate(m + eps, b)
        else:
            isolate(a, m)
            isolate(m, b)

    lo, hi = Fraction(lo), Fraction(hi)
    if _peval(q, lo) == 0 or _peval(q, hi) == 0:
        raise ValueError("interval endpoints must not be roots")
    isolate(lo, hi)
    return sorted(out)


def _trace_poly(delta: LaurentPoly) -> List[int]:
    """Q with Δ(t) = ±t^g Q(t + 1/t), for palindromic Δ of degree 2g."""
    c = delta.canonical().to_list()
    n = len(c) - 1
    if n % 2:
        raise ValueError(f"Alexander polynomial {delta} has odd degree")
    if list(c) != list(reversed(c)):
        raise ValueError(f"{delta} is not symmetric")
    g = n // 2
    # V_0 = 2, V_1 = x, V_{k+1} = x V_k - V_{k-1} gives t^k + t^-k in terms of x
    v = [[2], [0, 1]]
    for k in range(1, g):
        nxt = [0] + v[k]
        for i, a in enumerate(v[k - 1]):
            nxt[i] -= a
        v.append(nxt)
    q = [0] * (g + 1)
    q[0] = c[g]
    for k in range(1, g + 1):
        for i, a in enumerate(v[k]):
            q[i] += c[g + k] * a
    return q


def unit_circle_roots(delta: LaurentPoly, exact: bool = True) -> List[RootAngle]:
    """Roots of Δ on the unit circle, sorted by turn in (0, 1).

    With ``exact`` the cyclotomic part contributes exact angles k/m; the rest
    goes through the substitution x = t + 1/t and real-root isolation on (-2, 2).
    """
    delta = delta.canonical()
    if delta.is_zero():
        raise ValueError("Δ = 0 has no isolated roots")
    out: List[RootAngle] = []
    rest = delta
    if exact:
        cyc, rest = split_cyclotomic(delta)
        for m in sorted(cyc):
            for k in range(1, m):
                if math.gcd(k, m) == 1:
                    out.append(RootAngle(k / m, Fraction(k, m), f"Phi_{m}"))
    if rest.span:
        q = _trace_poly(rest)
        for x in real_roots(q, Fraction(-2), Fraction(2)):
            u = math.acos(float(x) / 2) / (2 * math.pi)
            out.append(RootAngle(u, None, "sturm"))
            out.append(RootAngle(1 - u, None, "sturm"))
    out.sort(key=lambda r: r.turn)
    return _dedupe(out)


def _dedupe(roots: Iterable[RootAngle]) -> List[RootAngle]:
    out: List[RootAngle] = []
    for r in sorted(roots, key=lambda r: r.turn):
        if out and (out[-1].exact == r.exact if (out[-1].exact is not None and r.exact is not None)
                    else abs(out[-1].turn - r.turn) < ANGLE_TOL):
            if out[-1].exact is None and r.exact is not None:
                out[-1] = r
            continue
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# signature functions
# ---------------------------------------------------------------------------

def hermitian_signature(a: SeifertMatrix, turn: float) -> int:
    """Signature of (1-ω)A + (1-ω̄)Aᵀ at ω = e^{2πi·turn}, computed numerically."""
    if a.n == 0:
        return 0
    w = complex(math.cos(2 * math.pi * turn), math.sin(2 * math.pi * turn))
    m = a.array.astype(complex)
    h = (1 - w) * m + (1 - w.conjugate()) * m.T
    ev = np.linalg.eigvalsh(h)
    tol = 1e-9 * max(1.0, float(np.abs(ev).max()))
    if np.abs(ev).min() < tol:
        raise JumpPointError(f"matrix is singular at turn {turn}; Δ vanishes there")
    return int((ev > 0).sum() - (ev < 0).sum())


@dataclass(frozen=True)
class Rho0:
    value: Union[Fraction, float]
    exact: bool
    error_bound: float = 0.0

    def __float__(self):
        return float(self.value)

    def to_json(self):
        return {"value": str(self.value) if self.exact else self.value, "float": float(self.value),
                "exact": self.exact, "error_bound": self.error_bound}


@dataclass(frozen=True)
class SignatureFunction:
    """Integer values on the open arcs cut out of the circle by ``jumps``.

    ``values[0]`` lives on (0, jumps[0]) and ``values[-1]`` on (jumps[-1], 1).
    """
    jumps: Tuple[RootAngle, ...]
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.jumps) + 1:
            raise ValueError("need one value per arc")

    @classmethod
    def zero(cls) -> "SignatureFunction":
        return cls((), (0,))

    def breakpoints(self) -> List[float]:
        return [0.0] + [j.turn for j in self.jumps] + [1.0]

    def arcs(self) -> List[Tuple[float, float, int]]:
        b = self.breakpoints()
        return [(b[i], b[i + 1], v) for i, v in enumerate(self.values)]

    def sample_turns(self) -> List[float]:
        return [(lo + hi) / 2 for lo, hi, _ in self.arcs()]

    def value_at(self, turn: float) -> int:
        turn = float(turn) % 1.0
        if turn < JUMP_TOL or turn > 1 - JUMP_TOL:
            return 0
        turns = [j.turn for j in self.jumps]
        k = bisect.bisect_left(turns, turn)
        for i in (k - 1, k):
            if 0 <= i < len(turns) and abs(turns[i] - turn) < JUMP_TOL:
                raise JumpPointError(f"turn {turn} is a jump point of the signature function")
        return self.values[k]

    def at(self, omega: complex) -> int:
        return self.value_at(math.atan2(omega.imag, omega.real) / (2 * math.pi))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def nonzero_sample(self) -> Optional[Tuple[float, int]]:
        for (lo, hi, v) in self.arcs():
            if v:
                return (lo + hi) / 2, v
        return None

    def integral(self) -> Rho0:
        """Integral over the circle normalised to length one."""
        if all(j.exact is not None for j in self.jumps):
            b = [Fraction(0)] + [j.exact for j in self.jumps] + [Fraction(1)]
            return Rho0(sum((b[i + 1] - b[i]) * v for i, v in enumerate(self.values)), True, 0.0)
        b = self.breakpoints()
        val = math.fsum((b[i + 1] - b[i]) * v for i, v in enumerate(self.values))
        steps = sum(abs(v - u) for u, v in zip(self.values, self.values[1:]))
        return Rho0(val, False, steps * 1e-12 + 1e-15 * len(self.values))

    def scaled(self, k: int) -> "SignatureFunction":
        return combine([(k, self)])

    def __add__(self, other: "SignatureFunction") -> "SignatureFunction":
        return combine([(1, self), (1, other)])

    def to_json(self):
        return {"jumps": [j.to_json() for j in self.jumps], "values": list(self.values)}

    def export_text(self) -> str:
        """Two columns (angle/2π, value): each row starts an arc, the last row closes the circle."""
        lines = ["# turn value"]
        for (lo, _, v) in self.arcs():
            lines.append(f"{lo!r} {v}")
        lines.append(f"1.0 {self.values[-1]}")
        return "\n".join(lines) + "\n"


def _merged(jumps: Sequence[RootAngle], values: Sequence[int]) -> SignatureFunction:
    js: List[RootAngle] = []
    vs = [values[0]]
    for j, v in zip(jumps, values[1:]):
        if v != vs[-1]:
            js.append(j)
            vs.append(v)
    return SignatureFunction(tuple(js), tuple(vs))


@functools.lru_cache(maxsize=256)
def _signature_function(a: SeifertMatrix, exact: bool) -> SignatureFunction:
    if a.n == 0:
        return SignatureFunction.zero()
    roots = unit_circle_roots(alexander(a), exact=exact)
    b = [0.0] + [r.turn for r in roots] + [1.0]
    values = [hermitian_signature(a, (b[i] + b[i + 1]) / 2) for i in range(len(b) - 1)]
    return _merged(roots, values)


def signature_function(a: SeifertMatrix, exact: bool = True) -> SignatureFunction:
    """Levine-Tristram signature as a step function with jumps at certified roots of Δ."""
    return _signature_function(a, exact)


def lt_signature(a: SeifertMatrix, omega: complex) -> int:
    if abs(abs(omega) - 1) > 1e-9:
        raise ValueError("ω must lie on the unit circle")
    turn = (math.atan2(omega.imag, omega.real) / (2 * math.pi)) % 1.0
    if turn < JUMP_TOL or turn > 1 - JUMP_TOL:
        return 0
    for r in unit_circle_roots(alexander(a)) if a.n else ():
        if abs(r.turn - turn) < JUMP_TOL:
            raise JumpPointError(f"ω = e^(2πi·{r.value}) is a root of the Alexander polynomial")
    return hermitian_signature(a, turn)


def rho0(a: SeifertMatrix, exact: bool = True) -> Rho0:
    """Integral of the signature function over the circle of length one.

    ``exact=False`` skips root-of-unity recognition and integrates over
    numerically isolated jump angles.
    """
    return signature_function(a, exact=exact).integral()


def _key(x: Turn):
    return float(x)


def combine(terms: Sequence[Tuple[int, SignatureFunction]]) -> SignatureFunction:
    """Σ k·S as a step function on the common refinement of the arcs."""
    pts = _dedupe(j for _, s in terms for j in s.jumps)
    b = [0.0] + [p.turn for p in pts] + [1.0]
    values = []
    for i in range(len(b) - 1):
        mid = (b[i] + b[i + 1]) / 2
        values.append(sum(k * s.value_at(mid) for k, s in terms))
    return _merged(pts, values)


def cable_pullback(s: SignatureFunction, c: int) -> SignatureFunction:
    """The step function ω ↦ S(ω^c)."""
    if not isinstance(c, (int, np.integer)) or isinstance(c, bool):
        raise TypeError("cable index must be an integer")
    if c <= 0:
        raise ValueError("cable index must be positive: i_0 sends every class to the unknot, "
                         "so i_0 terms are dropped rather than pulled back")
    if c == 1:
        return s
    pts = []
    for k in range(c):
        for j in s.jumps:
            if j.exact is not None:
                e = (j.exact + k) / c
                pts.append(RootAngle(float(e), e, j.source))
            else:
                pts.append(RootAngle((j.turn + k) / c, None, j.source))
        if k:
            pts.append(RootAngle(k / c, Fraction(k, c), "cable"))
    pts = _dedupe(pts)
    b = [0.0] + [p.turn for p in pts] + [1.0]
    values = [s.value_at(c * (b[i] + b[i + 1]) / 2) for i in range(len(b) - 1)]
    return _merged(pts, values)


# ---------------------------------------------------------------------------
# slice witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FoxMilnorResult:
    witness: Optional[LaurentPoly]
    bound: int
    searched: int
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_json(self):
        return {"witness": None if self.witness is None else self.witness.format(),
                "coefficient_bound": self.bound, "candidates_tested": self.searched, "reason": self.reason}


def _divisors(n: int) -> List[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def fox_milnor_witness(delta: LaurentPoly, max_degree: Optional[int] = None) -> FoxMilnorResult:
    """Search for f with f(t)·f(1/t) ≐ Δ.

    Candidates have degree g = deg Δ / 2, end coefficients whose product is the
    end coefficient of Δ, middle coefficients inside the Mignotte bound
    C(g, i)·‖Δ‖₂, f(1) = ±1 and f(-1)² = |Δ(-1)|.  The last two conditions
    fix one even-index and one odd-index coefficient, so the rest are enumerated.
    """
    cap = _env_int("MAX_FM_DEGREE", DEFAULT_FM_DEGREE) if max_degree is None else max_degree
    d = delta.canonical()
    if d.is_zero():
        raise ValueError("Δ = 0 is not the Alexander polynomial of a knot")
    if d.span > cap:
        raise CapExceeded(f"degree {d.span} exceeds the Fox-Milnor search cap {cap} (MAX_FM_DEGREE)")
    c = d.to_list()
    if d.span % 2 or list(c) != list(reversed(c)):
        return FoxMilnorResult(None, 0, 0, "Δ is not symmetric")
    g = d.span // 2
    if g == 0:
        if c[0] == 1:
            return FoxMilnorResult(LaurentPoly(1), 0, 1, "")
        return FoxMilnorResult(None, 0, 0, "constant Δ other than 1")
    if abs(d(1)) != 1:
        return FoxMilnorResult(None, 0, 0, "Δ(1) ≠ ±1, so no f with f(1) = ±1")
    dm1 = abs(d(-1))
    r = math.isqrt(dm1)
    norm = math.sqrt(sum(v * v for v in c))
    bounds = [math.floor(math.comb(g, i) * norm) for i in range(g + 1)]
    big = max(bounds)
    if r * r != dm1:
        return FoxMilnorResult(None, big, 0, f"|Δ(-1)| = {dm1} is not a square")
    evens = [i for i in range(1, g) if i % 2 == 0]
    odds = [i for i in range(1, g) if i % 2 == 1]
    solved = ([evens[-1]] if evens else []) + ([odds[-1]] if odds else [])
    free = [i for i in range(1, g) if i not in solved]
    tested = 0
    for f0 in _divisors(c[0]):
        for sg in (1, -1):
            fg = sg * c[0] // f0
            for s1 in (1, -1):
                for s2 in (r, -r):
                    if (s1 + s2) % 2:
                        continue
                    even_total, odd_total = (s1 + s2) // 2, (s1 - s2) // 2
                    for vals in itertools.product(*[range(-bounds[i], bounds[i] + 1) for i in free]):
                        f = [0] * (g + 1)
                        f[0], f[g] = f0, fg
                        for i, v in zip(free, vals):
                            f[i] = v
                        ok = True
                        for total, idx, parity in ((even_total, evens, 0), (odd_total, odds, 1)):
                            rest = total - sum(f[i] for i in range(g + 1) if i % 2 == parity and i not in solved)
                            if idx:
                                f[idx[-1]] = rest
                                ok = ok and abs(rest) <= bounds[idx[-1]]
                            else:
                                ok = ok and rest == 0
                        if not ok:
                            continue
                        tested += 1
                        fp = LaurentPoly.from_list(f)
                        if (fp * fp.conjugate()).same_as(d):
                            return FoxMilnorResult(fp.canonical(), big, tested, "")
    return FoxMilnorResult(None, big, tested, f"no factor with coefficients within {big}")


@dataclass(frozen=True)
class MetabolizerResult:
    status: str                 # "witness", "impossible" or "inconclusive"
    basis: Optional[Tuple[Tuple[int, ...], ...]]
    bound: int
    reason: str

    @property
    def found(self) -> bool:
        return self.status == "witness"

    def to_json(self):
        return {"status": self.status, "basis": None if self.basis is None else [list(b) for b in self.basis],
                "bound": self.bound, "reason": self.reason}


def _primitive(vs: Sequence[Sequence[int]]) -> bool:
    k, n = len(vs), len(vs[0])
    g = 0
    for cols in itertools.combinations(range(n), k):
        g = math.gcd(g, _int_det([[v[c] for c in cols] for v in vs]))
        if g == 1:
            return True
    return False


def _candidate_vectors(n: int, b: int) -> np.ndarray:
    grid = np.array(list(itertools.product(range(-b, b + 1), repeat=n)), dtype=np.int64)
    nz = grid[np.any(grid != 0, axis=1)]
    # one of ±v: first nonzero entry positive
    first = nz[np.arange(len(nz)), np.argmax(nz != 0, axis=1)]
    nz = nz[first > 0]
    g = np.gcd.reduce(np.abs(nz), axis=1)
    nz = nz[g == 1]
    # smallest vectors first, e_1 before e_2
    keys = [-nz[:, i] for i in range(n - 1, -1, -1)] + [np.abs(nz).sum(axis=1)]
    return nz[np.lexsort(keys)]


def metabolizer_witness(a: SeifertMatrix, bound: Optional[int] = None,
                        max_candidates: int = 2_000_000) -> MetabolizerResult:
    """Bounded search for a half-rank primitive sublattice on which A vanishes.

    Obstructions are checked first: a nonzero signature or a missing
    Fox-Milnor factor certifies that no metabolizer exists.  Otherwise vectors
    with entries in [-b, b] are tried for b = 1, 2, ... up to ``bound``;
    failure is reported as inconclusive, never as a disproof.
    """
    b_max = _env_int("METAB_BOUND", DEFAULT_METAB_BOUND) if bound is None else bound
    n = a.n
    if n > METAB_MAX_SIZE:
        raise CapExceeded(f"metabolizer search is capped at size {METAB_MAX_SIZE}, got {n}")
    if n == 0:
        return MetabolizerResult("witness", (), b_max, "empty matrix")
    sf = signature_function(a)
    hit = sf.nonzero_sample()
    if hit is not None:
        turn, v = hit
        note = ""
        try:
            note = f"; σ(-1) = {sf.value_at(0.5)}"
        except JumpPointError:
            pass
        return MetabolizerResult("impossible", None, b_max,
                                 f"signature {v} at turn {turn:.6f}{note} is nonzero")
    fm = fox_milnor_witness(alexander(a))
    if not fm.found:
        return MetabolizerResult("impossible", None, b_max, f"no Fox-Milnor factorization ({fm.reason})")
    m = a.array
    half = n // 2
    for b in range(1, b_max + 1):
        if (2 * b + 1) ** n > max_candidates:
            return MetabolizerResult("inconclusive", None, b - 1,
                                     f"no metabolizer with entries within {b - 1}; larger searches exceed "
                                     f"{max_candidates} candidates")
        vs = _candidate_vectors(n, b)
        iso = vs[np.einsum("ki,ij,kj->k", vs, m, vs) == 0]
        if len(iso) < half:
            continue
        prod = iso @ m @ iso.T
        ok = (prod == 0) & (prod.T == 0)
        found = _clique(iso, ok, half)
        if found is not None:
            basis = tuple(tuple(int(x) for x in iso[i]) for i in found)
            return MetabolizerResult("witness", basis, b, "")
    return MetabolizerResult("inconclusive", None, b_max, f"no metabolizer with entries within {b_max}")


def _clique(vs: np.ndarray, ok: np.ndarray, k: int) -> Optional[List[int]]:
    m = len(vs)

    def extend(chosen: List[int], cand: List[int]):
        if len(chosen) == k:
            return chosen if _primitive(vs[chosen].tolist()) else None
        for idx, c in enumerate(cand):
            trial = chosen + [c]
            if np.linalg.matrix_rank(vs[trial].astype(float)) < len(trial):
                continue
            rest = [d for d in cand[idx + 1:] if ok[c, d]]
            if len(rest) < k - len(trial):
                continue
            got = extend(trial, rest)
            if got is not None:
                return got
        return None

    return extend([], list(range(m)))


# ---------------------------------------------------------------------------
# expressions in cables of a class
# ---------------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*(?:i\(\s*(\d+)\s*\))?\s*\[\s*([A-Za-z_]\w*)\s*\]\s*")


@dataclass(frozen=True)
class ConcordanceExpression:
    """Σ coeff · i_c[atom]; the bare class [A] is stored as c = 1."""
    terms: Tuple[Tuple[int, int, str], ...]     # (coefficient, cable index, atom)

    @classmethod
    def of(cls, terms: Iterable[Tuple[int, int, str]]) -> "ConcordanceExpression":
        acc: Dict[Tuple[int, str], int] = {}
        for k, c, atom in terms:
            if c < 0:
                raise ValueError("cable indices are nonnegative")
            if c == 0:
                continue        # the (0,1)-cable of any knot is unknotted
            acc[(c, atom)] = acc.get((c, atom), 0) + int(k)
        return cls(tuple((k, c, atom) for (c, atom), k in sorted(acc.items(), key=lambda kv: (-kv[0][0], kv[0][1]))
                         if k))

    @classmethod
    def parse(cls, text: str) -> "ConcordanceExpression":
        pos = 0
        terms = []
        text = text.strip()
        if text in ("", "0"):
            return cls(())
        while pos < len(text):
            m = _TERM.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse expression near {text[pos:]!r}")
            if terms and m.group(1) is None:
                raise ValueError(f"missing + or - before {text[pos:]!r}")
            sign = -1 if m.group(1) == "-" else 1
            k = int(m.group(2)) if m.group(2) else 1
            c = int(m.group(3)) if m.group(3) else 1
            terms.append((sign * k, c, m.group(4)))
            pos = m.end()
        return cls.of(terms)

    def atoms(self) -> List[str]:
        return sorted({a for _, _, a in self.terms})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c, atom in self.terms:
            body = f"[{atom}]" if c == 1 else f"i({c})[{atom}]"
            parts.append((k < 0, f"{abs(k)}*{body}"))
        s = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            s += (" - " if neg else " + ") + body
        return s


@dataclass(frozen=True)
class ExpressionResult:
    expression: ConcordanceExpression
    function: SignatureFunction
    vanishes: bool
    witness: Optional[Tuple[float, int]]        # (turn, value) on an arc where the sum is nonzero
    value_at_minus_one: Optional[int]

    def to_json(self):
        return {"expression": str(self.expression), "vanishes": self.vanishes,
                "witness": None if self.witness is None else {"turn": self.witness[0], "value": self.witness[1]},
                "value_at_minus_one": self.value_at_minus_one, "signature": self.function.to_json()}


def eval_expression(expr: Union[str, ConcordanceExpression], atoms: Mapping[str, SeifertMatrix]) -> ExpressionResult:
    """Signature function Σ coeff·σ_atom(ω^c) of an expression.

    Vanishing is necessary for the expression to be zero in the algebraic
    concordance group; a nonzero arc is an obstruction.
    """
    e = ConcordanceExpression.parse(expr) if isinstance(expr, str) else expr
    missing = [a for a in e.atoms() if a not in atoms]
    if missing:
        raise KeyError(f"unbound atoms: {missing}")
    base = {a: signature_function(atoms[a]) for a in e.atoms()}
    f = combine([(k, cable_pullback(base[a], c)) for k, c, a in e.terms])
    try:
        at_m1 = f.value_at(0.5)
    except JumpPointError:
        at_m1 = None
    return ExpressionResult(e, f, f.is_zero(), f.nonzero_sample(), at_m1)


@dataclass(frozen=True)
class DeductionStep:
    label: str
    expression: str
    vanishes: bool
    value_at_minus_one: Optional[int]
    witness: Optional[Tuple[float, int]]

    def to_json(self):
        return {"label": self.label, "expression": self.expression, "vanishes": self.vanishes,
                "value_at_minus_one": self.value_at_minus_one,
                "witness": None if self.witness is None else list(self.witness)}


@dataclass(frozen=True)
class DeductionReport:
    steps: Tuple[DeductionStep, ...]
    fires_at: Optional[str]
    fox_milnor: FoxMilnorResult
    verdict: str

    @property
    def fires(self) -> bool:
        return self.fires_at is not None

    def to_json(self):
        return {"steps": [s.to_json() for s in self.steps], "fires_at": self.fires_at,
                "fox_milnor": self.fox_milnor.to_json(), "verdict": self.verdict}


def main2_deduction(a: SeifertMatrix, cable_range: Iterable[int]) -> DeductionReport:
    """Replay, at the level of signatures, the chain that starts from
    3 i_c[A] + i_{c-1}[A] + 3[A] = 0 for every c in the range.

    c = 1 gives 6[A] = 0 since i_0 is trivial; torsion classes satisfy
    4[A] = 0, so 2[A] = 0 and every relation reduces to
    i_c[A] + i_{c-1}[A] + [A] = 0.  Each forced identity is evaluated on A's
    signature function, and the Fox-Milnor condition covers the case where
    every signature identity holds but A is still not algebraically slice.
    """
    cs = sorted(set(int(c) for c in cable_range))
    if not cs:
        raise ValueError("cable_range must be nonempty")
    if cs[0] < 1:
        raise ValueError("cable indices start at 1")
    atoms = {"A": a}
    steps: List[DeductionStep] = []

    def record(label, terms):
        r = eval_expression(ConcordanceExpression.of(terms), atoms)
        steps.append(DeductionStep(label, str(r.expression), r.vanishes, r.value_at_minus_one, r.witness))

    for c in cs:
        record(f"relation c={c}", [(3, c, "A"), (1, c - 1, "A"), (3, 1, "A")])
    record("torsion: 6[A]=0 and 4[A]=0", [(2, 1, "A")])
    for c in cs:
        record(f"reduced c={c}", [(1, c, "A"), (1, c - 1, "A"), (1, 1, "A")])
    fires = next((s.label for s in steps if not s.vanishes), None)
    fm = fox_milnor_witness(alexander(a))
    if fires is not None:
        verdict = "BD_n(K) not slice: a forced signature identity fails"
    elif not fm.found:
        verdict = "BD_n(K) not slice: signature chain silent, but K is not algebraically slice (no Fox-Milnor factor)"
    else:
        verdict = "obstruction silent"
    return DeductionReport(tuple(steps), fires, fm, verdict)


_RHO_FIRES = "2K#2K^r not rationally slice, so BD_n(K) not slice for any n"


@dataclass(frozen=True)
class RhoVerdict:
    status: str                 # "impossible" or "satisfiable"
    witness: Optional[Tuple[int, int]]
    verdict: str

    def to_json(self):
        return {"status": self.status, "witness": None if self.witness is None else list(self.witness),
                "verdict": self.verdict}


def rho_equation_check(rho_j, rho_j_prime=None, eps_max: int = 10 ** 6,
                       pairs: Optional[Sequence[Tuple[int, int]]] = None) -> RhoVerdict:
    """Can ρ(J) + ε·ρ(J) + ε'·ρ(J') = 0 hold with 0 <= ε, ε' <= eps_max?

    Without ρ(J') this is (1 + ε)·ρ(J) = 0, impossible exactly when ρ(J) ≠ 0.
    Given explicit ``pairs``, only those are tried.
    """
    rj = Fraction(rho_j)
    rjp = None if rho_j_prime is None else Fraction(rho_j_prime)
    if pairs is not None:
        for e, ep in pairs:
            if e < 0 or ep < 0:
                raise ValueError("ε and ε' are nonnegative")
            if rj + e * rj + ep * (rjp or 0) == 0:
                return RhoVerdict("satisfiable", (e, ep), "silent")
        return RhoVerdict("impossible", None, _RHO_FIRES)
    if rj == 0:
        return RhoVerdict("satisfiable", (0, 0), "silent")
    if rjp is None or rjp == 0:
        return RhoVerdict("impossible", None, _RHO_FIRES)
    # ε' = (1 + ε)·r with r = -ρ(J)/ρ(J') needs r > 0 and denominator(r) | 1 + ε
    r = -rj / rjp
    if r > 0 and r.denominator - 1 <= eps_max and r.numerator <= eps_max:
        return RhoVerdict("satisfiable", (r.denominator - 1, r.numerator), "silent")
    return RhoVerdict("impossible", None, _RHO_FIRES)


@dataclass(frozen=True)
class InvariantVerdict:
    fires: bool
    phi: Tuple[int, ...]
    forced: str
    verdict: str

    def to_json(self):
        return {"fires": self.fires, "phi": list(self.phi), "forced": self.forced, "verdict": self.verdict}


def additive_invariant_rule(phi) -> InvariantVerdict:
    """An additive, reversal-invariant φ with values in a torsion-free group.

    Sliceness of 2K#2K^r forces 4·φ(K) = 0, hence φ(K) = 0.
    """
    v = tuple(int(x) for x in np.atleast_1d(np.asarray(phi, dtype=np.int64)))
    fires = any(v)
    return InvariantVerdict(fires, v, "4*phi(K) = 0",
                            "BD_n(K) not slice for the given invariant" if fires else "silent")


# ---------------------------------------------------------------------------
# obstruction summary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    holds: bool
    detail: object

    def to_json(self):
        d = self.detail.to_json() if hasattr(self.detail, "to_json") else self.detail
        return {"holds": self.holds, "detail": d}


@dataclass(frozen=True)
class ObstructionReport:
    signature_vanishes: Verdict
    fox_milnor_witness: Verdict
    metabolizer_witness: Verdict
    rho0_zero: Verdict

    @property
    def algebraically_slice(self) -> Optional[bool]:
        if self.metabolizer_witness.holds:
            return True
        if not self.signature_vanishes.holds or not self.fox_milnor_witness.holds:
            return False
        return None

    def to_json(self):
        return {"signature_vanishes": self.signature_vanishes.to_json(),
                "fox_milnor_witness": self.fox_milnor_witness.to_json(),
                "metabolizer_witness": self.metabolizer_witness.to_json(),
                "rho0_zero": self.rho0_zero.to_json(),
                "algebraically_slice": self.algebraically_slice}


def obstruction_report(a: SeifertMatrix, metab_bound: Optional[int] = None) -> ObstructionReport:
    sf = signature_function(a)
    hit = sf.nonzero_sample()
    sig = Verdict(hit is None, None if hit is None else {"turn": hit[0], "value": hit[1]})
    fm = fox_milnor_witness(alexander(a))
    mw = metabolizer_witness(a, bound=metab_bound) if a.n <= METAB_MAX_SIZE else None
    met = Verdict(bool(mw and mw.found), mw if mw else "matrix too large for the search")
    r = sf.integral()
    return ObstructionReport(sig, Verdict(fm.found, fm), met, Verdict(r.value == 0, r))


__all__ = [
    "SeifertMatrix", "SignatureFunction", "RootAngle", "Rho0", "ConcordanceExpression", "ObstructionReport",
    "JumpPointError", "CapExceeded", "alexander", "alexander_from_diagram", "seifert_from_diagram",
    "signature_function", "lt_signature", "rho0", "block_sum", "reverse", "mirror", "cable_pullback",
    "combine", "fox_milnor_witness", "metabolizer_witness", "eval_expression", "main2_deduction",
    "rho_equation_check", "additive_invariant_rule", "obstruction_report", "unit_circle_roots",
    "TREFOIL", "FIGURE8", "METABOLIC_P2", "P_GENUS2",
]
