"""Exact linear algebra over Z[t, 1/t] and Z.

Determinants are needed only up to units (±t^k), which lets sparse matrices
be shrunk by pivoting on unit entries before any dense work happens.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .laurent import LaurentPoly

SparseRow = Dict[int, LaurentPoly]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):  # deterministic below 3.4e14
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_table(count: int = 40):
    # primes below 2^31 so products of residues fit in int64
    out = []
    n = 2 ** 31 - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 2
    return out


_PRIMES = _prime_table()

DENSE_BAREISS_MAX = 10


def _is_unit(p: LaurentPoly) -> bool:
    c = p.coeffs
    return len(c) == 1 and abs(next(iter(c.values()))) == 1


def _unit_inverse(p: LaurentPoly) -> LaurentPoly:
    (e, v), = p.coeffs.items()
    return LaurentPoly({-e: v})


def eliminate_units(rows: Dict[int, SparseRow]) -> Tuple[Dict[int, SparseRow], bool]:
    """Pivot away unit entries (Markowitz order).  Returns the reduced rows and a
    flag that is False when a zero row shows the determinant vanishes."""
    rows = {r: {c: v for c, v in row.items() if not v.is_zero()} for r, row in rows.items()}
    cols: Dict[int, set] = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)
    while True:
        best = None
        for r, row in rows.items():
            if not row:
                return rows, False
            rl = len(row)
            for c, v in row.items():
                if _is_unit(v):
                    cost = (rl - 1) * (len(cols[c]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, r, c)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            return rows, True
        _, r, c = best
        prow = rows.pop(r)
        inv = _unit_inverse(prow[c])
        for cc in prow:
            cols[cc].discard(r)
        for r2 in list(cols[c]):
            row2 = rows[r2]
            f = row2[c] * inv
            for cc, v in prow.items():
                nv = row2.get(cc, LaurentPoly()) - f * v
                if nv.is_zero():
                    if cc in row2:
                        del row2[cc]
                        cols[cc].discard(r2)
                else:
                    if cc not in row2:
                        cols[cc].add(r2)
                    row2[cc] = nv
        del cols[c]
        for cc in prow:
            if cc != c and not cols[cc]:
                # a column with no entries left means a zero column
                return rows, False


def bareiss_det(m: List[List[LaurentPoly]]) -> LaurentPoly:
    n = len(m)
    if n == 0:
        return LaurentPoly(1)
    a = [list(row) for row in m]
    sign = 1
    prev = LaurentPoly(1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return LaurentPoly()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).divmod_exact(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def _modinv_vec(x: np.ndarray, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def _batched_det_mod(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a stack of square int64 matrices."""
    a = mats.copy() % p
    b, n, _ = a.shape
    det = np.ones(b, dtype=np.int64)
    alive = np.ones(b, dtype=bool)
    idx = np.arange(b)
    for k in range(n):
        col = a[:, k:, k]
        nz = col != 0
        has = nz.any(axis=1)
        alive &= has
        piv = np.argmax(nz, axis=1) + k
        swap = piv != k
        if swap.any():
            rows_k = a[idx, k, :].copy()
            a[idx, k, :] = a[idx, piv, :]
            a[idx, piv, :] = rows_k
            det = np.where(swap, (p - det) % p, det)
        pv = a[:, k, k]
        det = (det * pv) % p
        if k == n - 1:
            break
        inv = _modinv_vec(np.where(pv == 0, 1, pv), p)
        factors = (a[:, k + 1:, k] * inv[:, None]) % p
        # row update, chunked to keep products below 2^63
        prow = a[:, k, k + 1:]
        a[:, k + 1:, k + 1:] = (a[:, k + 1:, k + 1:] - (factors[:, :, None] * prow[:, None, :]) % p) % p
        a[:, k + 1:, k] = 0
    det[~alive] = 0
    return det


def _interpolate_mod(xs: np.ndarray, ys: np.ndarray, p: int) -> List[int]:
    """Coefficients (low to high) of the polynomial through (xs, ys) mod p."""
    n = len(xs)
    xs = [int(v) for v in xs]
    coef = [int(v) for v in ys]
    # Newton divided differences
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            num = (coef[i] - coef[i - 1]) % p
            den = (xs[i] - xs[i - j]) % p
            coef[i] = num * pow(den, p - 2, p) % p
    poly = [0] * n
    # expand Newton form from the top
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        new = [0] * n
        for k in range(n - 1):
            new[k + 1] = (new[k + 1] + poly[k]) % p
            new[k] = (new[k] - xs[i] * poly[k]) % p
        new[0] = (new[0] + coef[i]) % p
        poly = new
    return poly


def modular_det(m: List[List[LaurentPoly]]) -> LaurentPoly:
    """Exact determinant by evaluation/interpolation and CRT under a proven coefficient bound."""
    n = len(m)
    if n == 0:
        return LaurentPoly(1)
    shift = 0
    polys: List[List[Dict[int, int]]] = []
    degree = 0
    log_bound = 0.0
    for row in m:
        lo = min((v.min_exp for v in row if not v.is_zero()), default=0)
        hi = max((v.max_exp for v in row if not v.is_zero()), default=0)
        shift += lo
        degree += hi - lo
        norm = sum(sum(abs(c) for c in v.coeffs.values()) for v in row)
        if norm == 0:
            return LaurentPoly()
        log_bound += np.log2(norm)
        polys.append([{e - lo: c for e, c in v.coeffs.items()} for v in row])
    need_bits = log_bound + 2
    xs = np.arange(1, degree + 2, dtype=np.int64)
    residues = []
    primes = []
    bits = 0.0
    for p in _PRIMES:
        pows = np.ones((degree + 1, len(xs)), dtype=np.int64)
        for e in range(1, degree + 1):
            pows[e] = (pows[e - 1] * xs) % p
        mats = np.zeros((len(xs), n, n), dtype=np.int64)
        for i, row in enumerate(polys):
            for j, entry in enumerate(row):
                if entry:
                    acc = np.zeros(len(xs), dtype=np.int64)
                    for e, c in entry.items():
                        acc = (acc + (c % p) * pows[e]) % p
                    mats[:, i, j] = acc
        dets = _batched_det_mod(mats, p)
        residues.append(_interpolate_mod(xs, dets, p))
        primes.append(p)
        bits += np.log2(p)
        if bits > need_bits:
            break
    else:  # pragma: no cover - needs > 900-bit coefficients
        raise ArithmeticError("coefficient bound exceeds the prime table")
    modulus = 1
    for p in primes:
        modulus *= p
    coeffs = {}
    for e in range(degree + 1):
        value = 0
        for p, res in zip(primes, residues):
            mp = modulus // p
            value = (value + res[e] * mp * pow(mp, -1, p)) % modulus
        if value > modulus // 2:
            value -= modulus
        if value:
            coeffs[e + shift] = value
    return LaurentPoly(coeffs)


def sparse_det_up_to_units(rows: Dict[int, SparseRow]) -> LaurentPoly:
    """Determinant of a square sparse matrix over Z[t, 1/t], up to ±t^k, canonical."""
    reduced, ok = eliminate_units(rows)
    if not ok:
        return LaurentPoly()
    if not reduced:
        return LaurentPoly(1)
    cols = sorted({c for row in reduced.values() for c in row})
    if len(cols) != len(reduced):
        return LaurentPoly()
    ci = {c: k for k, c in enumerate(cols)}
    dense = [[LaurentPoly()] * len(cols) for _ in reduced]
    for i, row in enumerate(reduced.values()):
        dense[i] = [LaurentPoly()] * len(cols)
        for c, v in row.items():
            dense[i][ci[c]] = v
    if len(dense) <= DENSE_BAREISS_MAX:
        return bareiss_det(dense).canonical()
    return modular_det(dense).canonical()


# ---------------------------------------------------------------------------
# inertia of symmetric integer matrices
# ---------------------------------------------------------------------------

def inertia(m: Sequence[Sequence[int]]) -> Tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts, computed exactly by sparse
    symmetric elimination with 1x1 and 2x2 pivots."""
    n = len(m)
    rows: Dict[int, Dict[int, Fraction]] = {}
    for i in range(n):
        rows[i] = {j: Fraction(int(v)) for j, v in enumerate(m[i]) if v}
    for i in range(n):
        for j, v in rows[i].items():
            if rows[j].get(i) != v:
                raise ValueError("matrix is not symmetric")
    pos = neg = zero = 0
    while rows:
        best = None
        for i, row in rows.items():
            if not row:
                best = ("empty", i)
                break
            if i in row:
                cost = len(row)
                if best is None or best[0] != "diag" or cost < best[1]:
                    best = ("diag", cost, i)
        if best is not None and best[0] == "empty":
            del rows[best[1]]
            zero += 1
            continue
        if best is not None:
            i = best[2]
            d = rows[i][i]
            if d > 0:
                pos += 1
            else:
                neg += 1
            ri = rows.pop(i)
            for j in ri:
                if j != i:
                    del rows[j][i]
            others = [j for j in ri if j != i]
            for a in others:
                fa = ri[a] / d
                ra = rows[a]
                for b in others:
                    nv = ra.get(b, 0) - fa * ri[b]
                    if nv:
                        ra[b] = nv
                    elif b in ra:
                        del ra[b]
            continue
        # no nonzero diagonal: 2x2 pivot [[0, c], [c, 0]] has inertia (1, 1)
        i = min(rows, key=lambda k: len(rows[k]))
        j = next(iter(rows[i]))
        c = rows[i][j]
        pos += 1
        neg += 1
        ri = rows.pop(i)
        rj = rows.pop(j)
        for k in list(ri) + list(rj):
            if k in rows:
                rows[k].pop(i, None)
                rows[k].pop(j, None)
        others = sorted((set(ri) | set(rj)) - {i, j})
        # block B = [[0, c], [c, rj_j]], B^{-1} = [[-rj_j/c^2, 1/c], [1/c, 0]]
        e = rj.get(j, Fraction(0))
        binv = ((-e / (c * c), 1 / c), (1 / c, Fraction(0)))
        for a in others:
            ua = (ri.get(a, 0), rj.get(a, 0))
            wa = (binv[0][0] * ua[0] + binv[0][1] * ua[1], binv[1][0] * ua[0] + binv[1][1] * ua[1])
            ra = rows[a]
            for b in others:
                ub = (ri.get(b, 0), rj.get(b, 0))
                nv = ra.get(b, 0) - (wa[0] * ub[0] + wa[1] * ub[1])
                if nv:
                    ra[b] = nv
                elif b in ra:
                    del ra[b]
    return pos, neg, zero


def signature(m: Sequence[Sequence[int]]) -> int:
    p, q, _ = inertia(m)
    return p - q
