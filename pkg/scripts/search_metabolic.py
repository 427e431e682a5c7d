"""Exhaustive search for a 4x4 metabolic Seifert matrix with Alexander polynomial p(t)^2.

Candidates have the block form [[0, B], [C, D]] with entries in [-4, 4].  The
zero block makes the span of e1, e2 a metabolizer, and the determinant splits
as det(B - t C^T) * det(C - t B^T), so the search first fixes B and C with
det(B - t C^T) = +-(3t^2 - 7t + 3) and then takes the first D in enumeration
order.  Determinants are recomputed here by cofactor expansion so the result
does not lean on the library.  The first hit is the matrix frozen in
bingcalc.algc.METABOLIC_P2.
"""
import itertools
import sys


def padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def pdet(m):
    """Determinant of a square matrix of coefficient lists, by cofactor expansion."""
    if len(m) == 1:
        return m[0][0]
    total = [0]
    for j in range(len(m)):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = pmul(m[0][j], pdet(minor))
        total = padd(total, term if j % 2 == 0 else [-x for x in term])
    return total


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    while p and p[0] == 0:
        p.pop(0)
    return p


def same_up_to_sign(p, q):
    return trim(p) == trim(q) or trim(p) == [-x for x in trim(q)]


P = [3, -7, 3]
P2 = pmul(P, P)


def first_hit(bound: int = 4):
    rng = range(-bound, bound + 1)
    for b1, b2, b3, b4 in itertools.product(rng, repeat=4):
        if abs(b1 * b4 - b2 * b3) != 3:
            continue
        for c1, c2, c3, c4 in itertools.product(rng, repeat=4):
            f = [b1 * b4 - b2 * b3, -(b1 * c4 + b4 * c1 - b2 * c2 - b3 * c3), c1 * c4 - c2 * c3]
            if not same_up_to_sign(f, P):
                continue
            for d in itertools.product(rng, repeat=4):
                a = [[0, 0, b1, b2], [0, 0, b3, b4], [c1, c2, d[0], d[1]], [c3, c4, d[2], d[3]]]
                skew = [[[a[i][j] - a[j][i]] for j in range(4)] for i in range(4)]
                if trim(pdet(skew)) != [1]:
                    continue
                pencil = [[[a[i][j], -a[j][i]] for j in range(4)] for i in range(4)]
                if same_up_to_sign(pdet(pencil), P2):
                    return a
    return None


if __name__ == "__main__":
    print(first_hit(int(sys.argv[1]) if len(sys.argv) > 1 else 4))
