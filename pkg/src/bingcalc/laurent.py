"""Integer Laurent polynomials in one variable.

Values are immutable; ``a.same_as(b)`` is the "equal up to a unit ±t^k"
relation used for Alexander polynomials.
"""
from __future__ import annotations

from typing import Dict, Iterable, Mapping, Tuple, Union

Number = Union[int, complex, float]


class LaurentPoly:
    __slots__ = ("_c",)

    def __init__(self, coeffs: Union[Mapping[int, int], Iterable[int], int, None] = None):
        c: Dict[int, int] = {}
        if coeffs is None:
            pass
        elif isinstance(coeffs, int):
            if coeffs:
                c[0] = coeffs
        elif isinstance(coeffs, Mapping):
            for e, v in coeffs.items():
                v = int(v)
                if v:
                    c[int(e)] = c.get(int(e), 0) + v
        else:
            for e, v in enumerate(coeffs):
                v = int(v)
                if v:
                    c[e] = v
        self._c = {e: v for e, v in c.items() if v}

    # construction helpers
    @classmethod
    def t(cls, k: int = 1) -> "LaurentPoly":
        return cls({k: 1})

    @classmethod
    def from_list(cls, coeffs: Iterable[int], low: int = 0) -> "LaurentPoly":
        return cls({low + i: v for i, v in enumerate(coeffs)})

    @property
    def coeffs(self) -> Dict[int, int]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def min_exp(self) -> int:
        return min(self._c) if self._c else 0

    @property
    def max_exp(self) -> int:
        return max(self._c) if self._c else 0

    @property
    def span(self) -> int:
        """Breadth max_exp - min_exp (0 for the zero polynomial)."""
        return self.max_exp - self.min_exp

    def to_list(self) -> Tuple[int, ...]:
        """Coefficients from min_exp up to max_exp."""
        if not self._c:
            return ()
        lo = self.min_exp
        return tuple(self._c.get(e, 0) for e in range(lo, self.max_exp + 1))

    # arithmetic
    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0) + v
        return LaurentPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c: Dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                c[e1 + e2] = c.get(e1 + e2, 0) + v1 * v2
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._c) == 1:
                (e, v), = self._c.items()
                if v in (1, -1):
                    return LaurentPoly({e * n: v ** (-n)})
            raise ValueError("only units can be raised to negative powers")
        result = LaurentPoly(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: v for e, v in self._c.items()})

    def substitute_power(self, c: int) -> "LaurentPoly":
        """p(t) -> p(t^c)."""
        return LaurentPoly({e * c: v for e, v in self._c.items()})

    def conjugate(self) -> "LaurentPoly":
        """p(t) -> p(1/t)."""
        return LaurentPoly({-e: v for e, v in self._c.items()})

    def divmod_exact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises ValueError if ``other`` does not divide ``self``."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly()
        num = dict(self._c)
        d_hi = other.max_exp
        d_lead = other._c[d_hi]
        quot: Dict[int, int] = {}
        lo_limit = self.min_exp - other.min_exp
        while num:
            hi = max(num)
            q_e = hi - d_hi
            if q_e < lo_limit:
                raise ValueError("not divisible")
            v = num[hi]
            if v % d_lead:
                raise ValueError("not divisible over the integers")
            q = v // d_lead
            quot[q_e] = q
            for e, dv in other._c.items():
                k = e + q_e
                num[k] = num.get(k, 0) - q * dv
                if num[k] == 0:
                    del num[k]
        return LaurentPoly(quot)

    def __call__(self, x: Number):
        if not self._c:
            return 0
        total = 0
        for e, v in self._c.items():
            total += v * (x ** e)
        return total

    # normal forms
    def canonical(self) -> "LaurentPoly":
        """Multiply by ±t^k so the lowest exponent is 0 and the constant term is positive."""
        if not self._c:
            return self
        lo = self.min_exp
        sign = 1 if self._c[lo] > 0 else -1
        return LaurentPoly({e - lo: sign * v for e, v in self._c.items()})

    def symmetrized(self) -> "LaurentPoly":
        """Shift so exponents are centred on 0 (requires even span); sign kept."""
        if self.span % 2:
            raise ValueError("odd span cannot be centred")
        return self.shift(-(self.min_exp + self.max_exp) // 2)

    def same_as(self, other: "LaurentPoly") -> bool:
        return self.canonical() == other.canonical()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        return f"LaurentPoly({self.format()!r})"

    def format(self, var: str = "t") -> str:
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c, reverse=True):
            v = self._c[e]
            sign = "-" if v < 0 else "+"
            a = abs(v)
            if e == 0:
                body = str(a)
            else:
                mon = var if e == 1 else f"{var}^{e}"
                body = mon if a == 1 else f"{a}*{mon}"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    __str__ = format

    def to_json(self) -> Dict[str, int]:
        return {str(e): v for e, v in sorted(self._c.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> "LaurentPoly":
        return cls({int(e): int(v) for e, v in data.items()})


T = LaurentPoly.t()
ONE = LaurentPoly(1)
