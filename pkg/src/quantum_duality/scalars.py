"""Univariate Laurent polynomials with integer coefficients.

Used for the coefficient rings Z[w, 1/w] and Z[q, 1/q], and for the plain
integer polynomials in the Chebyshev module.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping


class LaurentPoly:
    """An element of Z[x, 1/x], stored as {exponent: coefficient}.

    >>> w = LaurentPoly.monomial(1)
    >>> (w + w.inverse_power()) * (w - w.inverse_power())
    LaurentPoly({2: 1, -2: -1})
    """

    __slots__ = ("_d", "_off", "_hash")

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if v:
                    c[int(k)] = int(v)
        self._d = c
        self._off = 0
        self._hash = None

    @classmethod
    def _trusted(cls, coeffs: dict[int, int], offset: int = 0) -> LaurentPoly:
        """Wrap a dict of int keys and nonzero int values without copying.

        The result stands for x^offset times that dict. Dicts may be shared
        between instances and are never mutated.
        """
        obj = cls.__new__(cls)
        obj._d = coeffs
        obj._off = offset
        obj._hash = None
        return obj

    @property
    def _c(self) -> dict[int, int]:
        if self._off:
            off = self._off
            self._d = {k + off: v for k, v in self._d.items()}
            self._off = 0
        return self._d

    @classmethod
    def monomial(cls, power: int = 0, coeff: int = 1) -> LaurentPoly:
        return cls({power: coeff})

    @classmethod
    def const(cls, value: int) -> LaurentPoly:
        return cls({0: value})

    @classmethod
    def from_items(cls, items: Iterable[tuple[int, int]]) -> LaurentPoly:
        acc: dict[int, int] = {}
        for k, v in items:
            acc[k] = acc.get(k, 0) + v
        return cls(acc)

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def items(self):
        return self._c.items()

    def is_zero(self) -> bool:
        return not self._d

    def is_monomial(self) -> bool:
        return len(self._d) == 1

    def min_degree(self) -> int:
        return min(self._c)

    def max_degree(self) -> int:
        return max(self._c)

    def at_one(self) -> int:
        return sum(self._d.values())

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by x^k."""
        if k == 0:
            return self
        return LaurentPoly._trusted(self._d, self._off + k)

    def inverse_power(self) -> LaurentPoly:
        """Substitute x -> 1/x."""
        return LaurentPoly._trusted({-e: v for e, v in self._c.items()})

    def scale_exponents(self, m: int) -> LaurentPoly:
        """Substitute x -> x^m."""
        return LaurentPoly.from_items((e * m, v) for e, v in self._c.items())

    def nonnegative(self) -> bool:
        return all(v >= 0 for v in self._c.values())

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._trusted({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: dict[int, int] = {}
        for a, x in self._c.items():
            for b, y in other._c.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            (e, v), = self._c.items()
            if v not in (1, -1):
                raise ValueError("only unit monomials have Laurent inverses")
            return LaurentPoly({e * k: v ** (-k)})
        out = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in sorted(self._c.items(), reverse=True))
        return f"LaurentPoly({{{inner}}})"

    def sorted_items(self) -> list[tuple[int, int]]:
        """Terms by descending exponent."""
        return sorted(self._c.items(), reverse=True)

    def render(self, var: str = "w") -> str:
        if not self._c:
            return "0"
        parts = []
        for i, (e, v) in enumerate(self.sorted_items()):
            mag = abs(v)
            if e == 0:
                body = str(mag)
            else:
                pw = var if e == 1 else f"{var}^{e}"
                body = pw if mag == 1 else f"{mag}*{pw}"
            if i == 0:
                parts.append(("-" if v < 0 else "") + body)
            else:
                parts.append((" - " if v < 0 else " + ") + body)
        return "".join(parts)

    def render_latex(self, var: str = r"\omega") -> str:
        if not self._c:
            return "0"
        parts = []
        for i, (e, v) in enumerate(self.sorted_items()):
            mag = abs(v)
            if e == 0:
                body = str(mag)
            else:
                pw = var if e == 1 else f"{var}^{{{e}}}"
                body = pw if mag == 1 else f"{mag}{pw}"
            if i == 0:
                parts.append(("-" if v < 0 else "") + body)
            else:
                parts.append((" - " if v < 0 else " + ") + body)
        return "".join(parts)

    def to_json(self) -> dict:
        items = self.sorted_items()
        return {"powers": [e for e, _ in items], "coeffs": [v for _, v in items]}


# --- Kronecker packing ------------------------------------------------------
# A polynomial sum_k c_k x^(low + k) is stored as the integer sum_k c_k 2^(bits k).
# Sums and shifts act fieldwise as long as every |c_k| < 2^(bits - 1).

def field_bits(bound: int) -> int:
    """Field width, a whole number of bytes, for coefficients of absolute value <= bound."""
    return 8 * ((abs(bound).bit_length() + 9) // 8)


def _biases(n: int, bits: int) -> int:
    return int.from_bytes((1 << (bits - 1)).to_bytes(bits // 8, "little") * n, "little")


def pack_signed(coeffs: Mapping[int, int], bits: int) -> tuple[int, int]:
    """(low, packed) for a nonempty coefficient dict."""
    low = min(coeffs)
    n = max(coeffs) - low + 1
    width = bits // 8
    half = 1 << (bits - 1)
    buf = bytearray(half.to_bytes(width, "little") * n)
    for k, v in coeffs.items():
        at = (k - low) * width
        buf[at:at + width] = (v + half).to_bytes(width, "little")
    return low, int.from_bytes(buf, "little") - _biases(n, bits)


def unpack_signed(low: int, val: int, bits: int) -> dict[int, int]:
    """Inverse of pack_signed, dropping zero fields."""
    if not val:
        return {}
    width = bits // 8
    half = 1 << (bits - 1)
    n = abs(val).bit_length() // bits + 2
    raw = (val + _biases(n, bits)).to_bytes(n * width, "little")
    out = {}
    for k in range(n):
        v = int.from_bytes(raw[k * width:(k + 1) * width], "little") - half
        if v:
            out[low + k] = v
    return out


def _coerce(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a Laurent polynomial")


ONE = LaurentPoly.const(1)
ZERO = LaurentPoly()


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # dense coefficient lists, index = degree; den monic
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    return quot, num[:dd] if dd else [0]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial.

    >>> cyclotomic(3)
    (1, 1, 1)
    >>> cyclotomic(1)
    (-1, 1)
    """
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod(num, list(cyclotomic(d)))
            assert not any(rem)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


def reduce_cyclotomic(p: LaurentPoly, n: int) -> LaurentPoly:
    """Canonical representative of p in Z[x]/(Phi_n(x)), degree < phi(n)."""
    dense = [0] * n
    for e, v in p.items():
        dense[e % n] += v
    _, rem = _poly_divmod(dense, list(cyclotomic(n)))
    return LaurentPoly({i: v for i, v in enumerate(rem)})
