"""Exact arithmetic in quantum tori.

A quantum torus here has generators Z_1..Z_n with Z_i Z_j = w^(2 e_ij) Z_j Z_i
for a skew-symmetric integer matrix e. Elements are finite sums of monomials
in standard form ``w^N Z_1^p_1 ... Z_n^p_n``. The same class also models the
q-level torus in X_i = Z_i^2 (relations X_i X_j = q^(2 e_ij) X_j X_i), which
only changes the names used for display.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from operator import add
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NoHighestTerm, NotInQSubalgebra, ZeroPolynomial
from .scalars import LaurentPoly, field_bits, pack_signed, reduce_cyclotomic, unpack_signed

Exps = tuple[int, ...]


@dataclass(frozen=True)
class EpsilonForm:
    """Skew-symmetric integer form on Z^n."""

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        for i, row in enumerate(m):
            if len(row) != n:
                raise ValueError("epsilon matrix must be square")
            for j in range(n):
                if row[j] != -m[j][i]:
                    raise ValueError(f"epsilon matrix not skew at ({i + 1},{j + 1})")

    @classmethod
    def zero(cls, n: int) -> EpsilonForm:
        return cls(tuple((0,) * n for _ in range(n)))

    @classmethod
    def from_upper(cls, n: int, entries: Mapping[tuple[int, int], int]) -> EpsilonForm:
        """Build from 1-based entries {(i, j): e_ij}; the rest is filled by skewness."""
        m = [[0] * n for _ in range(n)]
        for (i, j), v in entries.items():
            m[i - 1][j - 1] = v
            m[j - 1][i - 1] = -v
        return cls(tuple(map(tuple, m)))

    @property
    def n(self) -> int:
        return len(self.matrix)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.matrix[ij[0]][ij[1]]

    @cached_property
    def _lower(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        # row i: nonzero (j, e_ij) with j < i
        return tuple(
            tuple((j, self.matrix[i][j]) for j in range(i) if self.matrix[i][j])
            for i in range(self.n)
        )

    def pairing(self, p: Sequence[int], q: Sequence[int]) -> int:
        """p^T e q."""
        m = self.matrix
        return sum(p[i] * m[i][j] * q[j] for i in range(self.n) if p[i] for j in range(self.n) if q[j])

    def swap_cost(self, p: Sequence[int], q: Sequence[int]) -> int:
        """sum_{i>j} e_ij p_i q_j, half the w-exponent picked up by Z^p Z^q."""
        total = 0
        for i, row in enumerate(self._lower):
            pi = p[i]
            if pi:
                for j, e in row:
                    total += e * pi * q[j]
        return total

    @cached_property
    def _upper_array(self) -> np.ndarray:
        return np.triu(np.array(self.matrix, dtype=np.int64).reshape(self.n, self.n), 1)

    def weyl_phases(self, mat: np.ndarray) -> np.ndarray:
        """weyl_phase of every row of an integer matrix."""
        return ((mat @ self._upper_array) * mat).sum(axis=1)

    def weyl_phase(self, p: Sequence[int]) -> int:
        """sum_{i<j} e_ij p_i p_j."""
        total = 0
        for i, row in enumerate(self._lower):
            pi = p[i]
            if pi:
                for j, e in row:
                    total -= e * pi * p[j]
        return total

    def apply(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(row[j] * a[j] for j in range(self.n)) for row in self.matrix)


@dataclass(frozen=True)
class QMonomial:
    """Standard-form monomial ``w^omega_power * Z^exponents``."""

    omega_power: int
    exponents: Exps

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(x) for x in self.exponents))


def mono_mul(a: QMonomial, b: QMonomial, eps: EpsilonForm) -> QMonomial:
    """Standard form of the product a*b.

    >>> e = EpsilonForm.from_upper(2, {(1, 2): 2})
    >>> mono_mul(QMonomial(0, (0, 1)), QMonomial(0, (1, 0)), e)
    QMonomial(omega_power=-4, exponents=(1, 1))
    """
    if len(a.exponents) != eps.n or len(b.exponents) != eps.n:
        raise ValueError("monomial length does not match the epsilon form")
    n = a.omega_power + b.omega_power + 2 * eps.swap_cost(a.exponents, b.exponents)
    return QMonomial(n, tuple(x + y for x, y in zip(a.exponents, b.exponents)))


def weyl_order(p: Sequence[int], eps: EpsilonForm) -> QMonomial:
    """The Weyl-ordered monomial [Z^p] in standard form."""
    p = tuple(p)
    if len(p) != eps.n:
        raise ValueError("exponent vector length does not match the epsilon form")
    return QMonomial(-eps.weyl_phase(p), p)


def parity_of(m: QMonomial) -> tuple[int, Exps]:
    return m.omega_power % 4, tuple(x % 2 for x in m.exponents)


class QLaurent:
    """Finite sum of standard-form monomials over Z[w, 1/w].

    ``symbol`` is "Z" for the w-level torus and "X" for the q-level one;
    in the latter the scalar variable is q and the generators are X_i.
    """

    __slots__ = ("eps", "symbol", "_t", "_residues", "_mat")

    def __init__(self, eps: EpsilonForm, terms: Mapping[Exps, LaurentPoly] | None = None,
                 symbol: str = "Z"):
        self.eps = eps
        self.symbol = symbol
        t: dict[Exps, LaurentPoly] = {}
        if terms:
            for p, c in terms.items():
                if not isinstance(c, LaurentPoly):
                    c = LaurentPoly.const(c)
                if not c.is_zero():
                    p = tuple(p)
                    if len(p) != eps.n:
                        raise ValueError("exponent vector length does not match the epsilon form")
                    t[p] = c
        self._t = t
        self._residues = None
        self._mat = None

    # construction
    @classmethod
    def zero(cls, eps: EpsilonForm, symbol: str = "Z") -> QLaurent:
        return cls(eps, None, symbol)

    @classmethod
    def one(cls, eps: EpsilonForm, symbol: str = "Z") -> QLaurent:
        return cls(eps, {(0,) * eps.n: LaurentPoly.const(1)}, symbol)

    @classmethod
    def scalar(cls, eps: EpsilonForm, c: LaurentPoly | int, symbol: str = "Z") -> QLaurent:
        return cls(eps, {(0,) * eps.n: c}, symbol)

    @classmethod
    def monomial(cls, eps: EpsilonForm, exponents: Sequence[int], power: int = 0,
                 coeff: int = 1, symbol: str = "Z") -> QLaurent:
        return cls(eps, {tuple(exponents): LaurentPoly.monomial(power, coeff)}, symbol)

    @classmethod
    def from_monomial(cls, eps: EpsilonForm, m: QMonomial, symbol: str = "Z") -> QLaurent:
        return cls.monomial(eps, m.exponents, m.omega_power, 1, symbol)

    @classmethod
    def generator(cls, eps: EpsilonForm, i: int, power: int = 1, symbol: str = "Z") -> QLaurent:
        """Z_i^power with 1-based i."""
        p = [0] * eps.n
        p[i - 1] = power
        return cls.monomial(eps, p, symbol=symbol)

    @classmethod
    def weyl(cls, eps: EpsilonForm, p: Sequence[int], symbol: str = "Z") -> QLaurent:
        return cls.from_monomial(eps, weyl_order(p, eps), symbol)

    @classmethod
    def from_items(cls, eps: EpsilonForm, items: Iterable[tuple[Exps, int, int]],
                   symbol: str = "Z") -> QLaurent:
        """Sum of coeff * w^power * Z^exps over (exps, power, coeff) triples."""
        acc: dict[Exps, dict[int, int]] = {}
        for p, n, c in items:
            d = acc.setdefault(tuple(p), {})
            d[n] = d.get(n, 0) + c
        return cls(eps, {p: LaurentPoly(d) for p, d in acc.items()}, symbol)

    # access
    @property
    def n(self) -> int:
        return self.eps.n

    @property
    def terms(self) -> dict[Exps, LaurentPoly]:
        return dict(self._t)

    def coefficient(self, p: Sequence[int]) -> LaurentPoly:
        return self._t.get(tuple(p), LaurentPoly())

    def exponents(self) -> list[Exps]:
        """Exponent vectors in canonical (lex descending) order."""
        return sorted(self._t, reverse=True)

    def monomials(self) -> list[QMonomial]:
        """All (power, exponent) pieces in canonical order."""
        out = []
        for p in self.exponents():
            for n, c in self._t[p].sorted_items():
                out.extend([QMonomial(n, p)] * abs(c))
        return out

    def items(self):
        for p in self.exponents():
            yield p, self._t[p]

    def is_zero(self) -> bool:
        return not self._t

    def __len__(self):
        return len(self._t)

    def _check(self, other: QLaurent):
        if self.eps != other.eps or self.symbol != other.symbol:
            raise ValueError("operands live in different quantum tori")

    # ring operations
    def __add__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = QLaurent.scalar(self.eps, other, self.symbol)
        self._check(other)
        out = dict(self._t)
        for p, c in other._t.items():
            out[p] = out[p] + c if p in out else c
        return QLaurent(self.eps, out, self.symbol)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent(self.eps, {p: -c for p, c in self._t.items()}, self.symbol)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            return QLaurent(self.eps, {p: c * other for p, c in self._t.items()}, self.symbol)
        self._check(other)
        if len(other._t) == 1:
            (q, d), = other._t.items()
            if d.is_monomial():
                return self._times_monomial(q, d, left=False)
        if len(self._t) == 1:
            (p, c), = self._t.items()
            if c.is_monomial():
                return other._times_monomial(p, c, left=True)
        return self._times_general(other)

    def _times_general(self, other: QLaurent) -> QLaurent:
        # Coefficients are packed as integers sum_k c_k 2^(B (k - low)); the
        # width B exceeds every partial sum, bounded by the product of L1 norms.
        if not self._t or not other._t:
            return QLaurent._trusted(self.eps, {}, self.symbol)
        norm = sum(abs(v) for c in self._t.values() for v in c._d.values())
        norm *= sum(abs(v) for c in other._t.values() for v in c._d.values())
        bits = field_bits(norm)
        left = [(p, pack_signed(c._c, bits)) for p, c in self._t.items()]
        right = [(q, pack_signed(d._c, bits)) for q, d in other._t.items()]
        lower = self.eps._lower
        acc: dict[Exps, list] = {}
        get = acc.get
        for p, (lo_a, ia) in left:
            # Z^p Z^q = w^(2 u.q) Z^(p+q) with u_j = sum_{i>j} e_ij p_i
            u = [0] * len(p)
            for i, row in enumerate(lower):
                if p[i]:
                    for j, e in row:
                        u[j] += e * p[i]
            nz = [(j, 2 * x) for j, x in enumerate(u) if x]
            for q, (lo_b, ib) in right:
                low = lo_a + lo_b + sum(x * q[j] for j, x in nz)
                key = tuple(map(add, p, q))
                cur = get(key)
                if cur is None:
                    acc[key] = [low, ia * ib]
                elif cur[0] <= low:
                    cur[1] += (ia * ib) << (bits * (low - cur[0]))
                else:
                    cur[1] = (cur[1] << (bits * (cur[0] - low))) + ia * ib
                    cur[0] = low
        out = {}
        for key, (low, val) in acc.items():
            if val:
                out[key] = LaurentPoly._trusted(unpack_signed(low, val, bits))
        return QLaurent._trusted(self.eps, out, self.symbol)

    def _times_monomial(self, q: Exps, d: LaurentPoly, left: bool) -> QLaurent:
        """self * (d Z^q), or (d Z^q) * self when ``left``."""
        (n, v), = d.items()
        eps = self.eps
        # the swap cost is linear in p: p . lin
        lin = [0] * eps.n
        for i, row in enumerate(eps._lower):
            for j, e in row:
                if left:
                    lin[j] += e * q[i]
                else:
                    lin[i] += e * q[j]
        mat = self._exponent_matrix()
        shifts = (n + mat @ (2 * np.array(lin, dtype=np.int64))).tolist()
        moved = mat + np.array(q, dtype=np.int64)
        coeffs = self._t.values()
        if v == 1:
            vals = map(LaurentPoly.shift, coeffs, shifts)
        else:
            vals = (LaurentPoly._trusted({k: x * v for k, x in c._d.items()}, c._off + sh)
                    for c, sh in zip(coeffs, shifts))
        out = QLaurent._trusted(eps, dict(zip(map(tuple, moved.tolist()), vals)), self.symbol)
        out._mat = moved
        return out

    def _exponent_matrix(self) -> np.ndarray:
        """Exponent vectors as rows, in the order of ``_t``."""
        if self._mat is None:
            self._mat = np.array(list(self._t), dtype=np.int64).reshape(len(self._t), self.eps.n)
        return self._mat

    @classmethod
    def _trusted(cls, eps: EpsilonForm, terms: dict, symbol: str) -> QLaurent:
        obj = cls.__new__(cls)
        obj.eps, obj.symbol, obj._t = eps, symbol, terms
        obj._residues = None
        obj._mat = None
        return obj

    def __rmul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            if len(self._t) != 1:
                raise ValueError("only monomials are invertible")
            (p, c), = self._t.items()
            if not c.is_monomial() or abs(c.at_one()) != 1:
                raise ValueError("only unit monomials are invertible")
            (n, v), = c.items()
            # (w^n Z^p)^-1 = w^-n Z^-p with Z^p Z^-p = 1 exactly
            inv = QLaurent(self.eps, {tuple(-x for x in p): LaurentPoly.monomial(-n, v)}, self.symbol)
            return inv ** (-k)
        out = QLaurent.one(self.eps, self.symbol)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = QLaurent.scalar(self.eps, other, self.symbol)
        if not isinstance(other, QLaurent):
            return NotImplemented
        return self.eps == other.eps and self.symbol == other.symbol and self._t == other._t

    def __hash__(self):
        return hash((self.symbol, frozenset(self._t.items())))

    def commutator(self, other: QLaurent) -> QLaurent:
        return self * other - other * self

    # structure
    def star(self) -> QLaurent:
        out = {}
        for p, c in self._t.items():
            out[p] = c.inverse_power().shift(-2 * self.eps.weyl_phase(p))
        return QLaurent(self.eps, out, self.symbol)

    def classical_limit(self) -> QLaurent:
        """Set the scalar variable to 1; the result lives in a commutative torus."""
        eps0 = EpsilonForm.zero(self.n)
        return QLaurent(eps0, {p: LaurentPoly.const(c.at_one()) for p, c in self._t.items()},
                        self.symbol)

    def highest_term(self) -> QMonomial:
        mono = self.highest_term_exponents()
        c = self._t[mono]
        if not c.is_monomial() or c.at_one() != 1:
            raise NoHighestTerm(f"highest exponent {mono} has non-monomial coefficient {c!r}")
        (n, _), = c.items()
        return QMonomial(n, mono)

    def highest_term_exponents(self) -> Exps:
        if not self._t:
            raise ZeroPolynomial("zero polynomial has no highest term")
        top = tuple(map(max, zip(*self._t)))
        if top not in self._t:
            raise NoHighestTerm("no exponent vector dominates all others")
        return top

    def lex_highest_term(self, order: Sequence[int] | None = None) -> tuple[Exps, LaurentPoly]:
        """Lex-maximal exponent vector (variables compared in ``order``, 1-based)."""
        if not self._t:
            raise ZeroPolynomial("zero polynomial has no highest term")
        order = list(order) if order is not None else list(range(1, self.n + 1))
        if sorted(order) != list(range(1, self.n + 1)):
            raise ValueError("order must be a permutation of 1..n")
        best = max(self._t, key=lambda p: tuple(p[i - 1] for i in order))
        return best, self._t[best]

    def parity_decompose(self) -> dict[tuple[int, Exps], QLaurent]:
        classes = set()
        for p, c in self._t.items():
            pv = tuple(x & 1 for x in p)
            classes.update((n & 3, pv) for n in {k & 3 for k in c._c})
            if len(classes) > 1:
                break
        if len(classes) == 1:
            return {classes.pop(): self}
        acc: dict[tuple[int, Exps], dict[Exps, dict[int, int]]] = {}
        for p, c in self._t.items():
            pv = tuple(x % 2 for x in p)
            for n, v in c.items():
                d = acc.setdefault((n % 4, pv), {}).setdefault(p, {})
                d[n] = v
        return {k: QLaurent(self.eps, {p: LaurentPoly(d) for p, d in t.items()}, self.symbol)
                for k, t in sorted(acc.items())}

    def to_q_form(self) -> QLaurent:
        if self.symbol != "Z":
            raise ValueError("already in q-form")
        out = {}
        odd_p, odd_n = (1).__and__, (3).__and__
        for p, c in self._t.items():
            if any(map(odd_p, p)) or any(map(odd_n, c._c)):
                self._raise_parity()
            out[tuple(x >> 1 for x in p)] = LaurentPoly._trusted({n >> 2: v for n, v in c._c.items()})
        return QLaurent._trusted(self.eps, out, "X")

    def _residue_table(self):
        """Exponent matrix, per-term k mod 4 (or -1 when mixed) and quartered coefficients."""
        if self._residues is None:
            res, quarters = [], []
            for c in self._t.values():
                rs = {k & 3 for k in c._c}
                r = rs.pop() if len(rs) == 1 else -1
                res.append(r)
                quarters.append({(k - r) >> 2: v for k, v in c._c.items()} if r >= 0 else None)
            mat = self._exponent_matrix()
            self._residues = (mat, np.array(res, dtype=np.int64), quarters)
        return self._residues

    def times_weyl_in_q_form(self, c: Sequence[int]) -> QLaurent:
        """to_q_form(self * [Z^c]) in a single pass."""
        if self.symbol != "Z":
            raise ValueError("already in q-form")
        eps = self.eps
        c = tuple(c)
        if not self._t:
            return QLaurent._trusted(eps, {}, "X")
        lin = [0] * eps.n
        for i, row in enumerate(eps._lower):
            for j, e in row:
                lin[i] += e * c[j]
        mat, res, quarters = self._residue_table()
        total = res + (2 * (mat @ np.array(lin, dtype=np.int64)) - eps.weyl_phase(c))
        keys = mat + np.array(c, dtype=np.int64)
        if (res < 0).any() or (total & 3).any() or (keys & 1).any():
            (self * QLaurent.weyl(eps, c))._raise_parity()
        # w^(k + shift) = q^((k - res) / 4 + (res + shift) / 4)
        wrap = LaurentPoly._trusted
        out = dict(zip(map(tuple, (keys >> 1).tolist()),
                       map(wrap, quarters, (total >> 2).tolist())))
        return QLaurent._trusted(eps, out, "X")

    def _raise_parity(self):
        for p in self.exponents():
            for n, _ in self._t[p].sorted_items():
                if n % 4 or any(x % 2 for x in p):
                    raise NotInQSubalgebra(
                        f"term w^{n} * {render_monomial(p, 'Z')} has parity "
                        f"({n % 4}, {tuple(x % 2 for x in p)})",
                        term=QMonomial(n, p),
                    )

    def from_q_form(self) -> QLaurent:
        """Inverse of to_q_form: q^k X^a -> w^(4k) Z^(2a)."""
        if self.symbol != "X":
            raise ValueError("not in q-form")
        out = {tuple(2 * x for x in p): c.scale_exponents(4) for p, c in self._t.items()}
        return QLaurent(self.eps, out, "Z")

    def reduce_mod_cyclotomic(self, n: int) -> QLaurent:
        if n < 1 or n % 2 == 0:
            raise ValueError("cyclotomic reduction needs an odd positive N")
        out = {p: reduce_cyclotomic(c, n) for p, c in self._t.items()}
        return QLaurent(self.eps, out, self.symbol)

    def map_coefficients(self, f) -> QLaurent:
        return QLaurent(self.eps, {p: f(c) for p, c in self._t.items()}, self.symbol)

    def permute(self, perm: Sequence[int], reflect: bool = False) -> QLaurent:
        """Relabel generator i as generator perm[i] (0-based).

        ``perm`` must preserve the epsilon form, so Weyl-ordered monomials
        go to Weyl-ordered monomials. With ``reflect`` it must negate the
        form instead; then [Z^p] goes to [Z^-p'] and Weyl coefficients are
        conjugated w -> 1/w, which is the effect of a mirror symmetry.
        """
        eps = self.eps
        if self.symbol != "Z":
            raise ValueError("relabelling is defined on the w-level torus")
        sign = -1 if reflect else 1
        if any(eps[perm[i], perm[j]] != sign * eps[i, j] for i in range(eps.n) for j in range(eps.n)):
            raise ValueError("permutation is not compatible with the epsilon form")
        if not self._t:
            return self
        src = np.array(list(self._t), dtype=np.int64).reshape(len(self._t), eps.n)
        dst = np.empty_like(src)
        dst[:, list(perm)] = -src if reflect else src
        # standard coefficient of [Z^p] is w^(-phase(p)) times its Weyl coefficient
        before, after = eps.weyl_phases(src), eps.weyl_phases(dst)
        coeffs = self._t.values()
        if reflect:
            coeffs = [c.inverse_power() for c in coeffs]
            shifts = (-before - after).tolist()
        else:
            shifts = (before - after).tolist()
        out = dict(zip(map(tuple, dst.tolist()), map(LaurentPoly.shift, coeffs, shifts)))
        return QLaurent._trusted(eps, out, self.symbol)

    def scale_exponents(self, m: int) -> QLaurent:
        """Substitute Z_i -> Z_i^m in a commutative torus."""
        out: dict[Exps, LaurentPoly] = {}
        for p, c in self._t.items():
            key = tuple(m * x for x in p)
            out[key] = out[key] + c if key in out else c
        return QLaurent(self.eps, out, self.symbol)

    # rendering
    @property
    def scalar_name(self) -> str:
        return "w" if self.symbol == "Z" else "q"

    def render(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for i, p in enumerate(self.exponents()):
            c = self._t[p]
            mono = render_monomial(p, self.symbol)
            neg = False
            if c.is_monomial():
                (e, v), = c.items()
                neg = v < 0
                mag = LaurentPoly.monomial(e, abs(v))
                cs = mag.render(self.scalar_name)
                if mono == "1":
                    body = cs
                elif cs == "1":
                    body = mono
                else:
                    body = f"{cs} * {mono}"
            else:
                cs = "(" + c.render(self.scalar_name) + ")"
                body = cs if mono == "1" else f"{cs} * {mono}"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def render_latex(self) -> str:
        if not self._t:
            return "0"
        var = r"\omega" if self.symbol == "Z" else "q"
        parts = []
        for i, p in enumerate(self.exponents()):
            c = self._t[p]
            mono = " ".join(
                f"{self.symbol}_{{{k + 1}}}" + ("" if x == 1 else f"^{{{x}}}")
                for k, x in enumerate(p) if x
            )
            cs = c.render_latex(var)
            if not c.is_monomial():
                cs = f"\\left({cs}\\right)"
            if mono and cs in ("1", "-1"):
                body = ("-" if cs == "-1" else "") + mono
            else:
                body = (cs + " " + mono).strip()
            parts.append(body if i == 0 else ("- " + body[1:] if body.startswith("-") else "+ " + body))
        return " ".join(parts)

    def to_json(self) -> dict:
        return {
            "symbol": self.symbol,
            "scalar": self.scalar_name,
            "n": self.n,
            "terms": [{"exponents": list(p), "coefficient": self._t[p].to_json()}
                      for p in self.exponents()],
        }

    @classmethod
    def from_json(cls, data: dict, eps: EpsilonForm) -> QLaurent:
        terms = {}
        for t in data["terms"]:
            c = t["coefficient"]
            terms[tuple(t["exponents"])] = LaurentPoly(dict(zip(c["powers"], c["coeffs"])))
        return cls(eps, terms, data.get("symbol", "Z"))

    def __repr__(self):
        return f"QLaurent({self.render()})"


def render_monomial(p: Sequence[int], symbol: str = "Z") -> str:
    factors = [f"{symbol}{i + 1}" + ("" if x == 1 else f"^{x}") for i, x in enumerate(p) if x]
    return "*".join(factors) if factors else "1"


# functional aliases mirroring the method API
def star(f: QLaurent) -> QLaurent:
    return f.star()


def highest_term(f: QLaurent) -> QMonomial:
    return f.highest_term()


def lex_highest_term(f: QLaurent, order: Sequence[int] | None = None) -> QMonomial:
    p, c = f.lex_highest_term(order)
    if not c.is_monomial() or c.at_one() != 1:
        raise NoHighestTerm(f"lex-highest exponent {p} has coefficient {c!r}")
    (n, _), = c.items()
    return QMonomial(n, p)


def parity_decompose(f: QLaurent) -> dict[tuple[int, Exps], QLaurent]:
    return f.parity_decompose()


def to_q_form(f: QLaurent) -> QLaurent:
    return f.to_q_form()


def reduce_mod_cyclotomic(f: QLaurent, n: int) -> QLaurent:
    return f.reduce_mod_cyclotomic(n)
