"""Classical canonical map through turn-matrix monodromy, and Chebyshev tools.

Matrix entries are commutative Laurent polynomials in Z_1..Z_n, modelled as
``QLaurent`` over the zero epsilon form.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .lamination import CurveWord, IntegralLamination, NormalCurve, curve_from_word
from .qtorus import EpsilonForm, QLaurent
from .scalars import LaurentPoly
from .surface import IdealTriangulation

Matrix2 = tuple[tuple[QLaurent, QLaurent], tuple[QLaurent, QLaurent]]


def turn_matrix(edge: int, turn: str, n: int) -> Matrix2:
    """Turn matrix for crossing ``edge`` (1-based) and then turning ``turn``."""
    eps = EpsilonForm.zero(n)
    z = QLaurent.generator(eps, edge)
    zi = QLaurent.generator(eps, edge, -1)
    zero = QLaurent.zero(eps)
    if turn == "L":
        return ((z, z), (zero, zi))
    if turn == "R":
        return ((z, zero), (zi, zi))
    raise ValueError(f"turn must be 'L' or 'R', got {turn!r}")


def mat_mul(a: Matrix2, b: Matrix2) -> Matrix2:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def identity(n: int) -> Matrix2:
    eps = EpsilonForm.zero(n)
    one, zero = QLaurent.one(eps), QLaurent.zero(eps)
    return ((one, zero), (zero, one))


def det(m: Matrix2) -> QLaurent:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def trace(m: Matrix2) -> QLaurent:
    return m[0][0] + m[1][1]


def monodromy(word: CurveWord | NormalCurve, n: int | None = None) -> Matrix2:
    """Ordered product of turn matrices along the word."""
    if isinstance(word, NormalCurve):
        n = word.T.num_edges
        word = word.word()
    if n is None:
        n = max((e for e, _ in word), default=0)
    out = identity(n)
    for e, d in word:
        out = mat_mul(out, turn_matrix(e, d, n))
    return out


def chebyshev(k: int) -> LaurentPoly:
    """F_k with F_0 = 2, F_1 = t, F_{k+1} = t F_k - F_{k-1}."""
    return _cheb(k)


@lru_cache(maxsize=None)
def _cheb(k: int) -> LaurentPoly:
    if k < 0:
        raise ValueError("Chebyshev index must be nonnegative")
    if k == 0:
        return LaurentPoly.const(2)
    if k == 1:
        return LaurentPoly.monomial(1)
    return _cheb(k - 1).shift(1) - _cheb(k - 2)


@lru_cache(maxsize=None)
def inverse_chebyshev_coefficients(k: int) -> tuple[int, ...]:
    """(c_{k,0}, ..., c_{k,k}) with t^k = sum_i c_{k,i} F_i, where F_0 counts as 1.

    c_{k,0} is the constant term, so the F_0 = 2 convention does not enter.
    """
    if k < 1:
        raise ValueError("inverse Chebyshev index must be positive")
    if k == 1:
        return (0, 1)
    prev = inverse_chebyshev_coefficients(k - 1)
    m = k - 1
    c = [0] * (k + 1)
    # t * F_i = F_{i+1} + F_{i-1} for i >= 2, t * F_1 = F_2 + 2, t * 1 = F_1
    for i in range(m + 1):
        v = prev[i]
        if not v:
            continue
        if i == 0:
            c[1] += v
        elif i == 1:
            c[2] += v
            c[0] += 2 * v
        else:
            c[i + 1] += v
            c[i - 1] += v
    return tuple(c)


def inverse_chebyshev(k: int) -> LaurentPoly:
    """F~_k, the monic polynomial whose coefficients are the c_{k,i}."""
    c = inverse_chebyshev_coefficients(k)
    return LaurentPoly({i: v for i, v in enumerate(c)})


def inverse_chebyshev_recursive(k: int) -> LaurentPoly:
    """F~_k from the recursion in terms of F~_{k-1}'s coefficient list.

    F~_{k+1} = t^{k+1} + c_{k,k-1} t^k + sum_{i=1}^{k-1} (c_{k,i-1} + c_{k,i+1}) t^i + 2 c_{k,1}
    """
    if k < 1:
        raise ValueError("inverse Chebyshev index must be positive")
    c = [0, 1]
    for m in range(1, k):
        new = [0] * (m + 2)
        new[m + 1] = 1
        new[m] = c[m - 1] if m >= 1 else 0
        for i in range(1, m):
            new[i] += c[i - 1] + c[i + 1]
        new[0] = 2 * c[1]
        c = new
    return LaurentPoly({i: v for i, v in enumerate(c)})


def evaluate(poly: LaurentPoly, x):
    """Horner evaluation of a polynomial with nonnegative exponents at ring element x."""
    if poly.is_zero():
        return x * 0
    deg = poly.max_degree()
    if poly.min_degree() < 0:
        raise ValueError("cannot evaluate negative powers")
    coeffs = poly.coeffs
    acc = None
    for d in range(deg, -1, -1):
        c = coeffs.get(d, 0)
        acc = (x * 0 + c) if acc is None else acc * x + c
    return acc


def compose(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """p(q(t))."""
    return evaluate(p, q)


def classical_trace(curve: NormalCurve) -> QLaurent:
    return trace(monodromy(curve))


def classical_I(lam: IntegralLamination) -> QLaurent:
    """Commutative Laurent polynomial attached to a lamination by monodromy."""
    n = lam.T.num_edges
    eps = EpsilonForm.zero(n)
    out = QLaurent.one(eps)
    for c, w in lam.components:
        if c.is_peripheral():
            out = out * QLaurent.monomial(eps, [w * x for x in c.mu])
        else:
            out = out * evaluate(chebyshev(w), classical_trace(c))
    return out


def classical_I_word(T: IdealTriangulation, word: CurveWord | str, weight: int = 1) -> QLaurent:
    from .lamination import lamination_from_curve
    return classical_I(lamination_from_curve(T, curve_from_word(T, word), weight))


def random_sl2(rng, bound: int = 5) -> tuple[tuple[int, int], tuple[int, int]]:
    """Random integer matrix with determinant 1 (product of elementary matrices)."""
    m = ((1, 0), (0, 1))
    for _ in range(rng.randint(1, 6)):
        k = rng.randint(-bound, bound)
        e = ((1, k), (0, 1)) if rng.random() < 0.5 else ((1, 0), (k, 1))
        m = ((m[0][0] * e[0][0] + m[0][1] * e[1][0], m[0][0] * e[0][1] + m[0][1] * e[1][1]),
             (m[1][0] * e[0][0] + m[1][1] * e[1][0], m[1][0] * e[0][1] + m[1][1] * e[1][1]))
    return m


def int_matrix_power_trace(m: Sequence[Sequence[int]], k: int) -> int:
    r = ((1, 0), (0, 1))
    for _ in range(k):
        r = ((r[0][0] * m[0][0] + r[0][1] * m[1][0], r[0][0] * m[0][1] + r[0][1] * m[1][1]),
             (r[1][0] * m[0][0] + r[1][1] * m[1][0], r[1][0] * m[0][1] + r[1][1] * m[1][1]))
    return r[0][0] + r[1][1]
