"""Integral laminations as weighted normal multicurves.

A normal multicurve meets every triangle in arcs that cut off corners. It
is determined by the number of arcs at each corner, and those numbers come
from the edge intersection numbers ``mu`` via m = (mu_i + mu_j - mu_k) / 2.
Edge coordinates are a_i = mu_i / 2; internally everything is kept as the
doubled integer vector ``mu``.

Points where a multicurve crosses side slot k of triangle t are indexed
0, 1, ... starting from the clockwise start of that side.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .errors import InvalidCurve, NegativeNonPeripheral, NonRealizable, ParseError
from .surface import IdealTriangulation


@dataclass(frozen=True)
class Step:
    """One arc of a curve: enter triangle ``t`` through slot ``s_in`` at point
    ``i_in`` and leave through ``s_out`` at point ``i_out``."""

    t: int
    s_in: int
    i_in: int
    s_out: int
    i_out: int

    @property
    def turn(self) -> str:
        return "L" if self.s_out == (self.s_in + 1) % 3 else "R"

    @property
    def corner(self) -> int:
        """Corner slot cut off by this arc."""
        return self.s_in if self.turn == "L" else self.s_out

    def reversed(self) -> Step:
        return Step(self.t, self.s_out, self.i_out, self.s_in, self.i_in)


def corner_counts_from_mu(T: IdealTriangulation, mu: Sequence[int]) -> tuple[tuple[int, int, int], ...]:
    """Signed corner arc counts; raises NonRealizable on a parity failure."""
    flat = _flat_corner_counts(T, mu)
    return tuple(zip(flat[0::3], flat[1::3], flat[2::3]))


def _flat_corner_counts(T: IdealTriangulation, mu: Sequence[int]) -> list[int]:
    out = []
    for t, (i, j, k) in enumerate(T.triangles):
        a, b, c = mu[i], mu[j], mu[k]
        if (a + b + c) & 1:
            raise NonRealizable(
                f"triangle {t + 1}: coordinates on edges {i + 1},{j + 1},{k + 1} "
                f"have odd doubled sum, so no integral lamination has them")
        out += ((a + b - c) >> 1, (b + c - a) >> 1, (c + a - b) >> 1)
    return out


def mu_from_corner_counts(T: IdealTriangulation, m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    mu = [None] * T.num_edges
    for t, tri in enumerate(T.triangles):
        for k, e in enumerate(tri):
            v = m[t][(k - 1) % 3] + m[t][k]
            if mu[e] is None:
                mu[e] = v
            elif mu[e] != v:
                raise NonRealizable(f"corner counts disagree across edge {e + 1}")
    return tuple(mu)


def trace_components(T: IdealTriangulation, m: Sequence[Sequence[int]]) -> list[list[Step]]:
    """Split the normal multicurve with corner counts ``m`` into closed curves.

    Each component starts at its crossing with the lowest (edge, position),
    travelling into the triangle of the edge's first side.
    """
    if any(x < 0 for row in m for x in row):
        raise NonRealizable("negative corner count")
    mu = mu_from_corner_counts(T, m)

    def count(t, s):
        return m[t][(s - 1) % 3] + m[t][s]

    seen = set()
    comps = []
    for e in range(T.num_edges):
        (ta, sa), _ = T.edge_sides[e]
        for x in range(mu[e]):
            if (e, x) in seen:
                continue
            steps = []
            t, s, i = ta, sa, x
            while True:
                e_in = T.triangles[t][s]
                key = (e_in, i if T.edge_sides[e_in][0] == (t, s) else mu[e_in] - 1 - i)
                if key in seen:
                    break
                seen.add(key)
                if i < m[t][(s - 1) % 3]:
                    so = (s - 1) % 3
                    io = count(t, so) - 1 - i
                else:
                    so = (s + 1) % 3
                    io = count(t, s) - 1 - i
                steps.append(Step(t, s, i, so, io))
                t2, s2 = T.other_side(t, so)
                i2 = count(t, so) - 1 - io
                t, s, i = t2, s2, i2
            comps.append(steps)
    return comps


class NormalCurve:
    """A connected simple closed normal curve, with its own crossing positions.

    Two instances are equal when they are the same curve, i.e. have the same
    corner counts.
    """

    def __init__(self, T: IdealTriangulation, steps: Sequence[Step]):
        if len(steps) < 2:
            raise InvalidCurve("a closed normal curve crosses at least two edges")
        self.T = T
        self.steps = tuple(steps)

    @classmethod
    def from_corner_counts(cls, T: IdealTriangulation, m) -> NormalCurve:
        comps = trace_components(T, m)
        if len(comps) != 1:
            raise InvalidCurve(f"corner counts describe {len(comps)} curves, not one")
        return cls(T, comps[0])

    @classmethod
    def peripheral(cls, T: IdealTriangulation, puncture) -> NormalCurve:
        return _peripheral(T, puncture)

    @cached_property
    def corner_counts(self) -> tuple[tuple[int, int, int], ...]:
        m = [[0, 0, 0] for _ in self.T.triangles]
        for st in self.steps:
            m[st.t][st.corner] += 1
        return tuple(map(tuple, m))

    @cached_property
    def mu(self) -> tuple[int, ...]:
        return mu_from_corner_counts(self.T, self.corner_counts)

    @cached_property
    def _key(self):
        return (self.mu, self.corner_counts)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def turns(self) -> tuple[str, ...]:
        return tuple(st.turn for st in self.steps)

    def edge_in(self, k: int) -> int:
        st = self.steps[k]
        return self.T.triangles[st.t][st.s_in]

    def word(self) -> list[tuple[int, str]]:
        """(edge crossed, turn taken afterwards) pairs, 1-based edges."""
        return [(self.edge_in(k) + 1, st.turn) for k, st in enumerate(self.steps)]

    def word_string(self) -> str:
        return ",".join(f"{e}{d}" for e, d in self.word())

    def crossing(self, k: int) -> tuple[int, int]:
        """(edge, position along the edge direction) where step k is entered."""
        st = self.steps[k]
        e = self.T.triangles[st.t][st.s_in]
        if self.T.edge_sides[e][0] == (st.t, st.s_in):
            return e, st.i_in
        return e, self.mu[e] - 1 - st.i_in

    def rotated(self, k: int) -> NormalCurve:
        k %= len(self.steps)
        return NormalCurve(self.T, self.steps[k:] + self.steps[:k])

    def reversed(self) -> NormalCurve:
        return NormalCurve(self.T, tuple(st.reversed() for st in reversed(self.steps)))

    @cached_property
    def _puncture(self):
        turns = set(self.turns)
        if len(turns) != 1:
            return None
        st = self.steps[0]
        return self.T.corners[st.t][st.corner]

    def peripheral_puncture(self):
        """Label of the puncture this curve surrounds, or None."""
        return self._puncture

    def is_peripheral(self) -> bool:
        return self._puncture is not None

    def __eq__(self, other):
        if not isinstance(other, NormalCurve):
            return NotImplemented
        return self.T == other.T and self.corner_counts == other.corner_counts

    def __hash__(self):
        return hash(self.corner_counts)

    def __repr__(self):
        return f"NormalCurve({self.word_string()})"


CurveWord = list[tuple[int, str]]

_TOKEN = re.compile(r"^\s*(\d+)\s*([LRlr])\s*$")


def parse_word(text: str) -> CurveWord:
    """Parse "2L,3R" into [(2, 'L'), (3, 'R')]."""
    out = []
    for tok in text.split(","):
        mt = _TOKEN.match(tok)
        if not mt:
            raise ParseError(f"bad curve token {tok.strip()!r}; expected an edge number followed by L or R",
                             token=tok.strip())
        out.append((int(mt.group(1)), mt.group(2).upper()))
    if not out:
        raise ParseError("empty curve word", token=text)
    return out


def curve_from_word(T: IdealTriangulation, word: CurveWord | str) -> NormalCurve:
    """Realize a cyclic (edge, turn) word as a simple closed normal curve."""
    if isinstance(word, str):
        word = parse_word(word)
    word = [(int(e), str(d).upper()) for e, d in word]
    n = T.num_edges
    for e, d in word:
        if not 1 <= e <= n:
            raise InvalidCurve(f"edge {e} is not an edge of the triangulation (1..{n})")
        if d not in ("L", "R"):
            raise InvalidCurve(f"turn {d!r} must be L or R")
    if len(word) < 2:
        raise InvalidCurve("a closed curve in minimal position crosses at least two edges")
    candidates = []
    for start in T.edge_sides[word[0][0] - 1]:
        t, s = start
        path = []
        ok = True
        for k, (e, d) in enumerate(word):
            if T.triangles[t][s] != e - 1:
                ok = False
                break
            so = (s + 1) % 3 if d == "L" else (s - 1) % 3
            nxt = word[(k + 1) % len(word)][0] - 1
            if T.triangles[t][so] != nxt:
                ok = False
                break
            path.append((t, s, so))
            t, s = T.other_side(t, so)
        if ok and (t, s) == start:
            candidates.append(path)
    if not candidates:
        raise InvalidCurve(f"word {_fmt(word)} does not describe a closed path in this triangulation")
    curves = []
    for path in candidates:
        m = [[0, 0, 0] for _ in T.triangles]
        for t, s, so in path:
            m[t][s if so == (s + 1) % 3 else so] += 1
        comps = trace_components(T, m)
        if len(comps) != 1 or len(comps[0]) != len(path):
            raise InvalidCurve(f"word {_fmt(word)} is not a simple closed curve")
        c = NormalCurve(T, comps[0])
        if not _same_cycle([(st.t, st.s_in, st.s_out) for st in c.steps], path):
            raise InvalidCurve(f"word {_fmt(word)} is not a simple closed curve")
        curves.append(c)
    if len(set(curves)) > 1:
        raise InvalidCurve(f"word {_fmt(word)} is ambiguous: it fits two different curves")
    return curves[0]


def _same_cycle(a, b) -> bool:
    if len(a) != len(b):
        return False
    rev = [(t, so, s) for t, s, so in reversed(b)]
    for cand in (b, rev):
        for k in range(len(a)):
            if a[k:] + a[:k] == list(cand):
                return True
    return False


def _fmt(word) -> str:
    return ",".join(f"{e}{d}" for e, d in word)


def is_peripheral(T: IdealTriangulation, curve: NormalCurve | CurveWord | str):
    """Puncture label if the curve is peripheral, else None."""
    if not isinstance(curve, NormalCurve):
        curve = curve_from_word(T, curve)
    return curve.peripheral_puncture()


@lru_cache(maxsize=None)
def _peripheral(T: IdealTriangulation, puncture) -> NormalCurve:
    if puncture not in T.punctures:
        raise ValueError(f"unknown puncture {puncture!r}")
    m = [[1 if lab == puncture else 0 for lab in row] for row in T.corners]
    c = NormalCurve.from_corner_counts(T, m)
    # stored with all turns Right, matching the lower-triangular monodromy
    return c if c.turns[0] == "R" else c.reversed()


@lru_cache(maxsize=None)
def _corner_index(T: IdealTriangulation):
    """Puncture slot of each flat corner, the flat corner indices at each
    puncture, and the peripheral curves, all in puncture order."""
    labels = [lab for row in T.corners for lab in row]
    slot = {p: s for s, p in enumerate(T.punctures)}
    at = [[i for i, lab in enumerate(labels) if lab == p] for p in T.punctures]
    loops = [NormalCurve.peripheral(T, p) for p in T.punctures]
    return [slot[lab] for lab in labels], at, loops


@lru_cache(maxsize=1 << 14)
def _curve_from_counts(T: IdealTriangulation, m) -> NormalCurve:
    return NormalCurve.from_corner_counts(T, m)


@lru_cache(maxsize=1 << 16)
def _residual_curves(T: IdealTriangulation, flat: tuple[int, ...]) -> tuple[tuple[NormalCurve, int], ...]:
    """Distinct curves of a multicurve with flattened corner counts and their
    multiplicities; each curve carries its own crossing positions."""
    m = tuple(zip(flat[0::3], flat[1::3], flat[2::3]))
    mult: dict = {}
    for steps in trace_components(T, m):
        key = NormalCurve(T, steps).corner_counts
        mult[key] = mult.get(key, 0) + 1
    return tuple((_curve_from_counts(T, key), k) for key, k in mult.items())


def _curve_key(c: NormalCurve):
    return c._key


@dataclass(frozen=True)
class IntegralLamination:
    """Finite set of disjoint, pairwise non-homotopic weighted curves.

    Only peripheral curves may carry negative weights. ``components`` is kept
    in a canonical order so equal laminations compare equal.
    """

    T: IdealTriangulation
    components: tuple[tuple[NormalCurve, int], ...]
    _mu: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        comps = tuple(sorted(self.components, key=lambda cw: (cw[0]._key, cw[1])))
        object.__setattr__(self, "components", comps)
        if self._mu:
            return
        mu = [0] * self.T.num_edges
        for c, w in comps:
            mu = [m + w * x for m, x in zip(mu, c.mu)]
        object.__setattr__(self, "_mu", tuple(mu))

    @property
    def mu(self) -> tuple[int, ...]:
        """Doubled edge coordinates."""
        return self._mu

    def coords(self) -> tuple[Fraction, ...]:
        return tuple(map(_half, self._mu))

    def is_empty(self) -> bool:
        return not self.components

    def peripheral_part(self) -> list[tuple[NormalCurve, int]]:
        return [(c, w) for c, w in self.components if c.is_peripheral()]

    def nonperipheral_part(self) -> list[tuple[NormalCurve, int]]:
        return [(c, w) for c, w in self.components if not c.is_peripheral()]

    def scaled(self, k: int) -> IntegralLamination:
        if k < 0:
            raise ValueError("only nonnegative multiples of a lamination are laminations")
        return canonical_decompose(self.T, [(c, k * w) for c, w in self.components])

    def describe(self) -> str:
        if not self.components:
            return "empty lamination"
        parts = []
        for c, w in self.components:
            p = c.peripheral_puncture()
            kind = f"peripheral around puncture {p}" if p is not None else "curve"
            parts.append(f"{w} x {kind} [{c.word_string()}]")
        return "; ".join(parts)


def coords(lam: IntegralLamination) -> tuple[Fraction, ...]:
    return lam.coords()


def canonical_decompose(T: IdealTriangulation,
                        curves: Iterable[tuple[NormalCurve, int]]) -> IntegralLamination:
    """Merge homotopic curves, add weights, drop zero weights."""
    acc: dict[NormalCurve, int] = {}
    for c, w in curves:
        acc[c] = acc.get(c, 0) + int(w)
    comps = []
    for c, w in acc.items():
        if w == 0:
            continue
        if w < 0 and not c.is_peripheral():
            raise NegativeNonPeripheral(f"non-peripheral curve [{c.word_string()}] has weight {w}")
        comps.append((c, w))
    return IntegralLamination(T, tuple(comps))


def from_mu(T: IdealTriangulation, mu: Sequence[int]) -> IntegralLamination:
    """Lamination with doubled coordinates ``mu``."""
    return _from_doubled(T, tuple(map(int, mu)))


def _from_doubled(T: IdealTriangulation, mu: tuple[int, ...]) -> IntegralLamination:
    if len(mu) != T.num_edges:
        raise ValueError(f"expected {T.num_edges} coordinates, got {len(mu)}")
    flat = _flat_corner_counts(T, mu)
    # peel peripheral loops: at each puncture, the smallest corner count
    slots, at, loops = _corner_index(T)
    periph = [min(map(flat.__getitem__, idx)) for idx in at]
    rest = tuple([x - periph[s] for x, s in zip(flat, slots)])
    parts = [(c, k) for c, k in zip(loops, periph) if k]
    parts += _residual_curves(T, rest)
    # already canonical: the residual has a zero corner at every puncture, so
    # it holds no peripheral loop, and its curves are distinct with positive weights
    return IntegralLamination(T, tuple(parts), mu)


def from_coords(T: IdealTriangulation, a: Sequence) -> IntegralLamination:
    """Inverse of ``coords``; entries may be ints, Fractions or 'p/2' strings."""
    mu = tuple([2 * x if type(x) is int else
                x.numerator * (2 // x.denominator) if type(x) is Fraction and x.denominator <= 2 else
                _doubled(x) for x in a])
    return _from_doubled(T, mu)


@lru_cache(maxsize=4096)
def _half(x: int) -> Fraction:
    return Fraction(x, 2)


def _doubled(x) -> int:
    if type(x) is int:
        return 2 * x
    f = x if isinstance(x, Fraction) else Fraction(x)
    if f.denominator == 1:
        return 2 * f.numerator
    if f.denominator == 2:
        return f.numerator
    raise NonRealizable(f"coordinate {x} is not a half-integer")


def module_add(a: IntegralLamination, b: IntegralLamination) -> IntegralLamination:
    """Sum in coordinates; generally not the union of the two curve sets."""
    return from_mu(a.T, [x + y for x, y in zip(a.mu, b.mu)])


def lamination_from_curve(T: IdealTriangulation, curve: NormalCurve | CurveWord | str,
                          weight: int = 1) -> IntegralLamination:
    if not isinstance(curve, NormalCurve):
        curve = curve_from_word(T, curve)
    return canonical_decompose(T, [(curve, weight)])


def parse_coords(text: str) -> tuple[Fraction, ...]:
    """Parse "0,1/2,1" into half-integers, naming the first bad token."""
    out = []
    for tok in text.split(","):
        s = tok.strip()
        try:
            f = Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad coordinate token {s!r}; expected an integer or p/2", token=s) from None
        if (2 * f).denominator != 1:
            raise ParseError(f"bad coordinate token {s!r}; coordinates are half-integers", token=s)
        out.append(f)
    return tuple(out)
