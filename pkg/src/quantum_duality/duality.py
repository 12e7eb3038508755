"""The duality maps on integral laminations and their structure constants.

``i_omega`` sends a lamination to the w-level quantum torus: peripheral
components go to Weyl-ordered monomials, other components to Chebyshev
polynomials of their quantum traces. ``i_hat_q`` rewrites the result in the
q-level torus (q = w^4, X_i = Z_i^2), which is possible exactly when the
coordinates are integers.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .classical import classical_I
from .errors import (InternalParityViolation, KernelViolation, NoHighestTerm, NonRealizable,
                     NotInALattice, NotInQSubalgebra, PeelFailure)
from .lamination import IntegralLamination, NormalCurve, from_coords, from_mu
from .qtorus import EpsilonForm, QLaurent
from .scalars import LaurentPoly
from .skein import orbit_representative, quantum_trace


# --- the maps -------------------------------------------------------------

def i_omega(lam: IntegralLamination, threads: int = 1) -> QLaurent:
    """Image of a lamination in the w-level torus; the empty lamination gives 1.

    With ``threads > 1`` every trace is recomputed by the threaded state sum
    instead of coming from the cache; the result is the same.
    """
    if threads <= 1:
        return _i_omega(lam)
    rest, central = _split(lam)
    eps = lam.T.epsilon_matrix()
    out = QLaurent.one(eps)
    for curve, w in rest:
        out = out * chebyshev_of(quantum_trace(curve, threads=threads), w)
    if any(central):
        out = out * QLaurent.weyl(eps, central)
    return out


def chebyshev_of(t: QLaurent, w: int) -> QLaurent:
    """F_w(t) by F_0 = 2, F_1 = t, F_k = t F_(k-1) - F_(k-2)."""
    prev, cur = QLaurent.one(t.eps) * 2, t
    if w == 0:
        return prev
    for _ in range(w - 1):
        prev, cur = cur, t * cur - prev
    return cur


def _split(lam: IntegralLamination):
    """Non-peripheral components, and the summed mu of the peripheral ones.

    Peripheral images are central Weyl monomials, so they combine into one.
    """
    central = [0] * lam.T.num_edges
    rest = []
    for curve, w in lam.components:
        if curve.is_peripheral():
            central = [x + w * y for x, y in zip(central, curve.mu)]
        else:
            rest.append((curve, w))
    return tuple(rest), tuple(central)


@lru_cache(maxsize=256)
def _i_omega(lam: IntegralLamination) -> QLaurent:
    rest, central = _split(lam)
    out = _nonperipheral_image(lam.T, rest)
    if any(central):
        out = out * QLaurent.weyl(lam.T.epsilon_matrix(), central)
    return out


@lru_cache(maxsize=512)
def _nonperipheral_image(T, comps) -> QLaurent:
    out = None
    for curve, w in comps:
        f = _component(curve, w)
        out = f if out is None else out * f
    return QLaurent.one(T.epsilon_matrix()) if out is None else out


def _component(curve: NormalCurve, w: int) -> QLaurent:
    if curve.is_peripheral():
        # [Z^(w mu)] is the w-th power of [Z^mu], also for w < 0
        return QLaurent.weyl(curve.T.epsilon_matrix(), [w * x for x in curve.mu])
    if w < 1:
        raise ValueError("non-peripheral components need positive weight")
    rep, auto = orbit_representative(curve)
    f = _chebyshev_image(curve.T, rep, w)
    inverse = [0] * len(auto.edges)
    for e, g in enumerate(auto.edges):
        inverse[g] = e
    return f.permute(inverse, auto.reflect)


@lru_cache(maxsize=256)
def _chebyshev_image(T, corners, w: int) -> QLaurent:
    """F_w of the trace of the curve with the given corner counts.

    Uses F_1 = t, F_2 = t^2 - 2, F_k = t F_(k-1) - F_(k-2).
    """
    t = quantum_trace(NormalCurve.from_corner_counts(T, corners))
    if w == 1:
        return t
    if w == 2:
        return t * t - 2
    return t * _chebyshev_image(T, corners, w - 1) - _chebyshev_image(T, corners, w - 2)


def _integral_coords(lam: IntegralLamination) -> tuple[int, ...]:
    bad = [k + 1 for k, x in enumerate(lam.mu) if x % 2]
    if bad:
        a = ", ".join(str(Fraction(x, 2)) for x in lam.mu)
        raise NotInALattice(f"coordinates ({a}) are not integral at edge(s) {bad}")
    return tuple(x // 2 for x in lam.mu)


def i_hat_q(lam: IntegralLamination, threads: int = 1) -> QLaurent:
    """Image of a lamination with integer coordinates, written in q and X."""
    _integral_coords(lam)
    if threads <= 1:
        return _i_hat_q(lam)
    try:
        return i_omega(lam, threads=threads).to_q_form()
    except NotInQSubalgebra as exc:
        raise InternalParityViolation(f"{lam.describe()}: {exc}") from exc


@lru_cache(maxsize=256)
def _i_hat_q(lam: IntegralLamination) -> QLaurent:
    rest, central = _split(lam)
    try:
        return _nonperipheral_image(lam.T, rest).times_weyl_in_q_form(central)
    except NotInQSubalgebra as exc:
        raise InternalParityViolation(f"{lam.describe()}: {exc}") from exc


def expected_highest_term(eps: EpsilonForm, a: Sequence[int]) -> QLaurent:
    """q^(-sum_{i<j} e_ij a_i a_j) X^a."""
    return QLaurent.weyl(eps, a, symbol="X")


def classical_hat(lam: IntegralLamination) -> QLaurent:
    """The q = 1 image as a commutative polynomial in the X_i."""
    _integral_coords(lam)
    n = lam.T.num_edges
    flat = EpsilonForm.zero(n)
    out = {}
    for p, c in i_hat_q(lam).items():
        out[p] = LaurentPoly.const(c.at_one())
    return QLaurent(flat, out, "X")


# --- structure constants --------------------------------------------------

@dataclass(frozen=True)
class StructureConstantTable:
    """Rows (lamination, coefficient in Z[q, 1/q]) of a product expansion.

    Rows are sorted by decreasing lexicographic coordinate vector, so the
    first row is the leading one.
    """

    left: IntegralLamination
    right: IntegralLamination
    rows: tuple[tuple[IntegralLamination, LaurentPoly], ...]

    def __post_init__(self):
        seen = set()
        for lam, c in self.rows:
            if lam in seen:
                raise ValueError("repeated lamination in a structure-constant table")
            if c.is_zero():
                raise ValueError("zero coefficient in a structure-constant table")
            seen.add(lam)

    def __len__(self):
        return len(self.rows)

    def coefficient(self, lam: IntegralLamination) -> LaurentPoly:
        for other, c in self.rows:
            if other == lam:
                return c
        return LaurentPoly()

    def classical(self) -> tuple[tuple[IntegralLamination, int], ...]:
        """Coefficients at q = 1."""
        return tuple((lam, c.at_one()) for lam, c in self.rows)

    def reconstruct(self) -> QLaurent:
        eps = self.left.T.epsilon_matrix()
        out = QLaurent.zero(eps, "X")
        for lam, c in self.rows:
            out = out + i_hat_q(lam) * QLaurent.scalar(eps, c, "X")
        return out

    def to_json(self) -> dict:
        return {
            "left": [str(x) for x in self.left.coords()],
            "right": [str(x) for x in self.right.coords()],
            "rows": [{"coords": [int(x) for x in lam.coords()], "coefficient": c.to_json()}
                     for lam, c in self.rows],
        }


def product_expand(lam1: IntegralLamination, lam2: IntegralLamination,
                   max_steps: int = 100000) -> StructureConstantTable:
    """Expand i_hat_q(lam1) * i_hat_q(lam2) in the basis i_hat_q(l'').

    Peels the lexicographically highest term: its exponent vector is the
    coordinate vector of the next lamination and its coefficient, divided by
    that lamination's Weyl phase, is the structure constant.
    """
    if lam1.T != lam2.T:
        raise ValueError("laminations live on different triangulations")
    T = lam1.T
    eps = T.epsilon_matrix()
    rest = i_hat_q(lam1) * i_hat_q(lam2)
    rows = []
    last = None
    for _ in range(max_steps):
        if rest.is_zero():
            break
        a, coeff = rest.lex_highest_term()
        if last is not None and a >= last:
            raise PeelFailure(f"lex-highest term {a} did not decrease after {last}")
        last = a
        try:
            lam = from_coords(T, a)
        except NonRealizable as exc:
            raise PeelFailure(f"exponent vector {a} is not a lamination: {exc}") from exc
        c = coeff.shift(eps.weyl_phase(a))
        rows.append((lam, c))
        rest = rest - i_hat_q(lam) * QLaurent.scalar(eps, c, "X")
    else:
        raise PeelFailure(f"no termination after {max_steps} peeling steps")
    return StructureConstantTable(lam1, lam2, tuple(rows))


# --- theorem checks -------------------------------------------------------

def frobenius_check(lam: IntegralLamination, n: int) -> bool:
    """i_hat_q(N l) at a primitive N-th root of unity equals the classical
    image of l with every X-exponent multiplied by N.

    Both sides are compared in Z[q]/(Phi_N). With w = zeta^k, k = 4^-1 mod N,
    w^4 = q and w^N = 1, so no sign ambiguity enters.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError(f"Frobenius check needs an odd N >= 1, got {n}")
    _integral_coords(lam)
    lhs = i_hat_q(lam.scaled(n)).reduce_mod_cyclotomic(n)
    eps = lam.T.epsilon_matrix()
    rhs = {}
    for p, c in classical_hat(lam).items():
        rhs[tuple(n * x for x in p)] = c
    rhs = QLaurent(eps, rhs, "X").reduce_mod_cyclotomic(n)
    return lhs == rhs


def in_kernel(eps: EpsilonForm, a: Sequence[int]) -> bool:
    return not any(eps.apply(a))


def peripheral_shift_check(lam: IntegralLamination, a: Sequence[int]) -> bool:
    """i_hat_q(l + a) = q^(-sum_{i<j} e_ij a_i a_j) X^a i_hat_q(l) for a in ker e."""
    T = lam.T
    eps = T.epsilon_matrix()
    a = tuple(int(x) for x in a)
    if len(a) != T.num_edges:
        raise ValueError(f"expected {T.num_edges} entries, got {len(a)}")
    if not in_kernel(eps, a):
        raise KernelViolation(f"e * a = {eps.apply(a)} is not zero")
    base = _integral_coords(lam)
    shifted = from_coords(T, [x + y for x, y in zip(base, a)])
    lhs = i_hat_q(shifted)
    rhs = expected_highest_term(eps, a) * i_hat_q(lam)
    if lhs != rhs:
        return False
    # the difference must be made of peripheral curves
    diff = from_mu(T, [2 * x for x in a])
    return all(c.is_peripheral() for c, _ in diff.components)


@dataclass
class VerifyReport:
    """Outcome of the per-lamination checks; ``timings`` only when requested."""

    lamination: IntegralLamination
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    highest_term: str = ""
    positive: bool | None = None
    timings: dict[str, float] | None = None

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def to_text(self) -> str:
        coords = ",".join(str(x) for x in self.lamination.coords())
        lines = [f"lamination ({coords}): {self.lamination.describe()}",
                 f"highest term: {self.highest_term}"]
        for name, ok, detail in self.checks:
            lines.append(f"  {'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
        if self.positive is not None:
            lines.append(f"  note  coefficients {'all' if self.positive else 'not all'} positive at q = 1")
        if self.timings is not None:
            for k, v in self.timings.items():
                lines.append(f"  time  {k}: {v:.3f}s")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        out = {
            "coords": [str(x) for x in self.lamination.coords()],
            "lamination": self.lamination.describe(),
            "highest_term": self.highest_term,
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in self.checks],
            "positive_at_q1": self.positive,
            "passed": self.passed,
        }
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def verify_bundle(lam: IntegralLamination, timings: bool = False) -> VerifyReport:
    """Run the classical-limit, highest-term, coefficient-ring and star checks."""
    rep = VerifyReport(lam, timings={} if timings else None)
    eps = lam.T.epsilon_matrix()

    def timed(name, fn):
        t0 = time.perf_counter()
        try:
            return fn()
        finally:
            if rep.timings is not None:
                rep.timings[name] = round(time.perf_counter() - t0, 6)

    f = timed("i_omega", lambda: i_omega(lam))
    cl = timed("classical", lambda: classical_I(lam))
    ok = f.classical_limit() == cl
    rep.checks.append(("classical limit equals monodromy image", ok, ""))

    if any(x % 2 for x in lam.mu):
        rep.checks.append(("integral coordinates", False, "half-integral coordinates; q-form checks skipped"))
        rep.highest_term = QLaurent.from_monomial(eps, f.highest_term()).render()
        return rep
    try:
        g = timed("q_form", lambda: i_hat_q(lam))
        rep.checks.append(("coefficients in Z[q, 1/q]", True, ""))
    except InternalParityViolation as exc:
        rep.checks.append(("coefficients in Z[q, 1/q]", False, str(exc)))
        return rep
    a = _integral_coords(lam)
    want = expected_highest_term(eps, a)
    try:
        top = g.highest_term()
        got = QLaurent.from_monomial(eps, top, "X")
        rep.highest_term = got.render()
        rep.checks.append(("highest term is the Weyl-ordered X^a", got == want,
                           "" if got == want else f"expected {want.render()}"))
    except NoHighestTerm as exc:
        rep.checks.append(("highest term is the Weyl-ordered X^a", False, str(exc)))
    rep.checks.append(("star-invariant", g.star() == g, ""))
    rep.positive = all(c.at_one() > 0 for _, c in g.items())
    return rep
