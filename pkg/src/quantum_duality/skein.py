"""Quantum trace of closed curves by a state sum on the split triangulation.

Picture conventions
-------------------
Each biangle is drawn with both sides vertical and oriented upward along the
edge direction (see ``surface.Biangle``); the triangle of side B sits to the
left and the triangle of side A to the right. Endpoints on each side are
ranked by elevation, rank 0 at the bottom. Looking down from high elevation,
a crossing whose over-strand climbs to the right resolves as
w^2 (horizontal smoothing) + w^-2 (vertical smoothing); the mirror crossing
swaps the two coefficients.

Arcs in a triangle are multiplied in order of increasing elevation. An arc
cutting off corner c has its first state on side c and its second state on
side c+1 (the counterclockwise order at that corner).
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import NotPeripheral
from .lamination import NormalCurve, Step
from .qtorus import EpsilonForm, QLaurent, QMonomial, weyl_order
from .scalars import LaurentPoly, field_bits, pack_signed, unpack_signed
from .surface import IdealTriangulation, SplitTriangulation, automorphisms, split

PLUS, MINUS = 1, -1

LOOP_VALUE = LaurentPoly({4: -1, -4: -1})

# weights of returning strands, keyed by (top state, bottom state)
LEFT_CAP = {(PLUS, MINUS): (-5, -1), (MINUS, PLUS): (-1, 1)}
RIGHT_CAP = {(MINUS, PLUS): (5, -1), (PLUS, MINUS): (1, 1)}


@dataclass(frozen=True)
class Endpoint:
    """End ``end`` ('in' or 'out') of arc number ``arc`` of a good position."""

    arc: int
    end: str


@dataclass(frozen=True)
class BiangleDiagram:
    """A tangle in one biangle.

    ``left`` and ``right`` list the endpoints on each side from the lowest
    elevation up. Before resolution every strand runs across, entering at
    left slot i and following the braid ``crossings``: each entry
    ``(i, over)`` crosses the strands in slots i and i+1, and ``over`` is
    +1 when the strand moving from slot i up to slot i+1 is on top, -1 when
    the other one is. After resolution ``crossings`` is empty and
    ``matching`` pairs the endpoints, written as ('L', rank) / ('R', rank);
    ``loops`` counts closed components.
    """

    edge: int
    left: tuple
    right: tuple
    crossings: tuple[tuple[int, int], ...] = ()
    matching: tuple | None = None
    loops: int = 0

    def resolved_matching(self) -> tuple:
        if self.crossings:
            raise ValueError("diagram still has crossings")
        if self.matching is not None:
            return self.matching
        return tuple((("L", i), ("R", i)) for i in range(len(self.left)))

    @property
    def size(self) -> int:
        return len(self.left)


def kauffman_resolve(d: BiangleDiagram) -> list[tuple[LaurentPoly, BiangleDiagram]]:
    """Expand every crossing by the skein relation with A = w^-2."""
    if not d.crossings:
        return [(LaurentPoly.const(1), d)]
    if d.matching is not None:
        raise ValueError("braid form expected")
    width = len(d.left)
    acc: dict[tuple, LaurentPoly] = {}
    order: list[tuple] = []
    for choice in itertools.product((0, 1), repeat=len(d.crossings)):
        power = 0
        links: list[tuple] = []
        cur: list[object] = [("L", i) for i in range(width)]
        fresh = 0
        for (i, over), vertical in zip(d.crossings, choice):
            if vertical:
                power += -2 * over
                links.append((cur[i], cur[i + 1]))
                a, b = ("n", fresh), ("n", fresh + 1)
                fresh += 2
                links.append((a, b))
                cur[i], cur[i + 1] = a, b
            else:
                power += 2 * over
        for i in range(width):
            links.append((cur[i], ("R", i)))
        matching, loops = _components(links, width)
        key = (matching, loops)
        if key not in acc:
            order.append(key)
            acc[key] = LaurentPoly()
        acc[key] = acc[key] + LaurentPoly.monomial(power)
    out = []
    for key in order:
        coeff = acc[key]
        if not coeff.is_zero():
            matching, loops = key
            out.append((coeff, BiangleDiagram(d.edge, d.left, d.right, (), matching, loops)))
    return out


def _components(links, width):
    """Boundary pairs and number of closed loops of a graph of degree <= 2."""
    adj: dict[object, list[int]] = {}
    for k, (a, b) in enumerate(links):
        adj.setdefault(a, []).append(k)
        adj.setdefault(b, []).append(k)
    used = set()
    pairs = []
    for start in [("L", i) for i in range(width)] + [("R", i) for i in range(width)]:
        if not adj[start] or adj[start][0] in used:
            continue
        node = start
        while True:
            k = next(x for x in adj[node] if x not in used)
            used.add(k)
            a, b = links[k]
            node = b if a == node else a
            if node[0] in ("L", "R"):
                break
        pairs.append(tuple(sorted((start, node))))
    loops = 0
    for k0 in range(len(links)):
        if k0 in used:
            continue
        loops += 1
        stack = [k0]
        while stack:
            k = stack.pop()
            if k in used:
                continue
            used.add(k)
            for node in links[k]:
                stack.extend(x for x in adj[node] if x not in used)
    return tuple(sorted(pairs)), loops


def _pair_kind(a, b):
    """('a'|'b'|'c', first, second); for caps first is the top endpoint."""
    if a[0] != b[0]:
        left, right = (a, b) if a[0] == "L" else (b, a)
        return "a", left, right
    top, bottom = (a, b) if a[1] > b[1] else (b, a)
    return ("b" if a[0] == "L" else "c"), top, bottom


def biangle_trace(d: BiangleDiagram, states: Mapping[tuple[str, int], int]) -> LaurentPoly:
    """Scalar trace of a crossing-free biangle diagram with the given states."""
    sign = 1
    power = 0
    for a, b in d.resolved_matching():
        kind, x, y = _pair_kind(a, b)
        sx, sy = states[x], states[y]
        if kind == "a":
            if sx != sy:
                return LaurentPoly()
            continue
        table = LEFT_CAP if kind == "b" else RIGHT_CAP
        if (sx, sy) not in table:
            return LaurentPoly()
        p, s = table[(sx, sy)]
        power += p
        sign *= s
    return LaurentPoly.monomial(power, sign) * (LOOP_VALUE ** d.loops)


def triangle_arc_trace(corner: int, s_first: int, s_second: int) -> tuple[int, int, int] | None:
    """Local trace of one arc cutting off ``corner``.

    Returns the exponents of the triangle generators (slots 0, 1, 2) of the
    Weyl-ordered monomial, or None when the state pair (-, +) kills it.
    """
    if s_first == MINUS and s_second == PLUS:
        return None
    e = [0, 0, 0]
    e[corner % 3] = s_first
    e[(corner + 1) % 3] = s_second
    return tuple(e)


@dataclass(frozen=True)
class ArcPlacement:
    index: int
    step: Step
    elevation: int


@dataclass(frozen=True)
class GoodPosition:
    """A weight-one curve placed at constant elevation over each triangle."""

    T: IdealTriangulation
    arcs: tuple[ArcPlacement, ...]
    biangles: tuple[BiangleDiagram, ...]
    ascent_edge: int | None

    def arcs_in_triangle(self, t: int) -> list[ArcPlacement]:
        return sorted((a for a in self.arcs if a.step.t == t), key=lambda a: a.elevation)

    def crossing_count(self) -> int:
        return sum(len(d.crossings) for d in self.biangles)

    def dump(self) -> str:
        """Plain-text description for golden-file comparisons."""
        lines = [f"good position: {len(self.arcs)} arcs, ascent edge "
                 f"{'-' if self.ascent_edge is None else self.ascent_edge + 1}"]
        for t in range(self.T.num_triangles):
            lines.append(f"triangle {t + 1}:")
            for a in self.arcs_in_triangle(t):
                st = a.step
                lines.append(f"  arc {a.index}: sides {st.s_in}->{st.s_out} corner {st.corner} "
                             f"turn {st.turn} elevation {a.elevation}")
        for d in self.biangles:
            if not d.left:
                continue
            word = " ".join(f"s{i}{'+' if o > 0 else '-'}" for i, o in d.crossings) or "(none)"
            lefts = " ".join(f"{e.arc}.{e.end}" for e in d.left)
            rights = " ".join(f"{e.arc}.{e.end}" for e in d.right)
            lines.append(f"biangle {d.edge + 1}: left [{lefts}] right [{rights}] braid {word}")
        return "\n".join(lines) + "\n"


def _strands(T: IdealTriangulation, curve: NormalCurve, order: Sequence[int]):
    """Per edge: list of (position, left endpoint, right endpoint) for the curve
    traversed in ``order`` (a rotation of step indices)."""
    r = len(order)
    per_edge: dict[int, list] = {}
    for j in range(r):
        st = curve.steps[order[j]]
        e = T.triangles[st.t][st.s_out]
        out_end = Endpoint(j, "out")
        in_end = Endpoint((j + 1) % r, "in")
        if T.edge_sides[e][0] == (st.t, st.s_out):
            pos = st.i_out
            left, right = in_end, out_end
        else:
            pos = curve.mu[e] - 1 - st.i_out
            left, right = out_end, in_end
        per_edge.setdefault(e, []).append((pos, left, right))
    return per_edge


def _diagram(edge: int, strands, elev) -> BiangleDiagram:
    """Redraw strands with endpoints sorted by elevation and record the braid."""
    strands = sorted(strands, key=lambda s: s[0])
    k = len(strands)
    hl = [elev[s[1].arc] for s in strands]
    hr = [elev[s[2].arc] for s in strands]
    left_order = sorted(range(k), key=lambda i: hl[i])
    right_order = sorted(range(k), key=lambda i: hr[i])
    right_rank = {s: i for i, s in enumerate(right_order)}
    slots = list(left_order)
    crossings = []
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            a, b = slots[i], slots[i + 1]
            if right_rank[a] > right_rank[b]:
                # a climbs from slot i to i+1; the strand with smaller position is on top
                over = 1 if a < b else -1
                crossings.append((i, over))
                slots[i], slots[i + 1] = b, a
                changed = True
    return BiangleDiagram(
        edge,
        tuple(strands[i][1] for i in left_order),
        tuple(strands[i][2] for i in right_order),
        tuple(crossings),
    )


def canonical_start(curve: NormalCurve) -> int:
    """Step index whose entering crossing opens the good position.

    The ascent biangle is the least crossed edge (lowest id on ties), entered
    at its lowest position.
    """
    best = None
    for k in range(curve.length):
        e, x = curve.crossing(k)
        key = (curve.mu[e], e, x)
        if best is None or key < best[0]:
            best = (key, k)
    return best[1]


def good_position(curve: NormalCurve, ST: SplitTriangulation | None = None,
                  start: int | None = None) -> GoodPosition:
    """Descending-elevation placement with a single ascent at the start edge."""
    T = curve.T
    r = curve.length
    if start is None:
        start = canonical_start(curve)
    order = [(start + j) % r for j in range(r)]
    arcs = tuple(ArcPlacement(j, curve.steps[order[j]], r - j) for j in range(r))
    elev = {a.index: a.elevation for a in arcs}
    ascent = curve.edge_in(start)
    per_edge = _strands(T, curve, order)
    diagrams = []
    for e in range(T.num_edges):
        d = _diagram(e, per_edge.get(e, []), elev)
        if d.crossings and e != ascent:
            raise AssertionError(f"crossing outside the ascent biangle at edge {e + 1}")
        diagrams.append(d)
    return GoodPosition(T, arcs, tuple(diagrams), ascent)


def peripheral_good_position(curve: NormalCurve, ST: SplitTriangulation | None = None) -> GoodPosition:
    """Crossing-free placement of a peripheral loop via edge orientations."""
    T = curve.T
    p = curve.peripheral_puncture()
    if p is None:
        raise NotPeripheral(f"curve [{curve.word_string()}] is not peripheral")
    if curve.turns[0] != "L":
        curve = curve.reversed()
    r = curve.length
    for start in _start_candidates(curve):
        order = [(start + j) % r for j in range(r)]
        ranks = _orient_and_rank(T, curve, order)
        if ranks is None:
            continue
        arcs = tuple(ArcPlacement(j, curve.steps[order[j]], ranks[j]) for j in range(r))
        elev = {a.index: a.elevation for a in arcs}
        per_edge = _strands(T, curve, order)
        diagrams = tuple(_diagram(e, per_edge.get(e, []), elev) for e in range(T.num_edges))
        if any(d.crossings for d in diagrams):
            continue
        return GoodPosition(T, arcs, diagrams, None)
    raise AssertionError("no starting triangle gives a crossing-free placement")


def is_weird(curve: NormalCurve, k: int) -> bool:
    """Whether the triangle of step k is very relevant and visited in the
    cyclic corner order c, c+1, c+2 starting from step k."""
    st = curve.steps[k]
    visits = [j for j in range(curve.length) if curve.steps[(k + j) % curve.length].t == st.t]
    if len(visits) != 3:
        return False
    corners = [curve.steps[(k + j) % curve.length].corner for j in visits]
    return corners[1] == (corners[0] + 1) % 3 and corners[2] == (corners[0] + 2) % 3


def _start_candidates(curve: NormalCurve):
    good = [k for k in range(curve.length) if not is_weird(curve, k)]
    bad = [k for k in range(curve.length) if is_weird(curve, k)]
    return good + bad


def _orient_and_rank(T, curve, order):
    r = len(order)
    steps = [curve.steps[i] for i in order]
    orient: dict[int, int] = {}
    for j in range(r):
        st = steps[j]
        e = T.triangles[st.t][st.s_out]
        if e in orient:
            continue
        toward_end = st.corner == st.s_out
        is_a = T.edge_sides[e][0] == (st.t, st.s_out)
        orient[e] = 1 if toward_end == is_a else -1
    # constraints lower -> higher within each triangle
    by_tri: dict[int, dict[int, int]] = {}
    for j, st in enumerate(steps):
        by_tri.setdefault(st.t, {})[st.corner] = j
    edges_after: dict[int, set] = {j: set() for j in range(r)}
    indeg = {j: 0 for j in range(r)}
    for t, at in by_tri.items():
        for s in range(3):
            c0, c1 = (s - 1) % 3, s
            if c0 in at and c1 in at:
                e = T.triangles[t][s]
                is_a = T.edge_sides[e][0] == (t, s)
                toward_end = (orient[e] == 1) == is_a
                lo, hi = (at[c0], at[c1]) if toward_end else (at[c1], at[c0])
                if hi not in edges_after[lo]:
                    edges_after[lo].add(hi)
                    indeg[hi] += 1
    # Kahn, preferring late traversal indices first so processing follows the loop
    ready = sorted((j for j in range(r) if indeg[j] == 0), reverse=True)
    ranks = {}
    nxt = 0
    while ready:
        j = ready.pop(0)
        ranks[j] = nxt
        nxt += 1
        for h in sorted(edges_after[j]):
            indeg[h] -= 1
            if indeg[h] == 0:
                ready.append(h)
        ready.sort(reverse=True)
    if len(ranks) != r:
        return None
    return ranks


def _connectors(gp: GoodPosition, resolved: Sequence[BiangleDiagram]):
    """Endpoint -> (connector id, role) and connector kinds."""
    where: dict[Endpoint, tuple[int, str]] = {}
    kinds = []
    for d in resolved:
        for a, b in d.resolved_matching():
            kind, x, y = _pair_kind(a, b)
            ex = d.left[x[1]] if x[0] == "L" else d.right[x[1]]
            ey = d.left[y[1]] if y[0] == "L" else d.right[y[1]]
            cid = len(kinds)
            kinds.append(kind)
            where[ex] = (cid, "x")
            where[ey] = (cid, "y")
    return where, kinds


def _evaluate_resolved(gp: GoodPosition, resolved: Sequence[BiangleDiagram]):
    """Sum over states of one crossing-free configuration, as a dict
    {(tensor exponents, w-power): coeff} in Weyl-ordered tensor monomials."""
    where, kinds = _connectors(gp, resolved)
    m3 = 3 * gp.T.num_triangles
    arcs = sorted(gp.arcs, key=lambda a: a.elevation)
    # key: tuple of (connector, pending sign) pairs; value: {(exps, power): coeff}
    table: dict[tuple, dict] = {(): {((0,) * m3, 0): 1}}
    for arc in arcs:
        st = arc.step
        ends = (Endpoint(arc.index, "in"), Endpoint(arc.index, "out"))
        new: dict[tuple, dict] = {}
        for key, poly in table.items():
            pending = dict(key)
            for opts in _end_options(ends, where, kinds, pending):
                (sig_in, sig_out), power, sign, pend2 = opts
                s_first = sig_in if st.corner == st.s_in else sig_out
                s_second = sig_out if st.corner == st.s_in else sig_in
                mono = triangle_arc_trace(st.corner, s_first, s_second)
                if mono is None:
                    continue
                base = 3 * st.t
                nkey = tuple(sorted(pend2.items()))
                slot = new.setdefault(nkey, {})
                for (exps, pw), c in poly.items():
                    pt = exps[base:base + 3]
                    # [P][m] = w^(P^T e m) [P + m] inside triangle t
                    phase = sum(pt[u] * (mono[(u + 1) % 3] - mono[(u - 1) % 3]) for u in range(3))
                    ne = list(exps)
                    ne[base] += mono[0]
                    ne[base + 1] += mono[1]
                    ne[base + 2] += mono[2]
                    k2 = (tuple(ne), pw + phase + power)
                    v = slot.get(k2, 0) + sign * c
                    if v:
                        slot[k2] = v
                    else:
                        slot.pop(k2, None)
        table = new
    return table.get((), {})


def _end_options(ends, where, kinds, pending):
    """Enumerate sign choices for the two ends of an arc given pending signs."""
    choices = [[]]
    for end in ends:
        cid, role = where[end]
        nxt = []
        for partial in choices:
            pend = dict(partial[-1][3]) if partial else dict(pending)
            signs = [x[0] for x in partial]
            power = partial[-1][1] if partial else 0
            sgn = partial[-1][2] if partial else 1
            if cid in pend:
                s = pend.pop(cid)
                nxt.append(partial + [(s, power, sgn, pend)])
                continue
            kind = kinds[cid]
            for s in (PLUS, MINUS):
                if kind == "a":
                    p2, g2, other = power, sgn, s
                else:
                    table = LEFT_CAP if kind == "b" else RIGHT_CAP
                    other = -s
                    pair = (s, other) if role == "x" else (other, s)
                    if pair not in table:
                        continue
                    dp, dg = table[pair]
                    p2, g2 = power + dp, sgn * dg
                pend2 = dict(pend)
                pend2[cid] = other
                nxt.append(partial + [(s, p2, g2, pend2)])
        choices = nxt
    for partial in choices:
        yield (partial[0][0], partial[1][0]), partial[-1][1], partial[-1][2], partial[-1][3]


def _tensor_to_edges(gp: GoodPosition, table: dict, eps: EpsilonForm) -> QLaurent:
    T = gp.T
    items = []
    for (exps, pw), c in table.items():
        k = []
        for e, ((ta, sa), (tb, sb)) in enumerate(T.edge_sides):
            x, y = exps[3 * ta + sa], exps[3 * tb + sb]
            if x != y:
                raise AssertionError(f"state-sum term not in the edge subalgebra at edge {e + 1}")
            k.append(x)
        items.append((tuple(k), pw - eps.weyl_phase(k), c))
    return QLaurent.from_items(eps, items)


def state_sum_resolved(gp: GoodPosition, threads: int = 1) -> QLaurent:
    """State sum after expanding every crossing by the skein relation.

    Exponentially many resolutions in the crossing count; kept as an
    independent reference for ``state_sum``.
    """
    eps = gp.T.epsilon_matrix()
    if not gp.arcs:
        return QLaurent.one(eps)
    expansions = [kauffman_resolve(d) for d in gp.biangles]
    combos = list(itertools.product(*expansions))

    def run(combo):
        coeff = LaurentPoly.const(1)
        loops = 0
        for c, d in combo:
            coeff = coeff * c
            loops += d.loops
        coeff = coeff * (LOOP_VALUE ** loops)
        table = _evaluate_resolved(gp, [d for _, d in combo])
        return _tensor_to_edges(gp, table, eps) * coeff

    if threads > 1 and len(combos) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, combos))
    else:
        parts = [run(c) for c in combos]
    total = QLaurent.zero(eps)
    for part in parts:
        total = total + part
    return total


def _crossing_weights() -> dict:
    """(over, in_lo, in_hi, out_lo, out_hi) -> ((w-power, coeff), ...) for one crossing."""
    out = {}
    for over in (1, -1):
        for a, b, c, d in itertools.product((PLUS, MINUS), repeat=4):
            w = []
            if a == c and b == d:
                w.append((2 * over, 1))
            if (b, a) in LEFT_CAP and (d, c) in RIGHT_CAP:
                p1, s1 = LEFT_CAP[(b, a)]
                p2, s2 = RIGHT_CAP[(d, c)]
                w.append((-2 * over + p1 + p2, s1 * s2))
            if w:
                out[(over, a, b, c, d)] = tuple(w)
    return out


_CROSSING = _crossing_weights()


def _factor_network(gp: GoodPosition):
    """Scalar factors of all biangles over integer variables.

    Variable 2*j is the 'in' end of arc j and 2*j+1 its 'out' end; larger ids
    are states on the slices between consecutive crossings. Factors are
    ('eq', u, v) for a strand running across and ('R', over, a, b, c, d) for a
    crossing between slots i, i+1 with a, b on its left and c, d on its right.
    """
    def vid(e: Endpoint) -> int:
        return 2 * e.arc + (e.end == "out")

    fresh = 2 * len(gp.arcs)
    factors = []
    for d in gp.biangles:
        cur = [vid(e) for e in d.left]
        local = []
        for i, over in d.crossings:
            a, b = fresh, fresh + 1
            fresh += 2
            local.append(["R", over, cur[i], cur[i + 1], a, b])
            cur[i], cur[i + 1] = a, b
        alias = {}
        for i, e in enumerate(d.right):
            if cur[i] >= 2 * len(gp.arcs):
                alias[cur[i]] = vid(e)
            else:
                factors.append(("eq", cur[i], vid(e)))
        for f in local:
            factors.append(tuple(f[:2]) + tuple(alias.get(x, x) for x in f[2:]))
    return factors


def _schedule(gp: GoodPosition, arcs: Sequence[ArcPlacement], factors):
    """For each arc (in processing order): factors to apply and variables to drop."""
    nvars = 2 * len(gp.arcs)
    when = {}
    for k, arc in enumerate(arcs):
        when[2 * arc.index] = k
        when[2 * arc.index + 1] = k
    apply_at = [[] for _ in arcs]
    for f in factors:
        ext = [x for x in f[-4:] if x < nvars] if f[0] == "R" else list(f[1:])
        apply_at[max((when[x] for x in ext), default=0)].append(f)
    last_use: dict[int, int] = {}
    for k, fs in enumerate(apply_at):
        for f in fs:
            for x in (f[2:] if f[0] == "R" else f[1:]):
                last_use[x] = max(last_use.get(x, -1), k)
    drop_at = [[] for _ in arcs]
    for x, k in last_use.items():
        drop_at[k].append(x)
    return apply_at, drop_at


def _apply_factors(assign: dict, factors) -> list[tuple[dict, dict]]:
    """Extend ``assign`` through ``factors``; returns (assignment, {power: coeff})."""
    branches = [(assign, {0: 1})]
    for f in factors:
        nxt = []
        for asg, wt in branches:
            if f[0] == "eq":
                if asg[f[1]] == asg[f[2]]:
                    nxt.append((asg, wt))
                continue
            over, vs = f[1], f[2:]
            free = [x for x in vs if x not in asg]
            for vals in itertools.product((PLUS, MINUS), repeat=len(free)):
                a2 = dict(asg)
                a2.update(zip(free, vals))
                w = _CROSSING.get((over,) + tuple(a2[x] for x in vs))
                if w is None:
                    continue
                prod: dict[int, int] = {}
                for p0, c0 in wt.items():
                    for p1, c1 in w:
                        prod[p0 + p1] = prod.get(p0 + p1, 0) + c0 * c1
                nxt.append((a2, {p: c for p, c in prod.items() if c}))
        branches = [b for b in nxt if b[1]]
    return branches


class _Packing:
    """Tensor exponents packed into one integer.

    Slot i occupies ``width`` bits at offset ``width * i`` holding the
    exponent plus a bias. Adding packed deltas adds the fields, since no
    field leaves its range.
    """

    def __init__(self, slots: int, bound: int):
        self.width = max(3, (2 * bound + 1).bit_length() + 1)
        self.bias = 1 << (self.width - 1)
        self.slots = slots
        self.zero = sum(self.bias << (self.width * i) for i in range(slots))

    def delta(self, offset: int, values: Sequence[int]) -> int:
        return sum(v << (self.width * (offset + u)) for u, v in enumerate(values))

    def unpack(self, key: int) -> tuple[int, ...]:
        mask = (1 << self.width) - 1
        return tuple(((key >> (self.width * i)) & mask) - self.bias for i in range(self.slots))


def _coefficient_bits(gp: GoodPosition, factors) -> int:
    # Every coefficient is a signed count of partial states: each arc picks two
    # signs, each slice variable one, and each crossing one of two terms.
    crossings = sum(1 for f in factors if f[0] == "R")
    slices = 2 * crossings
    return field_bits(1 << (2 * len(gp.arcs) + slices + crossings))


def _transfer(gp: GoodPosition, first: tuple[int, int] | None = None) -> dict:
    """Sum over states, as {(tensor exponents, w-power): coeff}.

    Arcs are taken in increasing elevation; the running table is keyed by the
    states of variables whose factors are still open. Below that, each tensor
    monomial carries its w-polynomial packed into one integer with a separate
    lowest power, so the phase of a triangle product only moves that power.
    ``first`` restricts the states of the first arc, which splits the sum into
    disjoint blocks.
    """
    arcs = sorted(gp.arcs, key=lambda a: a.elevation)
    factors = _factor_network(gp)
    apply_at, drop_at = _schedule(gp, arcs, factors)
    pk = _Packing(3 * gp.T.num_triangles, len(arcs))
    bits = _coefficient_bits(gp, factors)
    w = pk.width
    block_mask = (1 << (3 * w)) - 1
    field_mask = (1 << w) - 1
    bias = pk.bias
    table: dict[tuple, dict] = {(): {pk.zero: (0, 1)}}
    for k, arc in enumerate(arcs):
        st = arc.step
        vin, vout = 2 * arc.index, 2 * arc.index + 1
        in_first = st.corner == st.s_in
        shift = 3 * w * st.t
        drop = set(drop_at[k])
        new: dict[tuple, dict] = {}
        choices = [first] if (k == 0 and first is not None) else list(itertools.product((PLUS, MINUS), repeat=2))
        for key, poly in table.items():
            moves: dict[tuple, dict] = {}
            for s_in, s_out in choices:
                mono = triangle_arc_trace(st.corner, *((s_in, s_out) if in_first else (s_out, s_in)))
                if mono is None:
                    continue
                assign = dict(key)
                assign[vin], assign[vout] = s_in, s_out
                for asg, wt in _apply_factors(assign, apply_at[k]):
                    nkey = tuple(sorted((x, v) for x, v in asg.items() if x not in drop))
                    acc = moves.setdefault((nkey, mono), {})
                    for p, c in wt.items():
                        acc[p] = acc.get(p, 0) + c
            for (nkey, mono), wt in moves.items():
                wt = {p: c for p, c in wt.items() if c}
                if not wt:
                    continue
                w_low, w_val = pack_signed(wt, bits)
                m0, m1, m2 = mono
                v0, v1, v2 = m1 - m2, m2 - m0, m0 - m1
                base = pk.delta(3 * st.t, mono)
                cache: dict[int, int] = {}
                slot = new.setdefault(nkey, {})
                get = slot.get
                for key2, (low, val) in poly.items():
                    blk = (key2 >> shift) & block_mask
                    d = cache.get(blk)
                    if d is None:
                        x0 = (blk & field_mask) - bias
                        x1 = ((blk >> w) & field_mask) - bias
                        x2 = (blk >> (2 * w)) - bias
                        # [P][m] = w^(P^T e m) [P + m] inside the triangle
                        d = cache[blk] = w_low + x0 * v0 + x1 * v1 + x2 * v2
                    nk = key2 + base
                    low += d
                    val *= w_val
                    cur = get(nk)
                    if cur is None:
                        slot[nk] = (low, val)
                    elif cur[0] <= low:
                        slot[nk] = (cur[0], cur[1] + (val << (bits * (low - cur[0]))))
                    else:
                        slot[nk] = (low, val + (cur[1] << (bits * (cur[0] - low))))
        table = {}
        for nkey, slot in new.items():
            slot = {t: lv for t, lv in slot.items() if lv[1]}
            if slot:
                table[nkey] = slot
    if set(table) - {()}:
        raise AssertionError("open variables left after the last arc")
    out = {}
    for key, (low, val) in table.get((), {}).items():
        exps = pk.unpack(key)
        for p, c in unpack_signed(low, val, bits).items():
            out[(exps, p)] = c
    return out


def state_sum(gp: GoodPosition, threads: int = 1) -> QLaurent:
    """Sum over compatible states of biangle scalars times triangle products.

    Crossings are kept as local scalar factors joined by states on the slices
    between them, so no skein expansion is needed. With ``threads > 1`` the
    four state blocks of the first arc run concurrently; blocks are added in
    a fixed order.
    """
    eps = gp.T.epsilon_matrix()
    if not gp.arcs:
        return QLaurent.one(eps)
    blocks = list(itertools.product((PLUS, MINUS), repeat=2))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda f: _transfer(gp, f), blocks))
    else:
        parts = [_transfer(gp)]
    total = QLaurent.zero(eps)
    for part in parts:
        total = total + _tensor_to_edges(gp, part, eps)
    return total


@lru_cache(maxsize=4096)
def _cached_trace(T: IdealTriangulation, corners) -> QLaurent:
    curve = NormalCurve.from_corner_counts(T, corners)
    return state_sum(good_position(curve))


def orbit_representative(curve: NormalCurve):
    """(corner counts of the orbit representative, automorphism taking the curve there)."""
    best = None
    for auto in automorphisms(curve.T, reflections=True):
        m = auto.map_corner_counts(curve.corner_counts)
        if best is None or m < best[0]:
            best = (m, auto)
    return best


def quantum_trace(curve: NormalCurve, T: IdealTriangulation | None = None,
                  threads: int = 1, use_symmetry: bool = True) -> QLaurent:
    """Quantum trace of a weight-one closed curve.

    Traces are cached per orbit of the triangulation's combinatorial
    automorphisms and transported to other orbit members by relabelling
    generators (with inversion for mirror symmetries). ``use_symmetry=False``
    computes the state sum of the curve itself.
    """
    if threads > 1 or not use_symmetry:
        return state_sum(good_position(curve), threads=threads)
    rep, auto = orbit_representative(curve)
    tr = _cached_trace(curve.T, rep)
    inverse = [0] * len(auto.edges)
    for e, f in enumerate(auto.edges):
        inverse[f] = e
    return tr.permute(inverse, auto.reflect)


def weyl_laurent(eps: EpsilonForm, p: Sequence[int]) -> QLaurent:
    return QLaurent.from_monomial(eps, weyl_order(p, eps))
