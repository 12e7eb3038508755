import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantum_duality.classical import classical_trace
from quantum_duality.errors import NotPeripheral
from quantum_duality.lamination import NormalCurve, curve_from_word, from_mu
from quantum_duality.qtorus import QLaurent
from quantum_duality.scalars import LaurentPoly
from quantum_duality.skein import (LOOP_VALUE, MINUS, PLUS, BiangleDiagram, biangle_trace,
                                   canonical_start, good_position, kauffman_resolve,
                                   orbit_representative, peripheral_good_position, quantum_trace,
                                   state_sum, state_sum_resolved, triangle_arc_trace, weyl_laurent)
from quantum_duality.surface import builtin

PT = builtin("punctured_torus")
S4 = builtin("sphere_4")
w = LaurentPoly.monomial


def curves_in_box(T, box):
    seen = {}
    for mu in itertools.product(range(box + 1), repeat=T.num_edges):
        try:
            lam = from_mu(T, mu)
        except ValueError:
            continue
        for c, _ in lam.components:
            seen.setdefault(c, c)
    return sorted(seen, key=lambda c: (c.length, c.mu, c.corner_counts))


PT_CURVES = curves_in_box(PT, 4)
S4_CURVES = curves_in_box(S4, 2)
CROSSED = [c for c in PT_CURVES if good_position(c).crossing_count()]


def curve_strategy(curves):
    return st.sampled_from(curves)


# --- local pieces ------------------------------------------------------------

def test_kauffman_resolution_of_one_crossing():
    positive = kauffman_resolve(BiangleDiagram(0, (0, 1), (0, 1), ((0, 1),)))
    assert [(c, d.matching) for c, d in positive] == [
        (w(2), ((("L", 0), ("R", 0)), (("L", 1), ("R", 1)))),
        (w(-2), ((("L", 0), ("L", 1)), (("R", 0), ("R", 1)))),
    ]
    negative = kauffman_resolve(BiangleDiagram(0, (0, 1), (0, 1), ((0, -1),)))
    assert [c for c, _ in negative] == [w(-2), w(2)]


def test_reidemeister_two_cancels():
    d = BiangleDiagram(0, (0, 1), (0, 1), ((0, 1), (0, -1)))
    out = {}
    for c, d2 in kauffman_resolve(d):
        out[d2.matching] = out.get(d2.matching, LaurentPoly()) + c * LOOP_VALUE ** d2.loops
    out = {k: v for k, v in out.items() if not v.is_zero()}
    straight = ((("L", 0), ("R", 0)), (("L", 1), ("R", 1)))
    assert out == {straight: LaurentPoly.const(1)}


def test_uncrossed_diagram_is_its_own_resolution():
    d = BiangleDiagram(0, (0,), (0,))
    assert kauffman_resolve(d) == [(LaurentPoly.const(1), d)]


def test_biangle_trace_values():
    cap = BiangleDiagram(0, (0, 1), (), (), (((("L", 0), ("L", 1))),))
    assert biangle_trace(cap, {("L", 1): PLUS, ("L", 0): MINUS}) == -w(-5)
    assert biangle_trace(cap, {("L", 1): MINUS, ("L", 0): PLUS}) == w(-1)
    assert biangle_trace(cap, {("L", 1): PLUS, ("L", 0): PLUS}).is_zero()
    right = BiangleDiagram(0, (), (0, 1), (), (((("R", 0), ("R", 1))),))
    assert biangle_trace(right, {("R", 1): MINUS, ("R", 0): PLUS}) == -w(5)
    assert biangle_trace(right, {("R", 1): PLUS, ("R", 0): MINUS}) == w(1)
    loop = BiangleDiagram(0, (), (), (), (), 1)
    assert biangle_trace(loop, {}) == LOOP_VALUE == -w(4) - w(-4)
    through = BiangleDiagram(0, (0,), (0,))
    assert biangle_trace(through, {("L", 0): PLUS, ("R", 0): PLUS}) == 1
    assert biangle_trace(through, {("L", 0): PLUS, ("R", 0): MINUS}).is_zero()


def test_loop_is_sum_of_closed_caps():
    # a closed loop is a left cap glued to a right cap, summed over states
    left = {(PLUS, MINUS): -w(-5), (MINUS, PLUS): w(-1)}
    right = {(MINUS, PLUS): -w(5), (PLUS, MINUS): w(1)}
    total = LaurentPoly()
    for top, bottom in left:
        if (top, bottom) in right:
            total = total + left[(top, bottom)] * right[(top, bottom)]
    assert total == LOOP_VALUE


def test_triangle_arc_trace():
    assert triangle_arc_trace(0, PLUS, PLUS) == (1, 1, 0)
    assert triangle_arc_trace(2, PLUS, MINUS) == (-1, 0, 1)
    assert triangle_arc_trace(1, MINUS, MINUS) == (0, -1, -1)
    assert triangle_arc_trace(1, MINUS, PLUS) is None


# --- good positions ----------------------------------------------------------

def test_good_position_of_short_curve():
    c = curve_from_word(PT, "2L,3R")
    gp = good_position(c)
    assert len(gp.arcs) == 2
    assert gp.crossing_count() == 0
    assert gp.ascent_edge == 1
    assert sorted(a.elevation for a in gp.arcs) == [1, 2]


def test_dump_is_stable():
    gp = good_position(curve_from_word(PT, "2L,3R"))
    assert gp.dump() == (
        "good position: 2 arcs, ascent edge 2\n"
        "triangle 1:\n"
        "  arc 0: sides 1->2 corner 1 turn L elevation 2\n"
        "triangle 2:\n"
        "  arc 1: sides 2->1 corner 1 turn R elevation 1\n"
        "biangle 2: left [1.out] right [0.in] braid (none)\n"
        "biangle 3: left [1.in] right [0.out] braid (none)\n"
    )


def test_canonical_start_is_on_least_crossed_edge():
    for c in PT_CURVES + S4_CURVES:
        e, x = c.crossing(canonical_start(c))
        assert x == 0
        assert c.mu[e] == min(m for m in c.mu if m)


def test_crossings_only_in_ascent_biangle():
    assert CROSSED
    for c in CROSSED:
        gp = good_position(c)
        assert [d.edge for d in gp.biangles if d.crossings] == [gp.ascent_edge]


def test_peripheral_placement_has_no_crossings():
    for T in (PT, S4):
        for p in T.punctures:
            gp = peripheral_good_position(NormalCurve.peripheral(T, p))
            assert gp.crossing_count() == 0
    gp = peripheral_good_position(NormalCurve.peripheral(PT, 1))
    assert sorted(Counter(a.step.t for a in gp.arcs).items()) == [(0, 3), (1, 3)]
    with pytest.raises(NotPeripheral):
        peripheral_good_position(curve_from_word(PT, "2L,3R"))


# --- state sums --------------------------------------------------------------

def test_state_sum_of_short_curve():
    eps = PT.epsilon_matrix()
    f = state_sum(good_position(curve_from_word(PT, "2L,3R")))
    expected = (weyl_laurent(eps, (0, 1, 1)) + weyl_laurent(eps, (0, 1, -1))
                + weyl_laurent(eps, (0, -1, -1)))
    assert f == expected
    assert f.render() == "w^-2 * Z2*Z3 + w^2 * Z2*Z3^-1 + w^-2 * Z2^-1*Z3^-1"


def test_state_sum_of_peripheral_loop():
    eps = PT.epsilon_matrix()
    p = NormalCurve.peripheral(PT, 1)
    expected = weyl_laurent(eps, (2, 2, 2)) + weyl_laurent(eps, (-2, -2, -2))
    assert state_sum(peripheral_good_position(p)) == expected
    assert state_sum(good_position(p)) == expected


def test_sphere_peripheral_loops():
    eps = S4.epsilon_matrix()
    for p in S4.punctures:
        mu = NormalCurve.peripheral(S4, p).mu
        neg = tuple(-x for x in mu)
        expected = weyl_laurent(eps, mu) + weyl_laurent(eps, neg)
        assert quantum_trace(NormalCurve.peripheral(S4, p)) == expected


def test_empty_position_is_one():
    from quantum_duality.skein import GoodPosition
    gp = GoodPosition(PT, (), (), None)
    assert state_sum(gp) == QLaurent.one(PT.epsilon_matrix())


@pytest.mark.parametrize("c", PT_CURVES[:20] + CROSSED[:4] + S4_CURVES,
                         ids=lambda c: c.word_string())
def test_transfer_matches_expanded_skein(c):
    gp = good_position(c)
    assert state_sum(gp) == state_sum_resolved(gp)


@pytest.mark.parametrize("c", CROSSED[:3] + S4_CURVES[4:7], ids=lambda c: c.word_string())
def test_threads_do_not_change_the_result(c):
    gp = good_position(c)
    base = state_sum(gp)
    assert state_sum(gp, threads=2) == base
    assert state_sum(gp, threads=4) == base
    assert state_sum_resolved(gp, threads=3) == base


@pytest.mark.parametrize("c", PT_CURVES[:12] + S4_CURVES[:8], ids=lambda c: c.word_string())
def test_independent_of_starting_point(c):
    base = state_sum(good_position(c))
    for k in range(c.length):
        assert state_sum(good_position(c, start=k)) == base


def test_symmetry_cache_matches_direct_sum():
    for c in PT_CURVES + S4_CURVES:
        assert quantum_trace(c) == quantum_trace(c, use_symmetry=False)


def test_orbit_representative_is_stable_on_orbit():
    for c in S4_CURVES:
        rep, _ = orbit_representative(c)
        back = NormalCurve.from_corner_counts(S4, rep)
        assert orbit_representative(back)[0] == rep


@settings(max_examples=40)
@given(curve_strategy(PT_CURVES + S4_CURVES))
def test_trace_invariants(c):
    eps = c.T.epsilon_matrix()
    f = quantum_trace(c)
    assert f.star() == f
    for p, coeff in f.items():
        assert all(v > 0 for _, v in coeff.items())
        assert all((x - y) % 2 == 0 for x, y in zip(p, c.mu))
    assert f.highest_term_exponents() == c.mu
    assert f.highest_term() == weyl_laurent(eps, c.mu).highest_term()
    assert f.classical_limit() == classical_trace(c)
