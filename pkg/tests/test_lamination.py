from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quantum_duality.errors import (InvalidCurve, NegativeNonPeripheral, NonRealizable,
                                    ParseError)
from quantum_duality.lamination import (NormalCurve, canonical_decompose, coords, curve_from_word,
                                        from_coords, from_mu, is_peripheral, lamination_from_curve,
                                        module_add, parse_coords, parse_word)
from quantum_duality.surface import builtin

PT = builtin("punctured_torus")
S4 = builtin("sphere_4")

half = Fraction(1, 2)


def reverse_word(word):
    # walking backwards, step k enters through e_(k+1), leaves through e_k, and turns the other way
    n = len(word)
    flip = {"L": "R", "R": "L"}
    return [(word[(k + 1) % n][0], flip[word[k][1]]) for k in reversed(range(n))]


def crossing_oracle(T, word):
    mu = [0] * T.num_edges
    for e, _ in word:
        mu[e - 1] += 1
    return tuple(mu)


def parity_ok(T, mu):
    return all((mu[i] + mu[j] + mu[k]) % 2 == 0 for i, j, k in T.triangles)


def test_coordinates_of_simple_curves():
    assert coords(lamination_from_curve(PT, "2L,3R")) == (0, half, half)
    assert coords(lamination_from_curve(PT, "2L,3R", 2)) == (0, 1, 1)
    assert coords(lamination_from_curve(PT, "1L,2R")) == (half, half, 0)


def test_negative_peripheral_coordinates():
    p = NormalCurve.peripheral(PT, 1)
    lam = canonical_decompose(PT, [(p, -1)])
    assert lam.coords() == (-1, -1, -1)
    assert from_coords(PT, [-1, -1, -1]) == lam


def test_from_coords_examples():
    assert from_coords(PT, [0, 1, 1]) == lamination_from_curve(PT, "2L,3R", 2)
    lam = from_coords(PT, ["1/2", "1", "1/2"])
    assert len(lam.components) == 1
    assert lam.components[0][1] == 1
    assert from_coords(PT, [1, 2, 1]) == lam.scaled(2)
    assert from_coords(PT, [0, 0, 0]).is_empty()
    assert from_coords(S4, [0] * 6).is_empty()


def test_from_coords_peels_peripheral_loops():
    lam = from_coords(PT, [1, 1, 1])
    (c, w), = lam.components
    assert c.is_peripheral() and w == 1
    mixed = from_coords(PT, [0, 0, 1])
    weights = sorted(w for _, w in mixed.components)
    assert weights == [-1, 2]
    assert [w for _, w in mixed.peripheral_part()] == [-1]


def test_non_realizable():
    with pytest.raises(NonRealizable):
        from_coords(PT, [0, half, 0])
    with pytest.raises(NonRealizable):
        from_coords(PT, [Fraction(1, 3), 0, 0])
    with pytest.raises(NonRealizable):
        from_coords(S4, [half, 0, 0, 0, 0, 0])


def test_canonical_decompose_merges_and_drops():
    c = curve_from_word(PT, "2L,3R")
    same = curve_from_word(PT, "3R,2L")
    assert canonical_decompose(PT, [(c, 1), (same, 1)]).components == ((c, 2),)
    assert canonical_decompose(PT, [(c, 1), (c, -1)]).is_empty()
    assert canonical_decompose(PT, [(c, 0)]).is_empty()
    with pytest.raises(NegativeNonPeripheral):
        canonical_decompose(PT, [(c, -1)])


def test_module_add_is_not_union():
    curve = lamination_from_curve(PT, "2L,3R")
    s = module_add(curve, from_coords(PT, [1, 1, 1]))
    assert s.coords() == (1, Fraction(3, 2), Fraction(3, 2))
    assert sorted(w for _, w in s.components) == [1, 1]
    # two crossing curves do not add to their union
    s = module_add(lamination_from_curve(PT, "2L,3R"), lamination_from_curve(PT, "1L,2R"))
    assert s.coords() == (half, 1, half)
    assert len(s.components) == 1


def test_peripheral_detection():
    assert is_peripheral(PT, "1R,3R,2R,1R,3R,2R") == 1
    assert is_peripheral(PT, "2L,3R") is None
    for p in S4.punctures:
        c = NormalCurve.peripheral(S4, p)
        assert set(c.turns) == {"R"}
        assert is_peripheral(S4, c) == p
        assert tuple(2 * x for x in S4.peripheral_vector(p)) == c.mu


@pytest.mark.parametrize("T,word", [(PT, "2L,3R"), (PT, "1L,2L,3R,2R"), (S4, "1R,2L,6R,5L"),
                                    (PT, "1R,3R,2R,1R,3R,2R")])
def test_curve_is_independent_of_direction_and_start(T, word):
    w = parse_word(word)
    c = curve_from_word(T, w)
    assert curve_from_word(T, reverse_word(w)) == c
    assert curve_from_word(T, w[1:] + w[:1]) == c
    assert c.reversed() == c
    assert c.mu == crossing_oracle(T, w)


def test_parse_errors():
    with pytest.raises(ParseError) as exc:
        parse_word("1L,2X")
    assert exc.value.token == "2X"
    with pytest.raises(ParseError) as exc:
        parse_coords("0,x,1")
    assert exc.value.token == "x"
    with pytest.raises(ParseError):
        parse_coords("0,1/3,1")
    assert parse_coords("0, 1/2 ,-1") == (0, half, -1)


def test_invalid_curves():
    with pytest.raises(InvalidCurve):
        curve_from_word(PT, "9L,2R")
    with pytest.raises(InvalidCurve):
        curve_from_word(PT, "1L")
    with pytest.raises(InvalidCurve):
        curve_from_word(PT, "1L,2L")
    with pytest.raises(InvalidCurve):
        curve_from_word(PT, "1L,2R,1L,2R")


@pytest.mark.parametrize("T", [PT, S4], ids=["pt", "s4"])
@given(data=st.data())
def test_realizable_iff_triangle_parity(T, data):
    mu = data.draw(st.lists(st.integers(-4, 6), min_size=T.num_edges, max_size=T.num_edges))
    if not parity_ok(T, mu):
        with pytest.raises(NonRealizable):
            from_mu(T, mu)
        return
    lam = from_mu(T, mu)
    assert lam.mu == tuple(mu)
    assert from_coords(T, lam.coords()) == lam
    total = [0] * T.num_edges
    for c, w in lam.components:
        assert w != 0
        assert w > 0 or c.is_peripheral()
        for e, x in enumerate(c.mu):
            total[e] += w * x
    assert total == list(mu)
    curves = [c for c, _ in lam.components]
    assert len(set(curves)) == len(curves)


@given(st.lists(st.integers(0, 4), min_size=3, max_size=3),
       st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_module_add_matches_coordinates(a, b):
    a = [x + (sum(a) % 2) * (i == 0) for i, x in enumerate(a)]
    b = [x + (sum(b) % 2) * (i == 0) for i, x in enumerate(b)]
    s = module_add(from_mu(PT, a), from_mu(PT, b))
    assert s.mu == tuple(x + y for x, y in zip(a, b))
