from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quantum_duality.scalars import (LaurentPoly, cyclotomic, field_bits, pack_signed,
                                     reduce_cyclotomic, unpack_signed)

polys = st.dictionaries(st.integers(-12, 12), st.integers(-50, 50), max_size=8).map(LaurentPoly)


def naive_mul(a: LaurentPoly, b: LaurentPoly) -> dict:
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def test_no_stored_zeros():
    p = LaurentPoly({0: 0, 3: 2, -1: 0})
    assert p.coeffs == {3: 2}
    assert (p - p).is_zero()


def test_render():
    assert LaurentPoly({1: 1, -1: 1}).render("q") == "q + q^-1"
    assert LaurentPoly({4: -1, -4: -1}).render() == "-w^4 - w^-4"
    assert LaurentPoly().render() == "0"


@given(polys, polys)
def test_product_matches_convolution(a, b):
    assert (a * b).coeffs == naive_mul(a, b)


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(polys, st.integers(-20, 20))
def test_shift_is_multiplication_by_monomial(a, k):
    assert a.shift(k) == a * LaurentPoly.monomial(k)
    assert a.shift(k).shift(-k) == a


@given(polys, st.integers(-5, 5), st.integers(-5, 5))
def test_shifted_values_hash_and_compare_like_fresh_ones(a, j, k):
    shifted = a.shift(j).shift(k)
    fresh = LaurentPoly({e + j + k: v for e, v in a.items()})
    assert shifted == fresh
    assert hash(shifted) == hash(fresh)
    assert shifted.at_one() == a.at_one()


@given(polys)
def test_inverse_power_is_involution(a):
    assert a.inverse_power().inverse_power() == a
    assert a.inverse_power().at_one() == a.at_one()


@given(st.dictionaries(st.integers(-40, 40), st.integers(-10**9, 10**9).filter(bool), min_size=1))
def test_pack_round_trip(d):
    bits = field_bits(10**9)
    low, val = pack_signed(d, bits)
    assert unpack_signed(low, val, bits) == d


@given(st.dictionaries(st.integers(0, 20), st.integers(-99, 99).filter(bool), min_size=1),
       st.dictionaries(st.integers(0, 20), st.integers(-99, 99).filter(bool), min_size=1))
def test_packed_sum_and_product_are_fieldwise(a, b):
    bits = field_bits(99 * 99 * 21)
    la, va = pack_signed(a, bits)
    lb, vb = pack_signed(b, bits)
    prod = unpack_signed(la + lb, va * vb, bits)
    assert prod == naive_mul(LaurentPoly(a), LaurentPoly(b))


def test_field_bits_is_whole_bytes_with_sign_room():
    for bound in (0, 1, 127, 128, 2**40):
        bits = field_bits(bound)
        assert bits % 8 == 0
        assert bound < 1 << (bits - 1)


def test_cyclotomic_polynomials():
    assert cyclotomic(1) == (-1, 1)
    assert cyclotomic(3) == (1, 1, 1)
    assert cyclotomic(5) == (1, 1, 1, 1, 1)
    assert cyclotomic(9) == (1, 0, 0, 1, 0, 0, 1)
    assert cyclotomic(15) == (1, -1, 0, 1, -1, 1, 0, -1, 1)


@pytest.mark.parametrize("n", [1, 3, 5, 7, 9, 15])
def test_cyclotomic_divides_q_to_the_n_minus_one(n):
    # q^n - 1 is zero modulo every Phi_d with d | n
    p = LaurentPoly({n: 1, 0: -1})
    assert reduce_cyclotomic(p, n).is_zero()


def test_reduce_cyclotomic_examples():
    q = LaurentPoly.monomial(1)
    assert reduce_cyclotomic(q ** 3, 3) == 1
    assert reduce_cyclotomic(LaurentPoly({2: 1, 1: 1, 0: 1}), 3).is_zero()
    assert reduce_cyclotomic(q, 1) == 1
    # q^-1 = q^2 modulo q^3 = 1, and q^2 = -q - 1 modulo Phi_3
    assert reduce_cyclotomic(LaurentPoly.monomial(-1), 3) == LaurentPoly({1: -1, 0: -1})


@given(polys, polys, st.sampled_from([1, 3, 5, 7]))
def test_reduction_is_a_ring_map(a, b, n):
    r = lambda x: reduce_cyclotomic(x, n)
    assert r(a * b) == r(r(a) * r(b))
    assert r(a + b) == r(r(a) + r(b))


def test_reduction_agrees_with_numeric_root():
    import cmath
    n = 7
    zeta = cmath.exp(2j * cmath.pi / n)
    p = LaurentPoly({-9: 3, -2: -1, 0: 5, 4: 2, 13: -7})
    val = sum(c * zeta ** e for e, c in p.items())
    red = reduce_cyclotomic(p, n)
    assert abs(val - sum(c * zeta ** e for e, c in red.items())) < 1e-9
    assert red.min_degree() >= 0 and red.max_degree() < n - 1


def test_nonpositive_order_rejected():
    with pytest.raises(ValueError):
        cyclotomic(0)


def test_fraction_free():
    # coefficients stay integers through every operation
    p = LaurentPoly({1: 3}) * LaurentPoly({-1: 2})
    assert all(isinstance(v, int) and not isinstance(v, Fraction) for v in p.coeffs.values())
