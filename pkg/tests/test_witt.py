import random

import pytest
from hypothesis import given, settings, strategies as st

from fcrystal import make_ring
from fcrystal.errors import ArgumentError, ResourceError
from fcrystal.witt import (
    frobenius_w,
    ghost,
    ghost_add,
    ghost_mul,
    product_coord_polys,
    table_text,
    verschiebung_w,
    witt_add,
    witt_from_coords,
    witt_mul,
    witt_one,
    witt_poly_table,
    witt_product_coord,
    witt_to_zq,
    witt_zero,
    zq_to_witt,
)


def rand_witt(field, s, rng):
    return witt_from_coords(field, [field.elem_from_index(rng.randrange(field.q)) for _ in range(s)])


def test_sum_polynomials_first_coordinates():
    t = witt_poly_table(2, 2)
    # S_0 = a_0 + b_0
    assert t.sums[0] == {(1, 0, 0, 0): 1, (0, 0, 1, 0): 1}
    # S_1 = a_1 + b_1 - a_0 b_0  (derived by inverting w_1 = x_0^2 + 2 x_1)
    assert t.sums[1] == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): -1}
    t3 = witt_poly_table(3, 2)
    # S_1 = a_1 + b_1 - a_0^2 b_0 - a_0 b_0^2  (inverting w_1 = x_0^3 + 3 x_1)
    assert t3.sums[1] == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (2, 0, 1, 0): -1, (1, 0, 2, 0): -1}


def test_table_guard():
    with pytest.raises(ResourceError):
        witt_poly_table(2, 9)


def test_table_text_canonical():
    txt = table_text(witt_poly_table(2, 2))
    assert "S_1 = " in txt and "M_1 = " in txt
    assert txt == table_text(witt_poly_table(2, 2))


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_ghost_homomorphism_random(p, s):
    rng = random.Random(5 * p + s)
    for _ in range(25):
        a = [rng.randrange(-99, 99) for _ in range(s)]
        b = [rng.randrange(-99, 99) for _ in range(s)]
        ga, gb = ghost(p, a), ghost(p, b)
        assert ghost(p, ghost_add(p, a, b)) == tuple(x + y for x, y in zip(ga, gb))
        assert ghost(p, ghost_mul(p, a, b)) == tuple(x * y for x, y in zip(ga, gb))


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_ghost_of_verschiebung(coords):
    # ghost(theta(x))_0 = 0 and ghost(theta(x))_q = p * ghost(x)_{q-1}
    p = 3
    shifted = [0] + coords[:-1]
    g, gs = ghost(p, coords), ghost(p, shifted)
    assert gs[0] == 0
    for q in range(1, len(coords)):
        assert gs[q] == p * g[q - 1]


def test_unit_laws():
    R = make_ring(2, 2, 3)
    F = R.residue
    rng = random.Random(7)
    one, zero = witt_one(F, 3), witt_zero(F, 3)
    for _ in range(20):
        x = rand_witt(F, 3, rng)
        assert witt_add(x, zero) == x
        assert witt_mul(x, one) == x


def test_add_example_one_plus_one():
    F = make_ring(2, 1, 2).residue
    one = witt_one(F, 2)
    assert witt_add(one, one) == witt_from_coords(F, [(0,), (1,)])


def test_square_via_zq_oracle():
    R = make_ring(2, 1, 2)
    x = witt_from_coords(R.residue, [(1,), (1,)])
    sq = witt_mul(x, x)
    assert witt_to_zq(R, x) * witt_to_zq(R, x) == witt_to_zq(R, sq)


def test_product_coord_low_coordinates():
    # P_{r,0} is the product of the 0-coordinates
    polys = product_coord_polys(2, 3, 1)
    assert polys[0] == {(1, 1, 1): 1}
    # P_{2,1} over Z: a0^2 b1 + a1 b0^2 + 2 a1 b1
    polys = product_coord_polys(2, 2, 2)
    assert polys[1] == {(2, 0, 0, 1): 1, (0, 1, 2, 0): 1, (0, 1, 0, 1): 2}


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_product_coord_matches_iterated_mul(p, n):
    rng = random.Random(p + n)
    F = make_ring(p, n, 3).residue
    for _ in range(25):
        vecs = [rand_witt(F, 3, rng) for _ in range(4)]
        prod = vecs[0]
        for v in vecs[1:]:
            prod = witt_mul(prod, v)
        for q in range(3):
            assert witt_product_coord(4, q, vecs) == prod.coords[q]


def test_product_coord_range_check():
    F = make_ring(2, 1, 2).residue
    v = witt_one(F, 2)
    with pytest.raises(ArgumentError):
        witt_product_coord(2, 5, [v, v])


def test_verschiebung_shape():
    F = make_ring(2, 1, 2).residue
    assert verschiebung_w(witt_from_coords(F, [(1,), (0,)])) == witt_from_coords(F, [(0,), (1,)])


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)])
def test_sigma_theta_is_p(p, n):
    rng = random.Random(13 * p + n)
    for s in (2, 3, 4):
        R = make_ring(p, n, s)
        F = R.residue
        p_vec = zq_to_witt(R, R.from_int(p))
        for _ in range(10):
            x = rand_witt(F, s, rng)
            assert frobenius_w(verschiebung_w(x)) == verschiebung_w(frobenius_w(x)) == witt_mul(p_vec, x)


def test_frobenius_identity_over_prime_field():
    F = make_ring(5, 1, 3).residue
    rng = random.Random(3)
    for _ in range(10):
        x = rand_witt(F, 3, rng)
        assert frobenius_w(x) == x


@pytest.mark.parametrize("p,n,s", [(2, 1, 3), (2, 2, 3), (3, 2, 2), (3, 1, 4)])
def test_zq_roundtrip_and_ring_iso(p, n, s):
    R = make_ring(p, n, s)
    F = R.residue
    rng = random.Random(100 * p + 10 * n + s)
    for _ in range(30):
        x, y = rand_witt(F, s, rng), rand_witt(F, s, rng)
        assert zq_to_witt(R, witt_to_zq(R, x)) == x
        assert witt_to_zq(R, witt_add(x, y)) == witt_to_zq(R, x) + witt_to_zq(R, y)
        assert witt_to_zq(R, witt_mul(x, y)) == witt_to_zq(R, x) * witt_to_zq(R, y)
        assert witt_to_zq(R, frobenius_w(x)) == R.sigma(witt_to_zq(R, x))
    for a in [R.random_element(rng) for _ in range(10)]:
        assert witt_to_zq(R, zq_to_witt(R, a)) == a


def test_witt_to_zq_example():
    R = make_ring(2, 1, 2)
    assert witt_to_zq(R, witt_from_coords(R.residue, [(1,), (1,)])) == R.from_int(3)
