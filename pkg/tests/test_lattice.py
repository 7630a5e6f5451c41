import random

import pytest

from fcrystal import ArgumentError, make_ring
from fcrystal.lattice import (
    Lattice,
    containment_exponent,
    lattice_contains,
    lattice_dual,
    lattice_image,
    lattice_intersect,
    lattice_preimage,
    lattice_sum,
)
from fcrystal.linalg import PMatrix


@pytest.fixture(scope="module")
def R():
    return make_ring(2, 1, 16)


def unimod(R, rng, d):
    L = PMatrix.identity(R, d)
    U = PMatrix.identity(R, d)
    for i in range(d):
        for j in range(i):
            L.rows[i][j] = R.random_element(rng)
            U.rows[j][i] = R.random_element(rng)
        U.rows[i][i] = R.from_int(rng.choice([1, 3, 5, 7]))
    return L @ U


def rand_lattice(R, rng, d):
    D = PMatrix.from_rows(
        R, [[2 ** rng.choice([0, 1, 2]) if i == j else 0 for j in range(d)] for i in range(d)]
    )
    return Lattice(unimod(R, rng, d) @ D)


def test_canonical_form_is_basis_invariant_and_idempotent(R):
    rng = random.Random(2)
    for _ in range(40):
        d = rng.choice([2, 3, 4])
        L = rand_lattice(R, rng, d)
        rebased = Lattice(L.mat @ unimod(R, rng, d), L.scale)
        assert L == rebased
        assert Lattice(L.mat, L.scale) == L


def test_identities(R):
    rng = random.Random(3)
    for _ in range(20):
        L = rand_lattice(R, rng, 3)
        assert lattice_intersect(L, L) == L
        assert lattice_sum(L, L) == L
        assert containment_exponent(L, L) == 0


def test_intersection_against_brute_membership(R):
    # span{(1,1)} + p Z^2, intersected with Z(1,0) + Z(0,p), checked
    # against exhaustive membership over Z/p^3 at p = 2
    L1 = lattice_sum(
        Lattice(PMatrix.from_rows(R, [[1], [1]])),
        Lattice(PMatrix.from_rows(R, [[2, 0], [0, 2]])),
    )
    L2 = Lattice(PMatrix.from_rows(R, [[1, 0], [0, 2]]))
    I = lattice_intersect(L1, L2)

    def members(L):
        return {
            (x, y)
            for x in range(8)
            for y in range(8)
            if lattice_contains(L, [R.from_int(x), R.from_int(y)])
        }

    assert members(I) == members(L1) & members(L2)


def test_containment_exponent_examples(R):
    full = Lattice.standard(R, 2)
    assert containment_exponent(full, Lattice(PMatrix.from_rows(R, [[8, 0], [0, 8]]))) == 3
    assert containment_exponent(Lattice(PMatrix.from_rows(R, [[8, 0], [0, 8]])), full) == 0


def test_containment_zero_iff_subset(R):
    rng = random.Random(4)
    for _ in range(25):
        La, Lb = rand_lattice(R, rng, 2), rand_lattice(R, rng, 2)
        subset = all(
            lattice_contains(Lb, La.mat.column(j), La.scale) for j in range(La.rank)
        )
        assert (containment_exponent(La, Lb) == 0) == subset


def test_image_preimage_roundtrip(R):
    rng = random.Random(5)
    for _ in range(15):
        U = unimod(R, rng, 3)
        L = rand_lattice(R, rng, 3)
        assert lattice_preimage(U, lattice_image(U, L)) == L
        assert lattice_image(U, lattice_preimage(U, L)) == L


def test_dual_involution(R):
    rng = random.Random(6)
    for _ in range(15):
        L = rand_lattice(R, rng, 3)
        assert lattice_dual(lattice_dual(L)) == L


def test_rank_deficient_intersection(R):
    Lpl = Lattice(PMatrix.from_rows(R, [[1, 0], [0, 2], [0, 0]]))
    Lq = Lattice(PMatrix.from_rows(R, [[2, 0], [0, 1], [0, 0]]))
    got = lattice_intersect(Lpl, Lq)
    assert got == Lattice(PMatrix.from_rows(R, [[2, 0], [0, 2], [0, 0]]))


def test_mismatched_ambient_rejected(R):
    L2 = Lattice.standard(R, 2)
    L3 = Lattice.standard(R, 3)
    with pytest.raises(ArgumentError):
        lattice_sum(L2, L3)
