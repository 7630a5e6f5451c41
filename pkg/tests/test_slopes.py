import random
from fractions import Fraction

import pytest

from fcrystal import FCrystal, hom_crystal, make_ring, permutation_crystal
from fcrystal.lattice import Lattice, lattice_contains
from fcrystal.linalg import PMatrix
from fcrystal.slopes import operator_slopes, slope_split


def test_diag_split():
    R = make_ring(2, 1, 24)
    A = PMatrix.from_rows(R, [[1, 0], [0, 4]])
    sp = slope_split(A, 0)
    assert (sp.plus_basis.ncols, sp.zero_basis.ncols, sp.minus_basis.ncols) == (1, 1, 0)
    assert sp.plus_slopes == [Fraction(2)] and sp.zero_slopes == [Fraction(0)]


def test_family_hom_split_dims():
    from fcrystal.lattice import lattices_equal

    M = FCrystal(2, 1, [[[2], [1]], [[0], [4]]])
    H = hom_crystal(M, M)
    sp = slope_split(H.matrix(48), H.scale)
    assert (sp.plus_basis.ncols, sp.zero_basis.ncols, sp.minus_basis.ncols) == (1, 2, 1)
    assert sp.plus_slopes == [Fraction(1)] and sp.minus_slopes == [Fraction(-1)]
    # the plus line is spanned by p^(l1) y2 (x) y1^* = (2, -1, 4, -2)
    work = sp.plus_basis.ring
    expect = Lattice(PMatrix.from_rows(work, [[2], [-1], [4], [-2]]))
    assert lattices_equal(Lattice(sp.plus_basis, 0), expect)


def test_isoclinic_everything_zero_part():
    P = permutation_crystal(2, 1, 8, [0, 2], [2, 1])
    H = hom_crystal(P, P)
    sp = slope_split(H.matrix(32), H.scale)
    assert sp.zero_basis.ncols == 4 and sp.plus_basis.ncols == 0


def test_scrambled_block_diagonal_recovery():
    # construct-then-scramble: conjugating by a unit matrix preserves the
    # slope dimensions of the linear operator (n = 1)
    R = make_ring(3, 1, 30)
    rng = random.Random(8)
    D = PMatrix.from_rows(R, [[1, 0, 0], [0, 3, 0], [0, 0, 27]])
    L = PMatrix.identity(R, 3)
    U = PMatrix.identity(R, 3)
    for i in range(3):
        for j in range(i):
            L.rows[i][j] = R.random_element(rng)
            U.rows[j][i] = R.random_element(rng)
    g = L @ U
    from fcrystal.linalg import matrix_inverse

    A = g @ D @ matrix_inverse(g)
    sp = slope_split(A, 1)
    assert (sp.plus_basis.ncols, sp.zero_basis.ncols, sp.minus_basis.ncols) == (1, 1, 1)
    assert sp.zero_slopes == [Fraction(0)]  # slope 1 of A minus scale 1


def test_operator_stability_of_parts():
    M = FCrystal(2, 1, [[[2], [1]], [[0], [4]]])
    H = hom_crystal(M, M)
    A = H.matrix(48)
    sp = slope_split(A, H.scale)
    for _name, basis, _slopes in sp.parts():
        if basis.ncols == 0:
            continue
        work = basis.ring
        Aw = A.at_ring(work)
        span = Lattice(basis, 0)
        img = Aw @ basis.sigma()
        assert all(lattice_contains(span, img.column(j)) for j in range(img.ncols))


def test_operator_slopes_match_newton():
    from fcrystal import newton_slopes

    M = FCrystal(2, 1, [[[2], [1]], [[0], [4]]])
    assert operator_slopes(M.matrix(16), 0) == newton_slopes(M)
    E = M
    for m in (2, 3):
        from fcrystal import base_extend

        Em = base_extend(E, m)
        assert operator_slopes(Em.matrix(24), 0) == newton_slopes(Em)
