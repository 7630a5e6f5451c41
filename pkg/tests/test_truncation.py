import random

import pytest

from fcrystal import (
    ArgumentError,
    FCrystal,
    base_extend,
    make_ring,
    permutation_crystal,
)
from fcrystal.linalg import PMatrix, is_unit_matrix
from fcrystal.truncation import (
    Subgroup,
    block_ldu,
    endo_number_hat,
    exact_sequence_check,
    hom_s,
    image_of_reduction,
    is_automorphism_mod,
    is_isomorphic_truncation,
    kernel_mod_prime_power,
    reduce_hom,
)

FAMILY = FCrystal(2, 1, [[[2], [1]], [[0], [4]]])
ORDINARY = FCrystal(2, 1, [[[1], [0]], [[0], [4]]])
RANK1 = FCrystal(2, 1, [[[2]]])


def test_kernel_mod_prime_power_small():
    # x + 2y = 0 mod 4: kernel generated by (2, 1) and (0, 2)
    gens = kernel_mod_prime_power([[1, 2]], 2, 2)
    sub = Subgroup.from_generators(gens, 2, 2, 2)
    assert sub.order == 4
    assert sub.contains([2, 1]) and sub.contains([0, 2]) and not sub.contains([1, 0])


def test_subgroup_canonical_form_and_elements():
    a = Subgroup.from_generators([[2, 0], [0, 1]], 2, 2, 2)
    b = Subgroup.from_generators([[2, 1], [0, 1]], 2, 2, 2)
    assert a == b
    assert len(a.elements()) == a.order == 8
    c = Subgroup.from_generators([[2, 1]], 2, 2, 2)
    assert c.order == 4 and c.contains([0, 2])


def test_rank1_hom_group_is_full():
    for s in (1, 2, 3):
        H = hom_s(RANK1, RANK1, s)
        assert H.order == 2**s


def test_ordinary_diagonal_only():
    H = hom_s(ORDINARY, ORDINARY, 1)
    assert H.order == 4
    assert all(v[1] == 0 and v[2] == 0 for v in H.elements())


def test_hom_group_closed_under_addition():
    H = hom_s(FAMILY, FAMILY, 2)
    els = H.elements()
    ps = 2**H.s
    for a in els[:6]:
        for b in els[:6]:
            assert H.contains([(x + y) % ps for x, y in zip(a, b)])


def test_witnesses_certify():
    from fcrystal.truncation import hom_witness_ok

    H = hom_s(FAMILY, FAMILY, 2)
    for w in H.witnesses:
        assert hom_witness_ok(FAMILY, FAMILY, 2, w)


def test_automorphism_membership():
    assert is_automorphism_mod(ORDINARY, [1, 0, 0, 1], 1)
    # unit off-diagonal is not admissible for the split ordinary crystal
    assert not is_automorphism_mod(ORDINARY, [1, 1, 0, 1], 1)
    assert not is_automorphism_mod(ORDINARY, [0, 0, 0, 1], 1)  # not invertible
    # 1 + p^s * anything stays an automorphism
    H = hom_s(FAMILY, FAMILY, 1)
    assert is_automorphism_mod(FAMILY, [1, 0, 0, 1], 1)


def test_aut_composition_closure():
    ring = make_ring(2, 1, 2)
    H = hom_s(FAMILY, FAMILY, 2)
    auts = [v for v in H.elements() if (v[0] * v[3] - v[1] * v[2]) % 2 == 1]
    for a in auts[:5]:
        for b in auts[:5]:
            A = PMatrix.from_rows(ring, [[a[0], a[1]], [a[2], a[3]]])
            B = PMatrix.from_rows(ring, [[b[0], b[1]], [b[2], b[3]]])
            C = A @ B
            vec = [C.rows[0][0].coeffs[0], C.rows[0][1].coeffs[0], C.rows[1][0].coeffs[0], C.rows[1][1].coeffs[0]]
            assert is_automorphism_mod(FAMILY, vec, 2), (a, b)


def test_reduction_images_weakly_decreasing():
    prev = None
    for t in (1, 2, 3, 4):
        img = image_of_reduction(FAMILY, FAMILY, t, 1)
        if prev is not None:
            for g in img.hnf:
                if any(g):
                    assert prev.contains(g)
            assert img.order <= prev.order
        prev = img


def test_reduce_hom_full_at_equal_levels():
    H = hom_s(FAMILY, FAMILY, 2)
    assert reduce_hom(H, 2) == H.subgroup


def test_exact_sequences():
    for M in (RANK1, ORDINARY, FAMILY):
        for s in (1, 2):
            rep = exact_sequence_check(M, M, s)
            assert rep.exact
            assert rep.order_s1 == rep.kernel_order * rep.image_order


def test_exact_sequences_random_rank2():
    rng = random.Random(21)
    R = make_ring(2, 1, 10)
    done = 0
    while done < 6:
        L = PMatrix.identity(R, 2)
        U = PMatrix.identity(R, 2)
        L.rows[1][0] = R.random_element(rng)
        U.rows[0][1] = R.random_element(rng)
        for i in range(2):
            z = R.random_element(rng)
            U.rows[i][i] = z if z.is_unit() else z + R.one
        D = PMatrix.from_rows(R, [[2 ** rng.randint(0, 2), 0], [0, 2 ** rng.randint(0, 2)]])
        M = FCrystal.from_matrix(L @ U @ D)
        rep = exact_sequence_check(M, M, 1)
        assert rep.exact
        done += 1


def test_endo_number_hat_values():
    res = endo_number_hat(FAMILY, FAMILY, cap=4, tower=(1, 2, 3, 4))
    assert res.conclusive and res.value == 2
    res = endo_number_hat(ORDINARY, ORDINARY, cap=2, tower=(1, 2))
    assert res.conclusive and res.value == 0
    res = endo_number_hat(RANK1, RANK1, cap=2, tower=(1, 2))
    assert res.conclusive and res.value == 0


def test_isomorphic_truncation_basics():
    R = make_ring(2, 1, 8)
    g = PMatrix.identity(R, 2)
    assert is_isomorphic_truncation(FAMILY, g, g, 1, search_bound=2**30)
    # g = 1 mod p^s is isomorphic to the untwisted crystal at level s
    g2 = PMatrix.from_rows(R, [[1 + 4, 0], [0, 1]])
    assert is_isomorphic_truncation(FAMILY, g2, None, 2, search_bound=2**30)


def test_isomorphic_truncation_budget():
    from fcrystal.errors import BudgetError

    R = make_ring(2, 1, 8)
    with pytest.raises(BudgetError):
        is_isomorphic_truncation(FAMILY, PMatrix.identity(R, 2), None, 2, search_bound=10)


def test_block_ldu_identity_and_roundtrip():
    R = make_ring(2, 1, 12)
    f, sizes = [0, 1, 3], [1, 2, 1]
    I4 = PMatrix.identity(R, 4)
    ldu = block_ldu(I4, f, sizes)
    assert ldu.multiply_back().fingerprint() == I4.fingerprint()
    assert all(b.is_zero() for b in ldu.Y.values())
    rng = random.Random(9)
    offs = [0, 1, 3, 4]
    done = 0
    while done < 10:
        rows = [[R.zero] * 4 for _ in range(4)]
        for l in range(3):
            for m in range(3):
                need = max(0, f[m] - f[l])
                for i in range(offs[l], offs[l + 1]):
                    for j in range(offs[m], offs[m + 1]):
                        rows[i][j] = R.shift(R.random_element(rng), need)
        for b in range(3):
            for i in range(offs[b], offs[b + 1]):
                if not rows[i][i].is_unit():
                    rows[i][i] = rows[i][i] + R.one
        N = PMatrix(R, rows)
        if not is_unit_matrix(N):
            continue
        ldu = block_ldu(N, f, sizes)
        assert ldu.multiply_back().fingerprint() == N.fingerprint()
        done += 1


def test_block_ldu_uniqueness_by_perturbation():
    R = make_ring(2, 1, 8)
    f, sizes = [0, 2], [1, 1]
    N = PMatrix.from_rows(R, [[1, 4], [3, 5]])
    ldu = block_ldu(N, f, sizes)
    base = ldu.multiply_back().fingerprint()
    # perturbing any factor changes the product
    ldu.Y[(2, 1)] = ldu.Y[(2, 1)] + PMatrix.from_rows(R, [[1]])
    assert ldu.multiply_back().fingerprint() != base


def test_block_ldu_membership_errors():
    R = make_ring(2, 1, 8)
    with pytest.raises(ArgumentError):
        block_ldu(PMatrix.from_rows(R, [[1, 1], [0, 1]]), [0, 2], [1, 1])
    with pytest.raises(ArgumentError):
        block_ldu(PMatrix.from_rows(R, [[2, 4], [1, 4]]), [0, 2], [1, 1])


def test_base_extended_hom_groups():
    E = base_extend(FAMILY, 2)
    H = hom_s(E, E, 1)
    assert H.order >= hom_s(FAMILY, FAMILY, 1).order
