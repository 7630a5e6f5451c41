import random

import pytest

from fcrystal import PrecisionError, make_ring
from fcrystal.linalg import (
    PMatrix,
    char_poly,
    det_valuation,
    inverse_scaled,
    kernel_basis,
    mat_poly_eval,
    matrix_inverse,
    saturated_span,
    smith_normal_form,
)


@pytest.fixture(scope="module")
def R():
    return make_ring(2, 2, 12)


def randmat(R, rng, d, m=None):
    m = m or d
    return PMatrix.from_rows(R, [[R.random_element(rng) for _ in range(m)] for _ in range(d)])


def test_snf_reconstruction_and_unit_transforms(R):
    rng = random.Random(0)
    for _ in range(50):
        d = rng.choice([1, 2, 3, 4])
        m = rng.choice([d, d + 1, max(1, d - 1)])
        A = randmat(R, rng, d, m)
        s = smith_normal_form(A)
        assert (s.P @ s.diagonal() @ s.Q).fingerprint() == A.fingerprint()
        assert s.P @ s.Pinv == PMatrix.identity(R, d)
        assert s.Q @ s.Qinv == PMatrix.identity(R, m)
        certified = [e for e in s.exps if e is not None]
        assert certified == sorted(certified)


def test_snf_examples():
    R = make_ring(2, 1, 10)
    # [[p^l1, u], [0, p^l2]] with u a unit: exponents (0, l1 + l2)
    assert smith_normal_form(PMatrix.from_rows(R, [[2, 1], [0, 4]])).exps == [0, 3]
    assert smith_normal_form(PMatrix.from_rows(R, [[2, 0], [0, 8]])).exps == [1, 3]
    assert smith_normal_form(PMatrix.identity(R, 3)).exps == [0, 0, 0]


def test_snf_precision_exhausted():
    R = make_ring(2, 1, 3)
    A = PMatrix.from_rows(R, [[8]])  # p^3 = 0 at precision 3
    with pytest.raises(PrecisionError):
        smith_normal_form(A, require_full_rank=True)


def test_char_poly_examples():
    R = make_ring(5, 1, 10)
    cp = char_poly(PMatrix.from_rows(R, [[0, 5], [1, 0]]))
    assert [c.coeffs[0] for c in cp] == [(-5) % R.pN, 0, 1]  # T^2 - p
    cp = char_poly(PMatrix.from_rows(R, [[3, 0], [0, 7]]))
    assert [c.coeffs[0] for c in cp] == [21, (-10) % R.pN, 1]  # (T-3)(T-7)


def test_char_poly_trace_det_and_cayley_hamilton(R):
    rng = random.Random(7)
    for _ in range(30):
        d = rng.choice([2, 3])
        A = randmat(R, rng, d)
        cp = char_poly(A)
        assert cp[-1] == R.one
        trace = sum((A.rows[i][i] for i in range(d)), R.zero)
        assert cp[-2] == -trace
        assert mat_poly_eval(cp, A).is_zero()


def test_det_valuation_multiplicative():
    R = make_ring(3, 1, 14)
    rng = random.Random(11)
    for _ in range(15):
        A = randmat(R, rng, 3)
        B = randmat(R, rng, 3)
        try:
            va, vb, vab = det_valuation(A), det_valuation(B), det_valuation(A @ B)
        except PrecisionError:
            continue
        assert vab == va + vb


def test_inverse_scaled_identity(R):
    rng = random.Random(3)
    for _ in range(20):
        A = randmat(R, rng, 3)
        try:
            B, k = inverse_scaled(A)
        except PrecisionError:
            continue
        prod = A @ B
        target = PMatrix.identity(R, 3).pshift(k)
        assert prod.fingerprint() == target.fingerprint()


def test_matrix_inverse_requires_unit():
    R = make_ring(2, 1, 10)
    with pytest.raises(Exception):
        matrix_inverse(PMatrix.from_rows(R, [[2, 0], [0, 1]]))
    inv = matrix_inverse(PMatrix.from_rows(R, [[1, 1], [0, 1]]))
    assert inv.fingerprint() == PMatrix.from_rows(R, [[1, -1], [0, 1]]).fingerprint()


def test_kernel_and_span(R):
    rng = random.Random(5)
    for _ in range(20):
        d = 4
        r = rng.choice([1, 2, 3])
        # build a matrix of known rank r with a p-power thrown in
        cols = [[R.random_element(rng) for _ in range(d)] for _ in range(r)]
        A = PMatrix(R, [[R.shift(cols[j][i], rng.choice([0, 1])) for j in range(r)] for i in range(d)])
        span = saturated_span(A)
        assert span.ncols <= r
        ker = kernel_basis(A.transpose())
        # rank-nullity over the fraction field at working precision
        assert span.ncols + ker.ncols == d
