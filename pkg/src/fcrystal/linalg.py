"""Exact matrix algebra over W(F_{p^n})/p^N.

Everything here is pure value semantics.  Smith normal form uses
min-valuation pivoting (ties: smallest row, then smallest column) so that
outputs are deterministic; pivots must be certified below the working
precision or PrecisionError is raised through the valuation checks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArgumentError, PrecisionError
from .padic import Zq, ZqElem


class PMatrix:
    """Dense matrix of canonical ring elements."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: Zq, rows):
        self.ring = ring
        self.rows = [list(r) for r in rows]

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_rows(cls, ring, rows):
        return cls(ring, [[ring.coerce(x) for x in r] for r in rows])

    @classmethod
    def identity(cls, ring, d):
        return cls(ring, [[ring.one if i == j else ring.zero for j in range(d)] for i in range(d)])

    @classmethod
    def zero(cls, ring, nrows, ncols):
        return cls(ring, [[ring.zero] * ncols for _ in range(nrows)])

    # -- shape / access ---------------------------------------------------------

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def copy(self):
        return PMatrix(self.ring, [list(r) for r in self.rows])

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def submatrix(self, rows, cols):
        return PMatrix(self.ring, [[self.rows[i][j] for j in cols] for i in rows])

    def hstack(self, other):
        return PMatrix(self.ring, [a + b for a, b in zip(self.rows, other.rows)])

    def to_int_grid(self):
        return [[list(x.coeffs) for x in r] for r in self.rows]

    def fingerprint(self, modN=None):
        m = self.ring.p ** modN if modN else self.ring.pN
        return tuple(tuple(tuple(c % m for c in x.coeffs) for x in r) for r in self.rows)

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        return PMatrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return PMatrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return PMatrix(self.ring, [[-a for a in r] for r in self.rows])

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ArgumentError("matrix shape mismatch")
        zero = self.ring.zero
        cols = list(zip(*other.rows))
        return PMatrix(
            self.ring,
            [[sum((a * b for a, b in zip(row, col)), zero) for col in cols] for row in self.rows],
        )

    def scale(self, c):
        c = self.ring.coerce(c)
        return PMatrix(self.ring, [[c * a for a in r] for r in self.rows])

    def pshift(self, k):
        return PMatrix(self.ring, [[self.ring.shift(a, k) for a in r] for r in self.rows])

    def transpose(self):
        return PMatrix(self.ring, [list(c) for c in zip(*self.rows)])

    def sigma(self, power=1):
        R = self.ring
        return PMatrix(R, [[R.sigma(a, power) for a in r] for r in self.rows])

    def apply(self, vec):
        zero = self.ring.zero
        return [sum((a * x for a, x in zip(row, vec)), zero) for row in self.rows]

    def kron(self, other):
        """Kronecker product; row index (i,l) -> i*other.nrows + l."""
        R = self.ring
        out = []
        for i in range(self.nrows):
            for l in range(other.nrows):
                out.append(
                    [self.rows[i][j] * other.rows[l][k] for j in range(self.ncols) for k in range(other.ncols)]
                )
        return PMatrix(R, out)

    def __eq__(self, other):
        return (
            isinstance(other, PMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))
        )

    def is_zero(self):
        return all(x.is_zero() for r in self.rows for x in r)

    def min_valuation(self):
        """Smallest entry valuation, or None if zero at this precision."""
        best = None
        for r in self.rows:
            for x in r:
                v = self.ring.val(x)
                if v is not None and (best is None or v < best):
                    best = v
                    if best == 0:
                        return 0
        return best

    def at_ring(self, ring):
        return PMatrix(ring, [[ring.coerce(x) for x in r] for r in self.rows])

    def __repr__(self):
        return "PMatrix(" + "; ".join(" ".join(map(str, r)) for r in self.rows) + ")"


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass
class SNF:
    """A = P . diag(p^e) . Q with P, Q invertible over the ring.

    `exps` lists the diagonal valuations in ascending order; None entries
    mean the pivot vanished at the working precision (rank deficiency as
    far as p^N can see).
    """

    P: PMatrix
    Pinv: PMatrix
    exps: list
    Q: PMatrix
    Qinv: PMatrix

    @property
    def rank(self):
        return sum(1 for e in self.exps if e is not None)

    @property
    def loss(self):
        """Worst-case precision loss in the transform matrices: elimination
        multipliers divide by pivots and the errors compound across pivots,
        so P/Q entries are trustworthy down to N minus the sum of the
        certified pivot exponents."""
        return sum(e for e in self.exps if e is not None)

    def diagonal(self, ring=None):
        ring = ring or self.P.ring
        d = min(self.P.ncols, self.Q.nrows)
        D = PMatrix.zero(ring, self.P.ncols, self.Q.nrows)
        for i, e in enumerate(self.exps):
            if e is not None:
                D.rows[i][i] = ring.shift(ring.one, e)
        return D


def smith_normal_form(A: PMatrix, require_full_rank=False, max_rank=None) -> SNF:
    """max_rank stops the elimination after that many pivots; callers use
    it when the true rank is known so that below-rank junk (left over from
    earlier precision losses) cannot recontaminate the transforms."""
    R = A.ring
    n, m = A.nrows, A.ncols
    S = A.copy()
    P = PMatrix.identity(R, n)
    Pinv = PMatrix.identity(R, n)
    Q = PMatrix.identity(R, m)
    Qinv = PMatrix.identity(R, m)
    exps = []
    stop = min(n, m) if max_rank is None else min(n, m, max_rank)
    for l in range(stop):
        # pivot: minimal valuation, ties by smallest row then column
        pos, vmin = None, None
        for i in range(l, n):
            for j in range(l, m):
                v = R.val(S.rows[i][j])
                if v is not None and (vmin is None or v < vmin):
                    vmin, pos = v, (i, j)
        if pos is None:
            exps.extend([None] * (min(n, m) - l))
            break
        i0, j0 = pos
        _swap_rows(S, P, Pinv, l, i0)
        _swap_cols(S, Q, Qinv, l, j0)
        # normalize pivot to exactly p^v (divide the column by its unit part)
        u = R.shift(S.rows[l][l], -vmin)
        uinv = R.inv(u)
        _scale_col(S, Q, Qinv, l, uinv, u)
        for i in range(l + 1, n):
            x = S.rows[i][l]
            if not x.is_zero():
                q = R.shift(x, -vmin)  # exact: vmin is minimal
                _add_row(S, P, Pinv, i, l, -q)
        for j in range(l + 1, m):
            x = S.rows[l][j]
            if not x.is_zero():
                q = R.shift(x, -vmin)
                _add_col(S, Q, Qinv, j, l, -q)
        exps.append(vmin)
    if require_full_rank and any(e is None for e in exps):
        raise PrecisionError("rank not certified at this precision")
    return SNF(P, Pinv, exps, Q, Qinv)


def _swap_rows(S, P, Pinv, a, b):
    # S' = E S, so P picks up E on the right (column swap), Pinv on the left
    if a == b:
        return
    S.rows[a], S.rows[b] = S.rows[b], S.rows[a]
    for r in P.rows:
        r[a], r[b] = r[b], r[a]
    Pinv.rows[a], Pinv.rows[b] = Pinv.rows[b], Pinv.rows[a]


def _swap_cols(S, Q, Qinv, a, b):
    # S' = S E, so Q picks up E on the left (row swap), Qinv on the right
    if a == b:
        return
    for r in S.rows:
        r[a], r[b] = r[b], r[a]
    Q.rows[a], Q.rows[b] = Q.rows[b], Q.rows[a]
    for r in Qinv.rows:
        r[a], r[b] = r[b], r[a]


def _scale_col(S, Q, Qinv, j, c, cinv):
    # S col j *= c; maintained: A = P' S Q' with Q' tracking inverse column ops
    for r in S.rows:
        r[j] = r[j] * c
    for r in Qinv.rows:
        r[j] = r[j] * c
    Q.rows[j] = [cinv * x for x in Q.rows[j]]


def _add_row(S, P, Pinv, i, l, c):
    # S row i += c * row l
    S.rows[i] = [a + c * b for a, b in zip(S.rows[i], S.rows[l])]
    Pinv.rows[i] = [a + c * b for a, b in zip(Pinv.rows[i], Pinv.rows[l])]
    # P col l -= c * col i
    for r in P.rows:
        r[l] = r[l] - c * r[i]


def _add_col(S, Q, Qinv, j, l, c):
    # S col j += c * col l
    for r in S.rows:
        r[j] = r[j] + c * r[l]
    for r in Qinv.rows:
        r[j] = r[j] + c * r[l]
    # Q row l -= c * row j
    Q.rows[l] = [a - c * b for a, b in zip(Q.rows[l], Q.rows[j])]


def elementary_divisor_exponents(A: PMatrix) -> list:
    return smith_normal_form(A, require_full_rank=True).exps


# ---------------------------------------------------------------------------
# determinant data and inverses via SNF


def det_valuation(A: PMatrix) -> int:
    exps = elementary_divisor_exponents(A)
    return sum(exps)


def inverse_scaled(A: PMatrix):
    """(B, k) with A^(-1) = p^(-k) B, B integral with content 0.

    k is the largest elementary divisor exponent of A.
    """
    snf = smith_normal_form(A, require_full_rank=True)
    R = A.ring
    k = snf.exps[-1]
    d = len(snf.exps)
    # p^k A^(-1) = Qinv . diag(p^(k - e_i)) . Pinv
    mid = PMatrix.zero(R, d, d)
    for i, e in enumerate(snf.exps):
        mid.rows[i][i] = R.shift(R.one, k - e)
    return snf.Qinv @ mid @ snf.Pinv, k


def matrix_inverse(A: PMatrix) -> PMatrix:
    """Inverse of a matrix that is invertible over the ring (unit determinant)."""
    B, k = inverse_scaled(A)
    if k != 0:
        raise ArgumentError("matrix is not invertible over the ring")
    return B


def is_unit_matrix(A: PMatrix) -> bool:
    try:
        return det_valuation(A) == 0
    except PrecisionError:
        return False


# ---------------------------------------------------------------------------
# characteristic polynomial (Berkowitz, division-free)


def char_poly(A: PMatrix) -> list:
    """Monic characteristic polynomial of A, low degree first."""
    R = A.ring
    d = A.nrows
    if d != A.ncols:
        raise ArgumentError("characteristic polynomial needs a square matrix")
    if d == 0:
        return [R.one]
    # Berkowitz: iteratively build the coefficient vector via Toeplitz products
    coeffs = [R.one, -A.rows[0][0]]  # char poly of the 1x1 leading block, high->low
    for k in range(1, d):
        # principal k x k block data
        a = A.rows[k][k]
        row = A.rows[k][:k]       # R_k (row vector)
        col = [A.rows[i][k] for i in range(k)]  # C_k (column vector)
        Ak = [r[:k] for r in A.rows[:k]]
        # powers of Ak applied to col
        vecs = [col]
        for _ in range(k - 1):
            prev = vecs[-1]
            vecs.append([sum((Ak[i][j] * prev[j] for j in range(k)), R.zero) for i in range(k)])
        # Toeplitz column: [1, -a, -(R C), -(R Ak C), ...]
        t = [R.one, -a]
        for v in vecs:
            t.append(-sum((x * y for x, y in zip(row, v)), R.zero))
        new = []
        for i in range(k + 2):
            acc = R.zero
            for j in range(max(0, i - len(coeffs) + 1), min(i + 1, len(t))):
                acc = acc + t[j] * coeffs[i - j]
            new.append(acc)
        coeffs = new
    coeffs.reverse()
    return coeffs


def mat_poly_eval(poly_coeffs, A: PMatrix) -> PMatrix:
    """Evaluate a polynomial (low-first list of ring elements) at a matrix."""
    R = A.ring
    d = A.nrows
    acc = PMatrix.zero(R, d, d)
    for c in reversed(poly_coeffs):
        acc = acc @ A
        for i in range(d):
            acc.rows[i][i] = acc.rows[i][i] + c
    return acc


# ---------------------------------------------------------------------------
# saturated spans and kernels (subspace bases)


def saturated_span(A: PMatrix, expected_rank=None) -> PMatrix:
    """Basis of (column span of A over the fraction field) intersected with
    the standard lattice: the first rank columns of P in the SNF."""
    return saturated_span_with_loss(A, expected_rank)[0]


def saturated_span_with_loss(A: PMatrix, expected_rank=None):
    """(basis, loss): the basis entries are trustworthy mod p^(N - loss).
    Passing the true rank keeps junk pivots out of the transforms."""
    snf = smith_normal_form(A, max_rank=expected_rank)
    r = snf.rank
    return snf.P.submatrix(range(A.nrows), range(r)), snf.loss


def kernel_basis(A: PMatrix) -> PMatrix:
    """Saturated basis of the kernel of A over the fraction field."""
    snf = smith_normal_form(A)
    r = snf.rank
    return snf.Qinv.submatrix(range(A.ncols), range(r, A.ncols))


def complete_to_unimodular(S: PMatrix) -> tuple:
    """For a saturated d x m basis S, return (T, Tinv) with T invertible,
    T[:, :m] spanning the same lattice as S."""
    snf = smith_normal_form(S)
    if snf.rank != S.ncols or any(e != 0 for e in snf.exps):
        raise ArgumentError("basis is not saturated")
    return snf.P, snf.Pinv
