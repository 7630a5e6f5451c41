"""Lattices over W(F_{p^n}): canonical Hermite forms, sums, intersections,
images/preimages under (twisted) operators, and containment exponents.

A Lattice stores an integral basis matrix `mat` (columns are basis
vectors, rank = number of columns) together with an integer `scale` c:
the lattice it denotes is p^(-c) times the column span.  Canonical form
is column echelon with pivot rows strictly increasing, pivots exactly
p^v, later columns zero in earlier pivot rows, earlier columns reduced
mod the pivot of each pivot row, and content folded into the scale.
"""

from __future__ import annotations

from .errors import ArgumentError, PrecisionError
from .linalg import PMatrix, inverse_scaled, kernel_basis, smith_normal_form


class Lattice:
    __slots__ = ("ring", "mat", "scale")

    def __init__(self, mat: PMatrix, scale: int = 0, canonical: bool = False):
        self.ring = mat.ring
        self.mat = mat
        self.scale = scale
        if not canonical:
            self._canonicalize()

    # -- canonical form --------------------------------------------------------

    def _canonicalize(self):
        H = hermite_form(self.mat)
        g = H.min_valuation()
        if g is None:
            raise PrecisionError("lattice basis vanished at this precision")
        if g:
            H = H.pshift(-g)
        self.mat = H
        self.scale = self.scale - g

    @property
    def dim(self):
        return self.mat.nrows

    @property
    def rank(self):
        return self.mat.ncols

    def fingerprint(self, modN=None):
        return (self.rank, self.scale, self.mat.fingerprint(modN))

    def __eq__(self, other):
        return (
            isinstance(other, Lattice)
            and self.scale == other.scale
            and self.mat.fingerprint() == other.mat.fingerprint()
        )

    def __repr__(self):
        return f"Lattice(scale={self.scale}, mat={self.mat!r})"

    @classmethod
    def standard(cls, ring, d):
        return cls(PMatrix.identity(ring, d), 0, canonical=True)

    @classmethod
    def from_columns(cls, ring, cols, scale=0):
        mat = PMatrix(ring, [[ring.coerce(c[i]) for c in cols] for i in range(len(cols[0]))])
        return cls(mat, scale)


def hermite_form(A: PMatrix) -> PMatrix:
    """Deterministic column Hermite form over the local ring.

    Scans rows top to bottom; in each row picks the remaining column whose
    entry has minimal certified valuation (ties: smallest column), makes
    the pivot exactly p^v, clears the row to the right exactly, and
    reduces the row to the left modulo p^v.
    """
    R = A.ring
    H = A.copy()
    n, m = H.nrows, H.ncols
    next_col = 0
    pivots = []
    for i in range(n):
        if next_col == m:
            break
        best, vmin = None, None
        for j in range(next_col, m):
            v = R.val(H.rows[i][j])
            if v is not None and (vmin is None or v < vmin):
                vmin, best = v, j
        if best is None:
            continue
        _col_swap(H, next_col, best)
        u = R.shift(H.rows[i][next_col], -vmin)
        uin = R.inv(u)
        for k in range(n):
            H.rows[k][next_col] = H.rows[k][next_col] * uin
        for j in range(next_col + 1, m):
            x = H.rows[i][j]
            if not x.is_zero():
                q = R.shift(x, -vmin)
                for k in range(n):
                    H.rows[k][j] = H.rows[k][j] - q * H.rows[k][next_col]
        for j in range(next_col):
            q = _floor_div_ppow(R, H.rows[i][j], vmin)
            if not q.is_zero():
                for k in range(n):
                    H.rows[k][j] = H.rows[k][j] - q * H.rows[k][next_col]
        pivots.append((i, next_col, vmin))
        next_col += 1
    # columns past next_col reduced to zero at this precision: redundant
    # generators, dropped from the canonical form
    if next_col < m:
        H = H.submatrix(range(n), range(next_col))
    return H


def _col_swap(H, a, b):
    if a != b:
        for r in H.rows:
            r[a], r[b] = r[b], r[a]


def _floor_div_ppow(R, x, v):
    """q with x = q p^v + r, r the canonical representative mod p^v."""
    if v == 0:
        return x
    m = R.p**v
    return R.element(tuple(c // m for c in x.coeffs))


# ---------------------------------------------------------------------------
# lattice operations


def _common_scale(L1: Lattice, L2: Lattice):
    s = max(L1.scale, L2.scale)
    m1 = L1.mat.pshift(s - L1.scale)
    m2 = L2.mat.pshift(s - L2.scale)
    return m1, m2, s


def lattice_sum(L1: Lattice, L2: Lattice) -> Lattice:
    if L1.dim != L2.dim or L1.ring is not L2.ring:
        raise ArgumentError("lattices live in different ambient spaces")
    m1, m2, s = _common_scale(L1, L2)
    return Lattice(m1.hstack(m2), s)


def lattice_intersect(L1: Lattice, L2: Lattice) -> Lattice:
    """Intersection via the saturated kernel of [B1 | -B2].

    Integral solution pairs (y; z) with B1 y = B2 z are exactly the
    R-combinations of the saturated kernel basis, so B1 applied to its top
    block generates the intersection on the nose.
    """
    if L1.dim != L2.dim or L1.ring is not L2.ring:
        raise ArgumentError("lattices live in different ambient spaces")
    if L1.rank == L1.dim and L2.rank == L2.dim:
        # full-rank shortcut: dualize, add, dualize back
        return lattice_dual(lattice_sum(lattice_dual(L1), lattice_dual(L2)))
    m1, m2, s = _common_scale(L1, L2)
    K = kernel_basis(m1.hstack(-m2))
    if K.ncols == 0:
        raise ArgumentError("zero intersection is not a lattice")
    ytop = K.submatrix(range(m1.ncols), range(K.ncols))
    return Lattice(m1 @ ytop, s)


def lattice_dual(L: Lattice) -> Lattice:
    """Dual basis lattice: for p^(-c) B R^d the dual is p^c (B^T)^(-1) R^d."""
    if L.rank != L.dim:
        raise ArgumentError("dual needs a full-rank lattice")
    Binv, k = inverse_scaled(L.mat.transpose())
    return Lattice(Binv, k - L.scale)


def lattice_image(A: PMatrix, L: Lattice, op_scale: int = 0, sigma_power: int = 0) -> Lattice:
    """Image of L under x -> p^(-op_scale) A sigma^k(x)."""
    mat = L.mat.sigma(sigma_power) if sigma_power else L.mat
    return Lattice(A @ mat, L.scale + op_scale)


def lattice_preimage(A: PMatrix, L: Lattice, op_scale: int = 0, sigma_power: int = 0) -> Lattice:
    """Preimage of a full-rank L under x -> p^(-op_scale) A sigma^k(x); A
    must be invertible over the fraction field."""
    if L.rank != L.dim:
        raise ArgumentError("preimage needs a full-rank lattice")
    Ainv, k = inverse_scaled(A)
    mat = Ainv @ L.mat
    if sigma_power:
        mat = mat.sigma(-sigma_power % A.ring.n)
    return Lattice(mat, L.scale + k - op_scale)


def lattice_contains(L: Lattice, vec, vec_scale: int = 0) -> bool:
    """Is p^(-vec_scale) vec in L?  vec is a list of ring elements.

    Valuations at or above the working precision are treated as zero;
    callers that need certainty rerun at doubled precision.
    """
    R = L.ring
    snf = smith_normal_form(L.mat)
    y = snf.Pinv.apply([R.coerce(v) for v in vec])
    shift = L.scale - vec_scale
    for i in range(L.dim):
        v = R.val(y[i])
        need = (snf.exps[i] if i < len(snf.exps) and snf.exps[i] is not None else R.N) - shift
        if v is None:
            v = R.N
        if v < need:
            return False
    return True


def lattices_equal(L1: Lattice, L2: Lattice) -> bool:
    """Equality as lattices via mutual containment; unlike `==` (which
    compares canonical representations) this is insensitive to junk above
    the certified floor because it only reads low valuations."""
    if L1.rank != L2.rank or L1.dim != L2.dim:
        return False
    if L1.rank != L1.dim:
        return all(
            lattice_contains(L2, L1.mat.column(j), L1.scale) for j in range(L1.rank)
        ) and all(lattice_contains(L1, L2.mat.column(j), L2.scale) for j in range(L2.rank))
    return containment_exponent(L1, L2) == 0 and containment_exponent(L2, L1) == 0


def containment_exponent(L1: Lattice, L2: Lattice) -> int:
    """Smallest l >= 0 with p^l L1 contained in L2 (both full rank)."""
    if L1.rank != L1.dim or L2.rank != L2.dim:
        raise ArgumentError("containment exponent needs full-rank lattices")
    B2inv, k = inverse_scaled(L2.mat)
    M = B2inv @ L1.mat
    v = M.min_valuation()
    if v is None:
        raise PrecisionError("containment data vanished at this precision")
    # p^(-s1) B1 = p^(-s2) B2 . p^(s2 - s1 - k) (B2inv B1), entries' valuation
    # v + s2 - s1 - k must become >= 0 after adding l
    return max(0, -(v + L2.scale - L1.scale - k))
