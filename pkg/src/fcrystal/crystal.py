"""F-crystals over W(F_{p^n}) and their first-order invariants.

A crystal is a free module of rank r with a sigma-linear map phi whose
matrix A follows the column convention [phi(x)] = A . sigma([x]).  The
general object carries an integer scale c >= 0 with the true map equal
to p^(-c) A sigma; scale 0 is an honest F-crystal.  Entry data is kept
as exact integer coordinates so the same crystal can be rematerialized
at any working precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ArgumentError, PrecisionError
from .linalg import PMatrix, char_poly, det_valuation, inverse_scaled, is_unit_matrix, smith_normal_form
from .padic import Zq, make_ring
from .rpoly import root_valuations
from .slopes import linearization

PRECISION_CAP = 4096


class LatticedIsocrystal:
    """rank-r module with sigma-linear map p^(-scale) A sigma.

    `coeff_grid` holds the matrix entries at `doc_precision`.  Documents
    and hand-built crystals have exact integer entries, valid at every
    precision.  Derived objects (duals, hom crystals, base extensions)
    instead carry a `builder` that recomputes the matrix from the sources
    whenever a higher working precision is requested.
    """

    def __init__(self, p, n, coeff_grid, scale=0, doc_precision=None, builder=None):
        self.p = p
        self.n = n
        # coeff_grid[i][j] is the list of n integer coordinates of A[i][j]
        self.coeff_grid = tuple(
            tuple(tuple(int(c) for c in entry) for entry in row) for row in coeff_grid
        )
        self.rank = len(self.coeff_grid)
        if any(len(row) != self.rank for row in self.coeff_grid):
            raise ArgumentError("phi matrix must be square")
        if any(len(entry) != n for row in self.coeff_grid for entry in row):
            raise ArgumentError(f"each entry needs {n} coordinates")
        self.scale = scale
        self.doc_precision = doc_precision or self._default_precision()
        self._builder = builder
        self._block_cache = None

    def _default_precision(self):
        mx = max((abs(c) for row in self.coeff_grid for e in row for c in e), default=1)
        N = 1
        while self.p**N <= mx:
            N += 1
        return N + 1

    # -- materialization -------------------------------------------------------

    def ring(self, N=None) -> Zq:
        return make_ring(self.p, self.n, N or self.doc_precision)

    def matrix(self, N=None) -> PMatrix:
        N = N or self.doc_precision
        if self._builder is not None and N > self.doc_precision:
            return self._builder(N)
        R = self.ring(N)
        return PMatrix(R, [[R.element(e) for e in row] for row in self.coeff_grid])

    @classmethod
    def from_matrix(cls, A: PMatrix, scale=0, builder=None):
        R = A.ring
        grid = [[list(x.coeffs) for x in row] for row in A.rows]
        if scale == 0:
            return FCrystal(R.p, R.n, grid, R.N, builder)
        return LatticedIsocrystal(R.p, R.n, grid, scale, R.N, builder)

    def __repr__(self):
        kind = "FCrystal" if self.scale == 0 else f"LatticedIsocrystal(scale={self.scale})"
        return f"{kind}(p={self.p}, n={self.n}, rank={self.rank})"

    def __eq__(self, other):
        return (
            isinstance(other, LatticedIsocrystal)
            and (self.p, self.n, self.scale) == (other.p, other.n, other.scale)
            and self.coeff_grid == other.coeff_grid
        )

    # -- invariants -------------------------------------------------------------

    def hodge_data(self):
        if self._block_cache is None:
            self._block_cache = _with_precision_raise(self, _hodge_data_at)
        return self._block_cache


class FCrystal(LatticedIsocrystal):
    def __init__(self, p, n, coeff_grid, doc_precision=None, builder=None):
        super().__init__(p, n, coeff_grid, 0, doc_precision, builder)


@dataclass(frozen=True)
class HodgeData:
    exps: tuple          # e_1 <= ... <= e_r
    distinct: tuple      # f_1 < ... < f_t
    multiplicities: tuple
    blocks: tuple        # I_j as tuples of 0-based indices, ascending e

    @property
    def largest(self):
        return self.exps[-1]


def _with_precision_raise(M, fn, start=None):
    """Run fn(M, N) raising N until it stops raising PrecisionError and its
    result is stable across two consecutive doublings."""
    N = start or max(M.doc_precision, 2 * (M.rank + M.scale) + 4)
    results = []
    while N <= PRECISION_CAP:
        try:
            results.append(fn(M, N))
        except PrecisionError:
            results = []
        else:
            if len(results) >= 3 and results[-1] == results[-2] == results[-3]:
                return results[-1]
        N *= 2
    raise PrecisionError(f"no stable result below precision {PRECISION_CAP}")


def _hodge_data_at(M, N):
    exps = smith_normal_form(M.matrix(N), require_full_rank=True).exps
    distinct = sorted(set(exps))
    mult = [exps.count(f) for f in distinct]
    blocks = []
    for f in distinct:
        blocks.append(tuple(i for i, e in enumerate(exps) if e == f))
    return HodgeData(tuple(exps), tuple(distinct), tuple(mult), tuple(blocks))


# ---------------------------------------------------------------------------
# spec-level operations


def hodge_slopes(M: LatticedIsocrystal) -> HodgeData:
    """Valuations of the elementary divisors of A, with block data."""
    return M.hodge_data()


def f_basis(M: LatticedIsocrystal, N=None) -> PMatrix:
    """Basis matrix B whose columns v_i satisfy phi(v_i) = p^(e_i) w_i with
    (w_i) again a basis; B = sigma^(-1)(Qinv) for the SNF A = P D Q."""
    A = M.matrix(N)
    snf = smith_normal_form(A, require_full_rank=True)
    B = snf.Qinv.sigma(A.ring.n - 1)
    # postcondition is self-checking: p^(-e_i)-scaled images form a unit matrix
    images = A @ B.sigma()
    W = PMatrix(A.ring, [[A.ring.shift(images.rows[i][j], -snf.exps[j]) for j in range(M.rank)] for i in range(M.rank)])
    if not is_unit_matrix(W):
        raise PrecisionError("f-basis postcondition failed at this precision")
    return B


def newton_slopes(M: LatticedIsocrystal) -> list:
    """Ascending Newton slopes (Fractions, with multiplicity)."""
    return _with_precision_raise(M, _newton_at)


def _newton_at(M, N):
    A = M.matrix(N)
    vals = root_valuations(char_poly(linearization(A)))
    return [v / M.n - M.scale for v in vals]


def is_ordinary(M: LatticedIsocrystal) -> bool:
    """Hodge polygon equals Newton polygon."""
    hodge = [Fraction(e - M.scale) for e in M.hodge_data().exps]
    return newton_slopes(M) == sorted(hodge)


def is_isoclinic(M: LatticedIsocrystal) -> bool:
    return len(set(newton_slopes(M))) == 1


def twist(M: LatticedIsocrystal, g: PMatrix) -> LatticedIsocrystal:
    """The crystal (M, g phi) for an invertible-over-R matrix g; g's
    integer coordinates are taken as exact."""
    if not is_unit_matrix(g):
        raise ArgumentError("twist matrix must be invertible over the ring")
    g_grid = g.to_int_grid()

    def build(N):
        R = M.ring(N)
        gN = PMatrix(R, [[R.element(e) for e in row] for row in g_grid])
        return gN @ M.matrix(N)

    return LatticedIsocrystal.from_matrix(build(max(M.doc_precision, g.ring.N)), M.scale, builder=build)


def direct_sum(M1: LatticedIsocrystal, M2: LatticedIsocrystal) -> LatticedIsocrystal:
    if (M1.p, M1.n) != (M2.p, M2.n):
        raise ArgumentError("direct sum needs a shared base ring")
    c = max(M1.scale, M2.scale)

    def build(N):
        A1 = M1.matrix(N).pshift(c - M1.scale)
        A2 = M2.matrix(N).pshift(c - M2.scale)
        R = A1.ring
        r1, r2 = M1.rank, M2.rank
        rows = []
        for i in range(r1):
            rows.append(list(A1.rows[i]) + [R.zero] * r2)
        for i in range(r2):
            rows.append([R.zero] * r1 + list(A2.rows[i]))
        return PMatrix(R, rows)

    return LatticedIsocrystal.from_matrix(build(max(M1.doc_precision, M2.doc_precision) + c), c, builder=build)


def dual(M: LatticedIsocrystal) -> LatticedIsocrystal:
    """Dual crystal acting on the dual basis: matrix p^k (A^T)^(-1) at the
    smallest k making it integral, scale k - M.scale."""
    vdet = sum(M.hodge_data().exps)

    def build(N):
        A = M.matrix(N + vdet + 2)
        Binv, k = inverse_scaled(A.transpose())
        g = Binv.min_valuation()
        if (k, g) != build.norm:
            raise PrecisionError("dual normalization unstable across precisions")
        return Binv.pshift(-g).at_ring(M.ring(N))

    A0 = M.matrix(M.doc_precision + vdet + 2)
    Binv, k = inverse_scaled(A0.transpose())
    g = Binv.min_valuation()
    build.norm = (k, g)
    mat = Binv.pshift(-g).at_ring(M.ring(M.doc_precision))
    return LatticedIsocrystal.from_matrix(mat, k - g - M.scale, builder=build)


def hom_crystal(M1: LatticedIsocrystal, M2: LatticedIsocrystal) -> LatticedIsocrystal:
    """The Hom isocrystal on r2 x r1 matrices, h -> phi_2 h phi_1^(-1).

    With X flattened row-major, the operator matrix is V kron (U^(-1))^T;
    it is stored integrally with the content folded into the scale.
    """
    if (M1.p, M1.n) != (M2.p, M2.n):
        raise ArgumentError("hom crystal needs a shared base ring")
    vdet = sum(M1.hodge_data().exps)

    def assemble(N):
        U = M1.matrix(N + vdet + 2)
        V = M2.matrix(N + vdet + 2)
        Uinv, k = inverse_scaled(U)
        big = V.kron(Uinv.transpose())
        g = big.min_valuation()
        return big.pshift(-g).at_ring(make_ring(M1.p, M1.n, N)), k, g

    N0 = max(M1.doc_precision, M2.doc_precision) + 2
    mat, k, g = assemble(N0)
    norm = (k, g)

    def build(N):
        out, k2, g2 = assemble(N)
        if (k2, g2) != norm:
            raise PrecisionError("hom normalization unstable across precisions")
        return out

    return LatticedIsocrystal.from_matrix(mat, k - g + M2.scale - M1.scale, builder=build)


def base_extend(M: LatticedIsocrystal, m: int) -> LatticedIsocrystal:
    """Same matrix entries re-embedded in W(F_{p^(n m)})."""
    if m < 1:
        raise ArgumentError("extension degree must be positive")
    if m == 1:
        return M

    def build(N):
        emb = embedding_matrix(M.p, M.n, m, N)
        src = M.matrix(N)
        big = make_ring(M.p, M.n * m, N)
        return PMatrix(
            big,
            [
                [big.element(_apply_embedding(emb, tuple(x.coeffs), M.p, N)) for x in row]
                for row in src.rows
            ],
        )

    mat = build(M.doc_precision)
    grid = [[list(x.coeffs) for x in row] for row in mat.rows]
    if M.scale == 0:
        return FCrystal(M.p, M.n * m, grid, M.doc_precision, builder=build)
    return LatticedIsocrystal(M.p, M.n * m, grid, M.scale, M.doc_precision, builder=build)


def embedding_matrix(p, n, m, N):
    """Coordinates of (embedded generator)^i, i < n, in W(F_{p^(n m)}):
    the generator maps to the Hensel lift of the root of the degree-n
    minimal polynomial with the least index in the residue enumeration."""
    small = make_ring(p, n, N)
    big = make_ring(p, n * m, N)
    fld = big.residue
    root_res = None
    for k in range(fld.q):
        cand = fld.elem_from_index(k)
        acc = fld.zero
        for c in reversed(small.minpoly):
            acc = fld.add(fld.mul(acc, cand), (c % p,) + (0,) * (fld.n - 1))
        if not any(acc):
            root_res = cand
            break
    if root_res is None:
        raise ArgumentError("no embedding root found (non-compatible fields?)")
    # Hensel lift inside the big ring
    z = big.element(root_res)
    fpoly = [big.from_int(c) for c in small.minpoly]
    fprime = [big.from_int((i + 1) * c) for i, c in enumerate(small.minpoly[1:])]
    prec = 1
    while prec < N:
        fz = big._poly_eval(fpoly, z)
        fpz = big._poly_eval(fprime, z)
        z = z - fz * big.inv(fpz)
        prec *= 2
    cols = []
    cur = big.one
    for _ in range(n):
        cols.append(cur.coeffs)
        cur = cur * z
    return cols  # cols[i] = coords of gen^i


def _apply_embedding(emb, entry, p, N):
    pN = p**N
    out = [0] * len(emb[0])
    for c, col in zip(entry, emb):
        if c:
            for i, x in enumerate(col):
                out[i] = (out[i] + c * x) % pN
    return out


def permutation_crystal(p, n, N, e, pi) -> FCrystal:
    """Monomial crystal phi(v_i) = p^(e_i) v_(pi(i)); pi is 1-based one-line."""
    r = len(e)
    if sorted(pi) != list(range(1, r + 1)):
        raise ArgumentError("pi is not a permutation in one-line notation")
    if any(x < 0 for x in e):
        raise ArgumentError("exponents must be nonnegative")
    grid = [[[0] * n for _ in range(r)] for _ in range(r)]
    for i in range(r):
        grid[pi[i] - 1][i] = [p ** e[i] % p**N] + [0] * (n - 1)
    return FCrystal(p, n, grid, N)


@dataclass(frozen=True)
class PermutationCrystal:
    """Combinatorial form of a monomial crystal."""

    p: int
    n: int
    e: tuple
    pi: tuple  # 1-based one-line

    def to_fcrystal(self, N=None) -> FCrystal:
        N = N or (max(self.e, default=0) + 4)
        return permutation_crystal(self.p, self.n, N, list(self.e), list(self.pi))
