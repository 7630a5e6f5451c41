"""Homomorphism groups of truncations mod p^s, reduction-image chains,
exact-sequence accounting, truncation-isomorphism search, and the block
LDU factorization of filtered unit matrices.

A map h mod p^s between crystals is admissible when some lift X mod
p^(s+e_r) satisfies, for an F-basis (v_i) of the source,

    X U sigma(B)[:, i] = V sigma(X) sigma(B)[:, i]   mod p^(s + e_i),

with U, V the phi matrices, B the F-basis matrix and e_i the Hodge
slopes.  sigma is Z/p^m-linear on W_m(F_{p^n}), so the conditions are a
finite homogeneous linear system over Z/p^m whose kernel is computed by
exact integer elimination; the group of maps mod p^s is its projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .crystal import FCrystal, LatticedIsocrystal, base_extend, f_basis
from .errors import ArgumentError, BudgetError, PrecisionError
from .linalg import PMatrix
from .padic import make_ring

# ---------------------------------------------------------------------------
# integer linear algebra mod p^m


def _pval(x, p, m):
    x %= p**m
    if x == 0:
        return m
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def kernel_mod_prime_power(T, p, m):
    """Generators of {x : T x = 0 mod p^m}; T a list of integer rows."""
    rows = [list(r) for r in T]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pm = p**m
    V = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    diag = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        # global pivot of minimal p-valuation in the remaining block
        best, vmin = None, m
        for i in range(r, nrows):
            for j in range(c, ncols):
                v = _pval(rows[i][j], p, m)
                if v < vmin:
                    vmin, best = v, (i, j)
                    if v == 0:
                        break
            if best and vmin == 0:
                break
        if best is None:
            break
        i0, j0 = best
        rows[r], rows[i0] = rows[i0], rows[r]
        for row in rows:
            row[c], row[j0] = row[j0], row[c]
        for vrow in V:
            vrow[c], vrow[j0] = vrow[j0], vrow[c]
        piv = rows[r][c] % pm
        unit = piv // p**vmin
        uinv = pow(unit, -1, pm)
        # normalize the pivot row (row op: does not affect the kernel)
        rows[r] = [(x * uinv) % pm for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] % pm:
                q = (rows[i][c] // p**vmin) % pm
                rows[i] = [(a - q * b) % pm for a, b in zip(rows[i], rows[r])]
        # column elimination to kill the pivot row right of c
        for j in range(c + 1, ncols):
            x = rows[r][j] % pm
            if x:
                q = (x // p**vmin) % pm
                for i in range(nrows):
                    rows[i][j] = (rows[i][j] - q * rows[i][c]) % pm
                for k in range(ncols):
                    V[k][j] = (V[k][j] - q * V[k][c]) % pm
        diag.append(vmin)
        r += 1
    gens = []
    for j in range(ncols):
        v = diag[j] if j < len(diag) else m
        mult = p ** (m - v) if v < m else 1
        if v == m:
            gens.append([V[k][j] % pm for k in range(ncols)])
        else:
            gens.append([(mult * V[k][j]) % pm for k in range(ncols)])
    return [g for g in gens if any(x % pm for x in g)]


def hnf_mod_prime_power(gens, K, p, s):
    """Canonical column HNF (Howell form) of the subgroup of (Z/p^s)^K
    generated by gens plus p^s Z^K.  Returns a K x K lower-triangular
    integer matrix with p-power diagonal; equality of subgroups is
    equality of forms.  When a pivot of valuation v is extracted, its
    p^(s-v)-multiple vanishes in the pivot row but still generates below,
    so it is kept in the working pool (the Howell closure)."""
    ps = p**s
    cols = [list(g) for g in gens] + [[ps if i == j else 0 for i in range(K)] for j in range(K)]
    cols = [c for c in cols if any(x % ps for x in c)]
    out = []
    for i in range(K):
        best, vmin = None, None
        for j, col in enumerate(cols):
            v = _pval(col[i], p, s)
            if vmin is None or v < vmin:
                vmin, best = v, j
        if best is None or vmin >= s:
            out.append([0] * K)
            continue
        pivot = cols.pop(best)
        piv = p**vmin
        unit = (pivot[i] // piv) % ps
        uinv = pow(unit, -1, ps)
        pivot = [(x * uinv) % ps for x in pivot]
        nxt = []
        for col in cols:
            if col[i] % ps:
                q = col[i] // piv
                col = [(a - q * b) % ps for a, b in zip(col, pivot)]
            if any(x % ps for x in col):
                nxt.append(col)
        wrap = [(x * p ** (s - vmin)) % ps for x in pivot]
        if any(x % ps for x in wrap):
            nxt.append(wrap)
        cols = nxt
        # reduce earlier pivot columns' row-i entries mod the pivot
        for prev in out:
            if prev[i] % ps:
                q = prev[i] // piv
                for k in range(K):
                    prev[k] = (prev[k] - q * pivot[k]) % ps
        out.append([x % ps for x in pivot])
    return out


@dataclass
class Subgroup:
    """Subgroup of (Z/p^s)^K in canonical HNF form."""

    p: int
    s: int
    K: int
    hnf: list

    @classmethod
    def from_generators(cls, gens, K, p, s):
        return cls(p, s, K, hnf_mod_prime_power(gens, K, p, s))

    @property
    def order(self):
        total = 1
        ps = self.p**self.s
        for i, col in enumerate(self.hnf):
            d = col[i] % ps
            total *= ps // (d if d else ps)
        return total

    def contains(self, vec):
        ps = self.p**self.s
        v = [x % ps for x in vec]
        for i, col in enumerate(self.hnf):
            if v[i] % ps == 0:
                continue
            d = col[i] % ps
            if d == 0 or v[i] % d:
                return False
            q = v[i] // d
            v = [(a - q * b) % ps for a, b in zip(v, col)]
        return all(x % ps == 0 for x in v)

    def elements(self):
        ps = self.p**self.s
        pivots = [(i, col) for i, col in enumerate(self.hnf) if col[i] % ps]
        counts = [ps // col[i] for i, col in pivots]
        total = self.order
        if total != 1:
            assert total == _prod(counts)
        out = []

        def rec(idx, acc):
            if idx == len(pivots):
                out.append(tuple(x % ps for x in acc))
                return
            _, col = pivots[idx]
            cur = list(acc)
            for t in range(counts[idx]):
                rec(idx + 1, cur)
                cur = [(a + b) % ps for a, b in zip(cur, col)]

        rec(0, [0] * self.K)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and (self.p, self.s, self.K) == (other.p, other.s, other.K)
            and self.hnf == other.hnf
        )


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


# ---------------------------------------------------------------------------
# the congruence system


def _require_crystal(M):
    if M.scale != 0:
        raise ArgumentError("truncation groups are defined for honest crystals (scale 0)")


def _flatten(Xmat, ring):
    out = []
    for row in Xmat.rows:
        for x in row:
            out.extend(x.coeffs)
    return out


def _congruence_columns(M1, M2, s):
    """The linear system for lifts X mod p^m, m = s + e_r; returns
    (columns, m, ring, shape) with one integer column per unknown basis
    element (entry position, power-basis index)."""
    _require_crystal(M1)
    _require_crystal(M2)
    if (M1.p, M1.n) != (M2.p, M2.n):
        raise ArgumentError("hom groups need a shared base ring")
    if s < 1:
        raise ArgumentError("truncation level must be >= 1")
    hodge = M1.hodge_data()
    e = hodge.exps
    m = s + e[-1]
    ring = make_ring(M1.p, M1.n, m)
    U = M1.matrix(m)
    V = M2.matrix(m)
    B = f_basis(M1, m)
    C = U @ B.sigma()  # [phi_1(v_i)] as columns
    sB = B.sigma()
    r1, r2, n = M1.rank, M2.rank, M1.n
    columns = []
    for i2 in range(r2):
        for j2 in range(r1):
            for t in range(n):
                X = PMatrix.zero(ring, r2, r1)
                X.rows[i2][j2] = ring.element(tuple(1 if k == t else 0 for k in range(n)))
                D = (X @ C) - (V @ X.sigma() @ sB)
                # scale column i by p^(e_r - e_i) to make every congruence mod p^m
                col = []
                for a in range(r2):
                    for i in range(r1):
                        x = ring.shift(D.rows[a][i], e[-1] - e[i])
                        col.extend(x.coeffs)
                columns.append(col)
    rows = [[columns[k][idx] for k in range(len(columns))] for idx in range(r2 * r1 * n)]
    return rows, m, ring, (r2, r1, n)


@dataclass
class HomGroup:
    """Hom group of truncations mod p^s as explicit F_{p^n}-points:
    generators are integer coordinate vectors of matrices mod p^s, with
    witness lifts mod p^(s + e_r)."""

    p: int
    n: int
    s: int
    lift_level: int
    shape: tuple  # (r2, r1)
    generators: list
    witnesses: list
    subgroup: Subgroup

    @property
    def order(self):
        return self.subgroup.order

    def contains(self, vec):
        return self.subgroup.contains(vec)

    def elements(self):
        return self.subgroup.elements()

    def matrices(self, ring=None):
        ring = ring or make_ring(self.p, self.n, self.s)
        return [vec_to_matrix(v, self.shape, ring) for v in self.generators]


def vec_to_matrix(vec, shape, ring):
    r2, r1 = shape
    n = ring.n
    rows = []
    idx = 0
    for _ in range(r2):
        row = []
        for _ in range(r1):
            row.append(ring.element(tuple(vec[idx : idx + n])))
            idx += n
        rows.append(row)
    return PMatrix(ring, rows)


def hom_s(M1: LatticedIsocrystal, M2: LatticedIsocrystal, s: int) -> HomGroup:
    """Group of homomorphisms of truncations mod p^s (F_{p^n}-points)."""
    rows, m, ring, (r2, r1, n) = _congruence_columns(M1, M2, s)
    p = M1.p
    kernel = kernel_mod_prime_power(rows, p, m)
    ps = p**s
    projected = [[x % ps for x in g] for g in kernel]
    K = n * r1 * r2
    sub = Subgroup.from_generators(projected, K, p, s)
    return HomGroup(p, n, s, m, (r2, r1), projected, kernel, sub)


def hom_witness_ok(M1, M2, s, witness):
    """Check a lift vector mod p^(s+e_r) against the congruences."""
    rows, m, ring, _ = _congruence_columns(M1, M2, s)
    pm = M1.p**m
    for row in rows:
        if sum(a * b for a, b in zip(row, witness)) % pm:
            return False
    return True


def is_automorphism_mod(M: LatticedIsocrystal, h, s: int, lifted: bool = False) -> bool:
    """h is an automorphism of the truncation mod p^s: invertible mod p and
    admissible.  `h` is an integer coordinate vector (or PMatrix); when
    `lifted` the coordinates are taken mod p^(s+e_r) and checked directly,
    otherwise membership in End_s is decided by the solver."""
    if isinstance(h, PMatrix):
        h = _flatten(h, h.ring)
    ring1 = make_ring(M.p, M.n, 1)
    r = M.rank
    n = M.n
    red = [c % M.p for c in h]
    hbar = vec_to_matrix(red, (r, r), ring1)
    from .linalg import is_unit_matrix

    if not is_unit_matrix(hbar):
        return False
    if lifted:
        return hom_witness_ok(M, M, s, list(h))
    group = hom_s(M, M, s)
    return group.contains([c % M.p**s for c in h])


def reduce_hom(group: HomGroup, s: int) -> Subgroup:
    """Image of the group under reduction mod p^s (s <= group.s)."""
    if s > group.s:
        raise ArgumentError("can only reduce to a smaller level")
    ps = group.p**s
    gens = [[x % ps for x in g] for g in group.generators]
    return Subgroup.from_generators(gens, group.subgroup.K, group.p, s)


def image_of_reduction(M1, M2, t: int, s: int) -> Subgroup:
    """Image of pi_{t,s}: Hom_t -> Hom_s as a canonical subgroup."""
    if t < s:
        raise ArgumentError("need t >= s")
    return reduce_hom(hom_s(M1, M2, t), s)


@dataclass
class EndoNumberResult:
    value: int
    conclusive: bool
    per_field: dict  # extension degree -> (onset or None, chain orders)
    cap: int
    note: str = (
        "stationarity onsets computed from F_{p^(n m)}-points; exact once"
        " the tower has stabilized"
    )


def endo_number_hat(M1, M2, cap: int, tower=(1, 2, 3, 4)) -> EndoNumberResult:
    """Stabilization onset of Im(pi_{1+e,1}) for e = 0..cap, swept over a
    tower of base extensions; the value once the two largest fields agree."""
    per_field = {}
    for mdeg in sorted(tower):
        E1 = base_extend(M1, mdeg)
        E2 = base_extend(M2, mdeg)
        images = [image_of_reduction(E1, E2, 1 + e, 1) for e in range(cap + 1)]
        orders = [im.order for im in images]
        for a, b in zip(images, images[1:]):
            for g in b.hnf:
                if any(g) and not a.contains(g):
                    raise AssertionError("image chain failed to decrease")
        onset = None
        for e in range(cap + 1):
            if images[e] == images[cap]:
                onset = e
                break
        if onset == cap and cap > 0 and orders[cap - 1] != orders[cap]:
            onset = None  # still moving at the cap
        per_field[mdeg] = (onset, orders)
    degs = sorted(tower)
    top = [per_field[d][0] for d in degs[-2:]]
    conclusive = len(top) == 2 and top[0] is not None and top[0] == top[1]
    value = top[-1] if top[-1] is not None else -1
    return EndoNumberResult(value, conclusive, per_field, cap)


@dataclass
class ExactSequenceReport:
    s: int
    order_s: int
    order_s1: int
    image_order: int
    kernel_order: int
    exact: bool


def exact_sequence_check(M1, M2, s: int) -> ExactSequenceReport:
    """Verify 0 -> H_s --p--> H_{s+1} --pi--> H_1 exactness: the image of
    multiplication by p equals ker(pi_{s+1,1}) and the orders account."""
    Hs = hom_s(M1, M2, s)
    Hs1 = hom_s(M1, M2, s + 1)
    p = Hs.p
    ps1 = p ** (s + 1)
    K = Hs.subgroup.K
    # image of multiplication by p: h[s] -> p h[s+1] through the lifts
    img_gens = [[(p * x) % ps1 for x in w] for w in Hs.witnesses]
    for g in img_gens:
        if not Hs1.contains(g):
            raise AssertionError("p * H_s does not land in H_(s+1)")
    image = Subgroup.from_generators(img_gens, K, p, s + 1)
    # independent kernel of pi_{s+1,1}: combinations of the H_(s+1)
    # generators vanishing mod p, plus p times each generator
    G = Hs1.generators
    kergens = [[(p * x) % ps1 for x in g] for g in G]
    if G:
        T = [[G[j][i] % p for j in range(len(G))] for i in range(K)]
        for z in kernel_mod_prime_power(T, p, 1):
            vec = [0] * K
            for j, co in enumerate(z):
                if co % p:
                    vec = [(a + co * b) % ps1 for a, b in zip(vec, G[j])]
            kergens.append(vec)
    kernel = Subgroup.from_generators(kergens, K, p, s + 1)
    exact = (
        image == kernel
        and image.order == Hs.order
        and Hs1.order == image.order * reduce_hom(Hs1, 1).order
    )
    return ExactSequenceReport(
        s, Hs.order, Hs1.order, reduce_hom(Hs1, 1).order, kernel.order, exact
    )


# ---------------------------------------------------------------------------
# truncation-isomorphism search (exhaustive, oracle-grade)


def _enumerate_linear(cols, K_eq, p, digit_mod, value_mod, visit):
    """Exhaustively enumerate x in [0, digit_mod)^len(cols) and call
    visit(x_tuple, T x mod value_mod); incremental odometer updates keep
    the cost at one column addition per step."""
    k = len(cols)
    x = [0] * k
    img = [0] * K_eq
    while True:
        visit(tuple(x), img)
        idx = 0
        while idx < k:
            x[idx] += 1
            if x[idx] < digit_mod:
                img = [(a + b) % value_mod for a, b in zip(img, cols[idx])]
                break
            # roll over: subtract (digit_mod - 1) * column
            img = [(a - (digit_mod - 1) * b) % value_mod for a, b in zip(img, cols[idx])]
            x[idx] = 0
            idx += 1
        if idx == k:
            return


def _system_columns(rows):
    K_eq = len(rows)
    k = len(rows[0])
    return [[rows[i][j] for i in range(K_eq)] for j in range(k)]


def admissible_maps_mod(M1, M2, s):
    """Every map mod p^s admitting a lift, by exhaustive sweep organized as
    base-times-correction: X = X0 + p^s Y with the correction images
    precomputed as a set.  The tested candidate set is exactly all X mod
    p^(s + e_r)."""
    rows, m, ring, (r2, r1, n) = _congruence_columns(M1, M2, s)
    p = M1.p
    K = n * r1 * r2
    er = m - s
    cols = _system_columns(rows)
    pm = p**m
    # correction image set mod p^er
    per = p**er if er else 1
    corr = set()
    if er:
        ccols = [[(p**s * c) % pm for c in col] for col in cols]

        def record(_x, img):
            corr.add(tuple((v // p**s) % per for v in img))

        _enumerate_linear(ccols, K, p, per, pm, record)
    else:
        corr.add((0,) * K)
    solutions = []
    ps = p**s

    def check(x, img):
        if any(v % ps for v in img):
            return
        target = tuple((-(v // ps)) % per for v in img)
        if target in corr:
            solutions.append(x)

    _enumerate_linear(cols, K, p, ps, pm, check)
    return sorted(solutions)


def is_isomorphic_truncation(M, g1, g2, s, search_bound=10**7) -> bool:
    """Exhaustive test: is some h mod p^s, invertible mod p and admissible
    between (M, g1 phi) and (M, g2 phi), a truncation isomorphism?"""
    _require_crystal(M)
    from .crystal import twist
    from .linalg import is_unit_matrix

    M1 = twist(M, g1) if g1 is not None else M
    M2 = twist(M, g2) if g2 is not None else M
    er = M.hodge_data().largest
    count = M.p ** (M.n * M.rank * M.rank * (s + er))
    if count > search_bound:
        raise BudgetError(f"candidate count {count} exceeds the bound {search_bound}")
    rows, m, ring, (r2, r1, n) = _congruence_columns(M1, M2, s)
    p = M.p
    K = n * r1 * r2
    er = m - s
    cols = _system_columns(rows)
    pm = p**m
    per = p**er if er else 1
    corr = set()
    if er:
        ccols = [[(p**s * c) % pm for c in col] for col in cols]
        _enumerate_linear(ccols, K, p, per, pm, lambda _x, img: corr.add(tuple((v // p**s) % per for v in img)))
    else:
        corr.add((0,) * K)
    ps = p**s
    ring1 = make_ring(p, n, 1)
    found = []

    def check(x, img):
        if found:
            return
        if any(v % ps for v in img):
            return
        target = tuple((-(v // ps)) % per for v in img)
        if target not in corr:
            return
        hbar = vec_to_matrix([c % p for c in x], (r2, r1), ring1)
        if is_unit_matrix(hbar):
            found.append(x)

    _enumerate_linear(cols, K, p, ps, pm, check)
    return bool(found)


# ---------------------------------------------------------------------------
# block LDU factorization of filtered unit matrices


@dataclass
class BlockLDU:
    """N = (prod of lower unipotent Y factors, outermost block row first)
    . blockdiag(X0) . (prod of upper unipotent factors I + p^(f_m-f_l)
    Ztilde, outermost block column last)."""

    f: list
    sizes: list
    Y: dict  # (l, m) 1-based, l > m -> PMatrix block
    X0: list
    Z: dict  # (l, m) 1-based, l < m -> PMatrix block (unscaled Ztilde)

    def multiply_back(self, ring=None):
        ring = ring or self.X0[0].ring
        t = len(self.sizes)
        total = sum(self.sizes)
        offs = [sum(self.sizes[:i]) for i in range(t + 1)]

        def embed(block, l, m, scale_pow=0):
            out = PMatrix.identity(ring, total)
            for i in range(block.nrows):
                for j in range(block.ncols):
                    v = block.rows[i][j]
                    if scale_pow:
                        v = ring.shift(v, scale_pow)
                    out.rows[offs[l - 1] + i][offs[m - 1] + j] = v
            return out

        acc = PMatrix.identity(ring, total)
        for l in range(t, 1, -1):
            for m in range(l - 1, 0, -1):
                if (l, m) in self.Y:
                    acc = acc @ embed(self.Y[(l, m)], l, m)
        X = PMatrix.identity(ring, total)
        for i, blk in enumerate(self.X0):
            for a in range(blk.nrows):
                for b in range(blk.ncols):
                    X.rows[offs[i] + a][offs[i] + b] = blk.rows[a][b]
        acc = acc @ X
        for m in range(2, t + 1):
            for l in range(1, m):
                if (l, m) in self.Z:
                    acc = acc @ embed(self.Z[(l, m)], l, m, self.f[m - 1] - self.f[l - 1])
        return acc


def block_ldu(Nmat: PMatrix, f: list, sizes: list) -> BlockLDU:
    """Factor a member of the filtered unit group along the proof's 2x2
    recursion.  Membership (upper blocks divisible by p^(f_m - f_l), unit
    determinant, invertible diagonal blocks) is checked, not assumed."""
    from .linalg import inverse_scaled, is_unit_matrix, matrix_inverse

    ring = Nmat.ring
    t = len(sizes)
    if len(f) != t or sorted(f) != list(f) or len(set(f)) != t:
        raise ArgumentError("block data must be strictly increasing exponents with sizes")
    total = sum(sizes)
    if Nmat.nrows != total or Nmat.ncols != total:
        raise ArgumentError("matrix does not match the block sizes")
    offs = [sum(sizes[:i]) for i in range(t + 1)]
    for l in range(t):
        for m in range(l + 1, t):
            need = f[m] - f[l]
            for i in range(offs[l], offs[l + 1]):
                for j in range(offs[m], offs[m + 1]):
                    v = ring.val(Nmat.rows[i][j])
                    if v is not None and v < need:
                        raise ArgumentError(
                            f"block ({l + 1},{m + 1}) not divisible by p^{need}"
                        )
    if not is_unit_matrix(Nmat):
        raise ArgumentError("matrix is not invertible over the ring")

    Y, X0, Z = {}, [], {}

    def recurse(N, depth):
        # depth = number of blocks in N
        if depth == 1:
            if not is_unit_matrix(N):
                raise ArgumentError("diagonal block is not invertible")
            X0.insert(0, N)
            return
        rp = offs[depth - 1]
        Xt = N.submatrix(range(rp), range(rp))
        if not is_unit_matrix(Xt):
            raise ArgumentError("leading principal block system is not invertible")
        Xinv = matrix_inverse(Xt)
        ur = N.submatrix(range(rp), range(rp, N.nrows))
        ll = N.submatrix(range(rp, N.nrows), range(rp))
        lr = N.submatrix(range(rp, N.nrows), range(rp, N.nrows))
        Ytilde = ll @ Xinv
        W = Xinv @ ur
        # split Ytilde, W into per-block factors
        for m in range(depth - 1, 0, -1):
            blk = Ytilde.submatrix(range(Ytilde.nrows), range(offs[m - 1], offs[m]))
            Y[(depth, m)] = blk
        for l in range(1, depth):
            need = f[depth - 1] - f[l - 1]
            blk = W.submatrix(range(offs[l - 1], offs[l]), range(W.ncols))
            try:
                Z[(l, depth)] = blk.pshift(-need)
            except ArgumentError as exc:
                raise ArgumentError(
                    f"block ({l},{depth}) escaped its divisibility under elimination: {exc}"
                ) from exc
        Xtt = lr - (Ytilde @ ur)
        if not is_unit_matrix(Xtt):
            raise ArgumentError("diagonal block is not invertible")
        X0.insert(0, Xtt)
        recurse(Xt, depth - 1)

    recurse(Nmat, t)
    return BlockLDU(list(f), list(sizes), Y, X0, Z)
