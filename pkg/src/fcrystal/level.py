"""Level module and level torsion of a pair of crystals, and the solver
for phi_12(X) - X = x on the level module.

The Hom isocrystal splits into slope-positive / zero / negative parts;
inside each part (in saturated subspace coordinates, where the full
lattice H meets the part in the standard lattice) the canonical lattice
is the stabilized chain

    plus:  L_{i+1} = L_i  intersect  phi^(-1)(L_i)     from L_0 = R^m
    minus: L_{i+1} = L_i  intersect  phi(L_i)
    zero:  both chains, which must stabilize to the same lattice.

The level torsion is the containment exponent of the full Hom lattice in
the direct sum of the three stabilized parts.  All results are reported
only when stable across two consecutive precision doublings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .crystal import LatticedIsocrystal, hom_crystal
from .errors import ArgumentError, ExtendBaseField, NonconvergenceError, PrecisionError
from .lattice import (
    Lattice,
    containment_exponent,
    lattice_contains,
    lattice_image,
    lattice_intersect,
    lattice_preimage,
    lattice_sum,
    lattices_equal,
)
from .linalg import PMatrix, complete_to_unimodular, inverse_scaled, is_unit_matrix
from .padic import make_ring
from .slopes import SlopeSplit, slope_split

PRECISION_CAP = 4096


@dataclass
class PartData:
    """One slope part: saturated ambient basis, the restricted operator
    matrix (m x m over the working ring), and the stabilized lattice in
    part coordinates."""

    name: str
    basis: PMatrix
    op: PMatrix
    lattice: Lattice
    iterations: int


@dataclass
class LevelModule:
    hom: LatticedIsocrystal
    split: SlopeSplit
    parts: dict
    O_plus: Lattice
    O_zero: Lattice
    O_minus: Lattice
    O: Lattice
    torsion: int
    precision: int  # certified floor of the reported lattices
    work_ring: object

    @property
    def iterations_used(self):
        return {name: part.iterations for name, part in self.parts.items()}


def level_module(M1: LatticedIsocrystal, M2: LatticedIsocrystal) -> LevelModule:
    """Canonical level module of the pair, with the stability discipline:
    the reported data must agree, at full certified depth, across two
    consecutive precision doublings."""
    H = hom_crystal(M1, M2)
    results = []
    last_nonconvergence = None
    N = max(H.doc_precision * 2, 16)
    while N <= PRECISION_CAP:
        try:
            lm = _level_module_at(H, N)
        except PrecisionError:
            results = []
        except NonconvergenceError as exc:
            # chains starved of working precision descend through junk;
            # genuine nonconvergence persists across all doublings
            results = []
            last_nonconvergence = exc
        else:
            results.append(lm)
            if len(results) >= 3:
                window = results[-3:]
                depth = min(r.precision for r in window)
                prints = [_fingerprint(r, depth) for r in window]
                if prints[0] == prints[1] == prints[2]:
                    return results[-1]
        N *= 2
    if last_nonconvergence is not None:
        raise last_nonconvergence
    raise PrecisionError(f"level module not stable below precision {PRECISION_CAP}")


def level_torsion(M1: LatticedIsocrystal, M2: LatticedIsocrystal = None) -> int:
    """Smallest l with p^l H contained in O; the pair defaults to (M, M)."""
    return level_module(M1, M2 if M2 is not None else M1).torsion


def _fingerprint(lm: LevelModule, depth: int):
    return (
        lm.torsion,
        lm.O_plus.fingerprint(depth),
        lm.O_zero.fingerprint(depth),
        lm.O_minus.fingerprint(depth),
        lm.O.fingerprint(depth),
    )


def _level_module_at(H: LatticedIsocrystal, N: int) -> LevelModule:
    A = H.matrix(N)
    c = H.scale
    d = H.rank
    ring = A.ring
    split = slope_split(A, c)
    work = split.plus_basis.ring  # common floor chosen by slope_split
    A_w = A.at_ring(work)
    slopes_all = split.plus_slopes + split.zero_slopes + split.minus_slopes
    max_slope = max((abs(s) for s in slopes_all), default=1)
    cap = 8 * d * (abs(c) + ring.n * math.ceil(max_slope) + 1)

    parts = {}
    for name, basis, _slopes in split.parts():
        if basis.ncols == 0:
            parts[name] = None
            continue
        op = _restricted_operator(A_w, basis)
        if name == "plus":
            lat, its = _stable_chain(op, c, work, direction="pre", cap=cap)
        elif name == "minus":
            lat, its = _stable_chain(op, c, work, direction="img", cap=cap)
        else:
            lat_f, its_f = _stable_chain(op, c, work, direction="pre", cap=cap)
            lat_b, its_b = _stable_chain(op, c, work, direction="img", cap=cap)
            if not lattices_equal(lat_f, lat_b):
                raise PrecisionError("forward and backward zero-part chains disagree")
            lat, its = lat_f, its_f + its_b
        parts[name] = PartData(name, basis, op, lat, its)

    ambient = {}
    for name in ("plus", "zero", "minus"):
        part = parts[name]
        if part is None:
            ambient[name] = None
            continue
        ambient[name] = Lattice(part.basis @ part.lattice.mat, part.lattice.scale)

    present = [ambient[n] for n in ("plus", "zero", "minus") if ambient[n] is not None]
    O = present[0]
    for extra in present[1:]:
        O = lattice_sum(O, extra)
    if O.rank != d:
        raise PrecisionError("level module is not full rank at this precision")
    H_lat = Lattice.standard(work, d)
    _check_stability(parts, c, work)
    if containment_exponent(O, H_lat) != 0:
        raise PrecisionError("level module escapes the full lattice at this precision")
    ell = containment_exponent(H_lat, O)
    # chain arithmetic accumulates a precision-independent loss; reporting
    # at half the working precision makes the canonical forms honest once
    # the working precision exceeds twice that loss, which the doubling
    # discipline then certifies at full reported depth
    floor = max(4, work.N // 2)
    rep = make_ring(work.p, work.n, floor)

    def reported(L):
        return Lattice(L.mat.at_ring(rep), L.scale) if L is not None else None

    parts_rep = {
        k: PartData(
            v.name,
            v.basis.at_ring(rep),
            v.op.at_ring(rep),
            Lattice(v.lattice.mat.at_ring(rep), v.lattice.scale),
            v.iterations,
        )
        for k, v in parts.items()
        if v is not None
    }
    zero_d = PMatrix.zero(rep, d, 0)
    empty = Lattice(zero_d, 0, canonical=True)
    return LevelModule(
        hom=H,
        split=split,
        parts=parts_rep,
        O_plus=reported(ambient["plus"]) or empty,
        O_zero=reported(ambient["zero"]) or empty,
        O_minus=reported(ambient["minus"]) or empty,
        O=reported(O),
        torsion=ell,
        precision=floor,
        work_ring=rep,
    )


def _restricted_operator(A: PMatrix, basis: PMatrix) -> PMatrix:
    """Matrix of x -> A sigma(x) in the saturated part coordinates."""
    T, Tinv = complete_to_unimodular(basis)
    m = basis.ncols
    image = Tinv @ (A @ basis.sigma())
    for i in range(m, A.nrows):
        for j in range(m):
            if not image.rows[i][j].is_zero():
                raise PrecisionError("slope part not invariant in coordinates")
    return image.submatrix(range(m), range(m))


def _stable_chain(op: PMatrix, c: int, work, direction: str, cap: int):
    """Iterate L -> L meet phi^(+-1)(L) from the standard lattice until the
    canonical forms stabilize; phi = p^(-c) op sigma."""
    lat = Lattice.standard(work, op.nrows)
    for it in range(cap):
        try:
            if direction == "pre":
                step = lattice_preimage(op, lat, op_scale=c, sigma_power=1)
            else:
                step = lattice_image(op, lat, op_scale=c, sigma_power=1)
            nxt = lattice_intersect(lat, step)
        except ArgumentError as exc:
            # chains of full-rank lattices stay full rank; a dropped column
            # is precision junk, so retry at a doubled precision
            raise PrecisionError(f"chain lost rank at this precision: {exc}") from exc
        if lattices_equal(nxt, lat):
            return lat, it + 1
        lat = nxt
    raise NonconvergenceError(
        f"{direction}-chain did not stabilize within {cap} iterations",
        diagnostics={"direction": direction, "cap": cap, "last_scale": lat.scale},
    )


def _check_stability(parts, c, work):
    """phi(O+) in O+, phi^slope-inverse containments, phi(O0) = O0."""
    for name, part in parts.items():
        if part is None:
            continue
        lat = part.lattice
        if name == "plus":
            img = lattice_image(part.op, lat, op_scale=c, sigma_power=1)
            if containment_exponent(img, lat) != 0:
                raise PrecisionError("plus part is not phi-stable")
        elif name == "minus":
            pre = lattice_preimage(part.op, lat, op_scale=c, sigma_power=1)
            if containment_exponent(pre, lat) != 0:
                raise PrecisionError("minus part is not phi-inverse-stable")
        else:
            img = lattice_image(part.op, lat, op_scale=c, sigma_power=1)
            if not lattices_equal(img, lat):
                raise PrecisionError("zero part is not phi-bijective")


# ---------------------------------------------------------------------------
# the sigma-linear solver on the level module


def solve_phi_minus_id(lm: LevelModule, x, x_scale: int = 0):
    """Solve phi_12(X) - X = x for x in O; returns the canonical X in O.

    The plus part is summed as X+ = -(x+ + phi(x+) + phi^2(x+) + ...),
    the minus part as X- = phi^(-1)(x-) + phi^(-2)(x-) + ..., and the
    zero-part coordinate system is solved mod p then Hensel-lifted with
    the lexicographically least solution at each level.  If x in p^s O
    the result lies in p^s O.
    """
    work = lm.work_ring
    x = [work.coerce(v) for v in x]
    rep = lm.O.ring
    if not lattice_contains(lm.O, [rep.coerce(v) for v in x], x_scale):
        raise PrecisionError("x is not in the level module at this precision")
    comps = _decompose(lm, x, x_scale)
    total = [work.zero] * lm.hom.rank
    c = lm.hom.scale
    for name, part_vec in comps.items():
        part = lm.parts.get(name)
        if part is None:
            continue
        if name == "plus":
            y = _geometric_sum(part.op, c, part_vec, sign=-1, inverse=False)
        elif name == "minus":
            y = _geometric_sum(part.op, c, part_vec, sign=+1, inverse=True)
        else:
            y = _solve_zero_part(part, c, part_vec)
        amb = part.basis.apply(y)
        total = [a + b for a, b in zip(total, amb)]
    # verify the defining equation at working precision
    diff = [a - v for a, v in zip(phi_minus_id(lm, total), x)]
    tol = work.N - max(2 * abs(c), 4) - 2
    m = work.p ** max(tol, 1)
    if any(cc % m for e in diff for cc in e.coeffs):
        raise PrecisionError("solver residual nonzero at this precision")
    return total


def phi_minus_id(lm: LevelModule, vec):
    """phi_12(v) - v, computed as p^(-c)(A sigma(v) - p^c v) so that the
    division is exact whenever the combination is integral (v in O)."""
    work = lm.work_ring
    vec = [work.coerce(v) for v in vec]
    A = lm.hom.matrix(work.N)
    c = lm.hom.scale
    out = A.apply([work.sigma(v) for v in vec])
    combined = [a - work.shift(v, c) for a, v in zip(out, vec)]
    try:
        return [work.shift(v, -c) for v in combined]
    except ArgumentError as exc:
        raise PrecisionError(f"phi - id left the integral lattice: {exc}") from exc


def _decompose(lm: LevelModule, x, x_scale):
    """Split x in O into its plus/zero/minus components, each expressed in
    the saturated coordinates of its part.  Components of a member of O
    have integral part coordinates; inexact division here means the
    membership certification was too optimistic."""
    work = lm.work_ring
    names = [n for n in ("plus", "zero", "minus") if n in lm.parts]
    big = None
    for n in names:
        b = lm.parts[n].basis
        big = b if big is None else big.hstack(b)
    if big.ncols != big.nrows:
        raise PrecisionError("part bases do not span the ambient space")
    Binv, k = inverse_scaled(big)
    coords = Binv.apply(x)
    out = {}
    offset = 0
    try:
        for n in names:
            m = lm.parts[n].basis.ncols
            out[n] = [work.shift(v, -(k + x_scale)) for v in coords[offset : offset + m]]
            offset += m
    except Exception as exc:
        raise PrecisionError(f"component decomposition inexact: {exc}") from exc
    return out


def _geometric_sum(op, c, vec, sign, inverse):
    """Convergent series of iterated phi (or phi inverse) applications,
    with phi = p^(-c) op sigma; valid on the parts with nonzero slopes."""
    work = op.ring

    if inverse:
        inv, k = inverse_scaled(op)

        def apply_once(v):
            # phi^(-1)(v) = sigma^(-1)(p^(c - k) inv . v)
            return [work.sigma(work.shift(u, c - k), work.n - 1) for u in inv.apply(v)]

        term = apply_once(vec)
    else:

        def apply_once(v):
            return [work.shift(u, -c) for u in op.apply([work.sigma(t) for t in v])]

        term = list(vec)
    total = [work.zero] * len(vec)
    for _ in range(8 * work.N + 8):
        if all(t.is_zero() for t in term):
            break
        total = [a + b for a, b in zip(total, term)]
        term = apply_once(term)
    else:
        raise NonconvergenceError("geometric series did not converge")
    if sign < 0:
        total = [-t for t in total]
    return total


def _solve_zero_part(part, c, vec):
    """Solve phi(X) - X = x on the zero part in the coordinates of its
    stabilized lattice, where phi is integral with unit determinant."""
    work = part.op.ring
    L = part.lattice
    Lmat = L.mat
    Linv, k = inverse_scaled(Lmat)
    try:
        B = (Linv @ part.op @ Lmat.sigma()).pshift(-(c + k))
        if not is_unit_matrix(B):
            raise PrecisionError("zero-part operator is not unimodular in lattice coordinates")
        w = [work.shift(u, L.scale - k) for u in Linv.apply(vec)]
        sol = _sigma_linear_solve(B, w)
        out = Lmat.apply(sol)
        return [work.shift(u, -L.scale) for u in out]
    except ArgumentError as exc:
        raise PrecisionError(f"zero-part coordinates inexact: {exc}") from exc


def _sigma_linear_solve(B, w):
    """Solve B sigma(z) = z + w over the ring, level by level mod p."""
    work = B.ring
    field = work.residue
    m = B.nrows
    n = work.n
    # F_p-linear system on n*m residue coordinates: for each basis vector
    # e (coordinate index, field basis index), column = B sigma(e) - e mod p
    cols = []
    for j in range(m):
        for t in range(n):
            e = [work.zero] * m
            e[j] = work.element(tuple(1 if i == t else 0 for i in range(n)))
            img = B.apply([work.sigma(v) for v in e])
            img[j] = img[j] - e[j]
            cols.append(_to_fp(img, work))
    rows = len(cols[0])
    z = [work.zero] * m
    carry = list(w)
    p = work.p
    for level in range(work.N):
        target = _to_fp(carry, work)
        sol = _fp_solve(cols, target, rows, p)
        if sol is None:
            raise ExtendBaseField(
                "zero-part coordinate equations unsolvable over this residue field"
            )
        zlev = [
            work.element(tuple(sol[j * n + t] for t in range(n))) for j in range(m)
        ]
        delta = [work.shift(v, level) for v in zlev]
        z = [a + b for a, b in zip(z, delta)]
        # carry = w - (B sigma(z) - z), divided by p^(level+1)
        resid = B.apply([work.sigma(v) for v in z])
        resid = [a - b for a, b in zip(resid, z)]
        resid = [a - b for a, b in zip(w, resid)]
        if all(r.is_zero() for r in resid):
            return z
        try:
            carry = [work.shift(r, -(level + 1)) for r in resid]
        except Exception as exc:
            raise PrecisionError(f"zero-part lift failed: {exc}") from exc
    return z


def _to_fp(vec, work):
    out = []
    for v in vec:
        out.extend(c % work.p for c in v.coeffs)
    return out


def _fp_solve(cols, target, rows, p):
    """Least solution of the F_p-linear system with the given columns, by
    Gaussian elimination; columns indexed in enumeration order."""
    ncols = len(cols)
    M = [[cols[j][i] % p for j in range(ncols)] + [target[i] % p] for i in range(rows)]
    piv_of_col = [-1] * ncols
    r = 0
    for j in range(ncols):
        sel = None
        for i in range(r, rows):
            if M[i][j] % p:
                sel = i
                break
        if sel is None:
            continue
        M[r], M[sel] = M[sel], M[r]
        inv = pow(M[r][j], -1, p)
        M[r] = [(x * inv) % p for x in M[r]]
        for i in range(rows):
            if i != r and M[i][j]:
                f = M[i][j]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        piv_of_col[j] = r
        r += 1
    # consistency
    for i in range(r, rows):
        if M[i][ncols] % p:
            return None
    # least solution: free variables 0, pivots take the RHS value
    sol = [0] * ncols
    for j in range(ncols):
        if piv_of_col[j] >= 0:
            sol[j] = M[piv_of_col[j]][ncols] % p
    return sol
