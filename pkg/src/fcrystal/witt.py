"""p-typical Witt vectors in coordinate form.

The universal sum/product polynomials are built by exact ghost inversion
over Z[a_0..a_{s-1}, b_0..b_{s-1}]:

    S_q = (w_q(a) + w_q(b) - sum_{i<q} p^i S_i^(p^(q-i))) / p^q

and similarly for products; the division must be exact or construction
aborts, which doubles as a correctness check.  Coordinate vectors live
over F_{p^n} (tuples from padic.GFq).  Conversion to the integral model
uses witt_to_zq(x) = sum_i p^i teichmuller(x_i^(p^-i)), a ring
isomorphism W_s(F_{p^n}) -> W(F_{p^n})/p^s commuting with Frobenius.

Symbolic tables are only built for p^s <= 256; beyond that Witt
arithmetic goes through the integral model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ArgumentError, ResourceError
from .padic import GFq, Zq, ZqElem, make_ring

TABLE_GUARD = 256

# ---------------------------------------------------------------------------
# sparse integer polynomials: {exponent tuple: coefficient}


def _poly_add(f, g):
    out = dict(f)
    for m, c in g.items():
        c2 = out.get(m, 0) + c
        if c2:
            out[m] = c2
        else:
            out.pop(m, None)
    return out


def _poly_scale(f, k):
    if k == 0:
        return {}
    return {m: c * k for m, c in f.items()}


def _poly_mul(f, g):
    out = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            c = out.get(m, 0) + c1 * c2
            if c:
                out[m] = c
            else:
                out.pop(m, None)
    return out


def _poly_pow(f, e):
    nvars = len(next(iter(f))) if f else 0
    result = {(0,) * nvars: 1} if f else {}
    if not f:
        return {} if e else result
    base = f
    while e:
        if e & 1:
            result = _poly_mul(result, base)
        base = _poly_mul(base, base) if e > 1 else base
        e >>= 1
    return result


def _poly_div_exact(f, k):
    out = {}
    for m, c in f.items():
        if c % k:
            raise AssertionError("ghost inversion division is not exact")
        out[m] = c // k
    return out


def _var(nvars, i):
    m = [0] * nvars
    m[i] = 1
    return {tuple(m): 1}


def _ghost_poly(p, q, nvars, offset):
    """w_q of the vector (x_offset, ..., x_{offset+q}) as a polynomial."""
    out = {}
    for i in range(q + 1):
        out = _poly_add(out, _poly_scale(_poly_pow(_var(nvars, offset + i), p ** (q - i)), p**i))
    return out


def _invert_ghost(p, s, nvars, ghost_targets):
    """Solve w_q(P_0..P_q) = ghost_targets[q] for integer polynomials P_q."""
    polys = []
    for q in range(s):
        acc = ghost_targets[q]
        for i in range(q):
            acc = _poly_add(acc, _poly_scale(_poly_pow(polys[i], p ** (q - i)), -(p**i)))
        polys.append(_poly_div_exact(acc, p**q))
    return polys


@dataclass(frozen=True)
class WittPolyTable:
    """Universal addition/multiplication polynomials for W_s, in variables
    a_0..a_{s-1}, b_0..b_{s-1} (indices 0..s-1 and s..2s-1)."""

    p: int
    s: int
    sums: tuple
    prods: tuple


def witt_poly_table(p: int, s: int) -> WittPolyTable:
    if p**s > TABLE_GUARD:
        raise ResourceError(f"p^s = {p**s} exceeds the symbolic table guard {TABLE_GUARD}")
    return _witt_poly_table_cached(p, s)


_TABLE_CACHE: dict = {}


def _witt_poly_table_cached(p, s):
    key = (p, s)
    if key not in _TABLE_CACHE:
        nvars = 2 * s
        sum_targets = [
            _poly_add(_ghost_poly(p, q, nvars, 0), _ghost_poly(p, q, nvars, s)) for q in range(s)
        ]
        prod_targets = [
            _poly_mul(_ghost_poly(p, q, nvars, 0), _ghost_poly(p, q, nvars, s)) for q in range(s)
        ]
        _TABLE_CACHE[key] = WittPolyTable(
            p, s, tuple(_invert_ghost(p, s, nvars, sum_targets)), tuple(_invert_ghost(p, s, nvars, prod_targets))
        )
    return _TABLE_CACHE[key]


_PRODUCT_COORD_CACHE: dict = {}


def product_coord_polys(p: int, r: int, s: int):
    """Polynomials computing coordinates 0..s-1 of an r-fold Witt product,
    in variables x^(1)_0..x^(1)_{s-1}, ..., x^(r)_0..x^(r)_{s-1}."""
    if p**s > TABLE_GUARD:
        raise ResourceError(f"p^s = {p**s} exceeds the symbolic table guard {TABLE_GUARD}")
    key = (p, r, s)
    if key not in _PRODUCT_COORD_CACHE:
        nvars = r * s
        targets = []
        for q in range(s):
            acc = _ghost_poly(p, q, nvars, 0)
            for j in range(1, r):
                acc = _poly_mul(acc, _ghost_poly(p, q, nvars, j * s))
            targets.append(acc)
        _PRODUCT_COORD_CACHE[key] = tuple(_invert_ghost(p, s, nvars, targets))
    return _PRODUCT_COORD_CACHE[key]


def table_text(table: WittPolyTable) -> str:
    """Canonical text: monomials sorted degree-lex, decimal coefficients."""
    s = table.s
    names = [f"a{i}" for i in range(s)] + [f"b{i}" for i in range(s)]
    lines = []
    for label, polys in (("S", table.sums), ("M", table.prods)):
        for q, poly in enumerate(polys):
            terms = []
            for m, c in sorted(poly.items(), key=lambda mc: (sum(mc[0]), tuple(-e for e in mc[0]))):
                vars_txt = "*".join(
                    f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(m) if e
                )
                terms.append(f"{c}" if not vars_txt else (f"{c}*{vars_txt}" if c != 1 else vars_txt))
            lines.append(f"{label}_{q} = " + (" + ".join(terms) if terms else "0"))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Witt vectors over F_{p^n}


@dataclass(frozen=True)
class WittVec:
    """Length-s coordinate vector over F_{p^n}."""

    field: GFq
    coords: tuple  # of residue tuples

    @property
    def p(self):
        return self.field.p

    @property
    def length(self):
        return len(self.coords)

    def __repr__(self):
        return f"W{list(self.coords)}"


def witt_from_coords(field: GFq, coords) -> WittVec:
    return WittVec(field, tuple(tuple(c) for c in coords))


def witt_zero(field: GFq, s: int) -> WittVec:
    return WittVec(field, (field.zero,) * s)


def witt_one(field: GFq, s: int) -> WittVec:
    return WittVec(field, (field.one,) + (field.zero,) * (s - 1))


def _check_shapes(x: WittVec, y: WittVec):
    if x.field.p != y.field.p or x.field.n != y.field.n or x.length != y.length:
        raise ArgumentError("mismatched Witt vector shapes")


def _eval_poly_mod_p(field: GFq, poly, values):
    """Evaluate an integer-coefficient polynomial at residue-field points."""
    acc = field.zero
    for m, c in poly.items():
        term = (c % field.p,) + (0,) * (field.n - 1)
        if not any(term):
            continue
        for i, e in enumerate(m):
            if e:
                term = field.mul(term, field.pow(values[i], e))
        acc = field.add(acc, term)
    return acc


def witt_add(x: WittVec, y: WittVec) -> WittVec:
    _check_shapes(x, y)
    s, p, field = x.length, x.p, x.field
    if p**s <= TABLE_GUARD:
        table = witt_poly_table(p, s)
        values = x.coords + y.coords
        return WittVec(field, tuple(_eval_poly_mod_p(field, table.sums[q], values) for q in range(s)))
    ring = make_ring(p, field.n, s)
    return zq_to_witt(ring, witt_to_zq(ring, x) + witt_to_zq(ring, y))


def witt_mul(x: WittVec, y: WittVec) -> WittVec:
    _check_shapes(x, y)
    s, p, field = x.length, x.p, x.field
    if p**s <= TABLE_GUARD:
        table = witt_poly_table(p, s)
        values = x.coords + y.coords
        return WittVec(field, tuple(_eval_poly_mod_p(field, table.prods[q], values) for q in range(s)))
    ring = make_ring(p, field.n, s)
    return zq_to_witt(ring, witt_to_zq(ring, x) * witt_to_zq(ring, y))


def witt_neg(x: WittVec) -> WittVec:
    ring = make_ring(x.p, x.field.n, x.length)
    return zq_to_witt(ring, -witt_to_zq(ring, x))


def witt_product_coord(r: int, q: int, vectors) -> tuple:
    """q-th coordinate of the r-fold Witt product of `vectors`."""
    if r < 1 or len(vectors) != r:
        raise ArgumentError("need exactly r >= 1 vectors")
    if any(v.length <= q for v in vectors):
        raise ArgumentError("coordinate index out of range")
    field = vectors[0].field
    for v in vectors[1:]:
        if v.field.p != field.p or v.field.n != field.n:
            raise ArgumentError("mismatched coefficient fields")
    s = q + 1
    polys = product_coord_polys(field.p, r, s)
    values = tuple(c for v in vectors for c in v.coords[:s])
    return _eval_poly_mod_p(field, polys[q], values)


def frobenius_w(x: WittVec) -> WittVec:
    """Over a perfect base, sigma raises coordinates to the p-th power."""
    f = x.field
    return WittVec(f, tuple(f.frob(c) for c in x.coords))


def verschiebung_w(x: WittVec) -> WittVec:
    """Shift coordinates right, dropping the last."""
    return WittVec(x.field, (x.field.zero,) + x.coords[:-1])


# ---------------------------------------------------------------------------
# ghost map over torsion-free test rings (exact big integers)


def ghost(p: int, coords) -> tuple:
    """Ghost components of an integer coordinate vector."""
    coords = tuple(int(c) for c in coords)
    return tuple(
        sum(p**i * coords[i] ** (p ** (q - i)) for i in range(q + 1)) for q in range(len(coords))
    )


def ghost_add(p, x, y):
    s = len(x)
    table = witt_poly_table(p, s)
    values = tuple(x) + tuple(y)
    return tuple(_eval_poly_int(table.sums[q], values) for q in range(s))


def ghost_mul(p, x, y):
    s = len(x)
    table = witt_poly_table(p, s)
    values = tuple(x) + tuple(y)
    return tuple(_eval_poly_int(table.prods[q], values) for q in range(s))


def _eval_poly_int(poly, values):
    acc = 0
    for m, c in poly.items():
        term = c
        for i, e in enumerate(m):
            if e:
                term *= values[i] ** e
        acc += term
    return acc


# ---------------------------------------------------------------------------
# conversion to/from the integral model


def witt_to_zq(ring: Zq, x: WittVec) -> ZqElem:
    if ring.N != x.length or ring.p != x.p or ring.n != x.field.n:
        raise ArgumentError("ring precision/field must match the Witt length")
    field = x.field
    acc = ring.zero
    for i, c in enumerate(x.coords):
        # undo i Frobenius twists before the multiplicative lift
        r = c
        for _ in range(i % max(field.n, 1)):
            r = field.frob_inv(r)
        acc = acc + ring.shift(ring.teichmuller(r), i)
    return acc


def zq_to_witt(ring: Zq, a: ZqElem) -> WittVec:
    field = ring.residue
    coords = []
    cur = a
    for i in range(ring.N):
        r = tuple(c % ring.p for c in cur.coeffs)
        coords.append(field.frob(r, i % max(field.n, 1)))
        cur = ring.shift(cur - ring.teichmuller(r), -1) if i + 1 < ring.N else cur
    return WittVec(field, tuple(coords))
