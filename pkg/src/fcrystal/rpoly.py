"""Polynomials over W(F_{p^n})/p^N: Newton polygons, Hensel lifting, and
the three-way slope factorization used by the isocrystal slope split.

Polynomials are dense low-degree-first lists of ring elements.  Rational
slopes are exact `fractions.Fraction`s; no floating point is used
anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ArgumentError, PrecisionError
from .padic import Zq

# ---------------------------------------------------------------------------
# dense polynomial helpers over the ring


def ptrim(f):
    while len(f) > 1 and f[-1].is_zero():
        f = f[:-1]
    return f


def padd(f, g):
    ring = f[0].ring
    m = max(len(f), len(g))
    f = f + [ring.zero] * (m - len(f))
    g = g + [ring.zero] * (m - len(g))
    return [a + b for a, b in zip(f, g)]


def psub(f, g):
    ring = f[0].ring
    m = max(len(f), len(g))
    f = f + [ring.zero] * (m - len(f))
    g = g + [ring.zero] * (m - len(g))
    return [a - b for a, b in zip(f, g)]


def pmul(f, g):
    ring = f[0].ring
    out = [ring.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if not a.is_zero():
            for j, b in enumerate(g):
                out[i + j] = out[i + j] + a * b
    return out


def pscale(f, c):
    return [c * a for a in f]


def peval(f, x):
    acc = f[0].ring.zero
    for c in reversed(f):
        acc = acc * x + c
    return acc


def psigma(f, power=1):
    R = f[0].ring
    return [R.sigma(c, power) for c in f]


# ---------------------------------------------------------------------------
# residue-field polynomials (lists of GFq tuples)


def rf_trim(f, field):
    while f and not any(f[-1]):
        f.pop()
    return f


def rf_mul(f, g, field):
    if not f or not g:
        return []
    out = [field.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if any(a):
            for j, b in enumerate(g):
                out[i + j] = field.add(out[i + j], field.mul(a, b))
    return rf_trim(out, field)


def rf_divmod(f, g, field):
    f = list(f)
    dg = len(g) - 1
    inv = field.inv(g[-1])
    q = [field.zero] * max(0, len(f) - dg)
    while f and len(f) - 1 >= dg:
        c = field.mul(f[-1], inv)
        k = len(f) - 1 - dg
        q[k] = c
        for j, b in enumerate(g):
            f[k + j] = field.sub(f[k + j], field.mul(c, b))
        rf_trim(f, field)
    return rf_trim(q, field), f


def rf_xgcd(f, g, field):
    """(g, u, v) with u*f + v*g = gcd, gcd monic."""
    r0, r1 = list(f), list(g)
    u0, u1 = [field.one], []
    v0, v1 = [], [field.one]

    def sub(a, b):
        m = max(len(a), len(b))
        a = a + [field.zero] * (m - len(a))
        b = b + [field.zero] * (m - len(b))
        return rf_trim([field.sub(x, y) for x, y in zip(a, b)], field)

    while r1:
        q, r = rf_divmod(r0, r1, field)
        r0, r1 = r1, r
        u0, u1 = u1, sub(u0, rf_mul(q, u1, field))
        v0, v1 = v1, sub(v0, rf_mul(q, v1, field))
    lc = field.inv(r0[-1])
    scale = lambda h: [field.mul(lc, c) for c in h]
    return scale(r0), scale(u0), scale(v0)


def reduce_mod_p(f, ring: Zq):
    field = ring.residue
    return rf_trim([tuple(c % ring.p for c in a.coeffs) for a in f], field)


def lift_rf(fbar, ring: Zq):
    return [ring.element(c) for c in fbar]


# ---------------------------------------------------------------------------
# Newton polygon


def newton_polygon(f) -> list:
    """Root valuations of a polynomial with unit leading coefficient, as an
    ascending list of (Fraction, multiplicity).

    Points are (i, val c_i); uncertified interior valuations (>= N) are
    safe to omit once the constant term is certified, since the certified
    hull then stays strictly below precision.
    """
    ring = f[0].ring
    f = ptrim(list(f))
    d = len(f) - 1
    if d == 0:
        return []
    if ring.val(f[-1]) != 0:
        raise ArgumentError("leading coefficient must be a unit")
    if ring.val(f[0]) is None:
        raise PrecisionError("constant-term valuation not certified")
    pts = [(i, ring.val(c)) for i, c in enumerate(f)]
    pts = [(i, v) for i, v in pts if v is not None]
    hull = lower_hull(pts)
    out = []
    for (i1, v1), (i2, v2) in zip(hull, hull[1:]):
        out.append((Fraction(v1 - v2, i2 - i1), i2 - i1))
    out.reverse()  # root valuations ascending
    return out


def lower_hull(pts):
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def root_valuations(f) -> list:
    """Flat ascending list of root valuations with multiplicity."""
    out = []
    for s, m in newton_polygon(f):
        out.extend([s] * m)
    return out


# ---------------------------------------------------------------------------
# Hensel lifting of a coprime factorization mod p


def hensel_factor(ring: Zq, f, gbar, hbar):
    """Lift f = g*h from a factorization mod p with g monic and
    gcd(gbar, hbar) = 1; returns (g, h) with g monic, h of fixed length
    deg f - deg g + 1, exact mod p^N."""
    field = ring.residue
    one, u, v = rf_xgcd(gbar, hbar, field)
    if len(one) != 1:
        raise ArgumentError("mod-p factors are not coprime")
    dh_bound = len(f) - len(gbar)  # deg f - deg gbar
    g = lift_rf(gbar, ring)
    h = _pad(lift_rf(hbar, ring), dh_bound + 1, ring)
    for k in range(1, ring.N):
        delta = psub(f, pmul(g, h))
        dbar = _shift_down_mod_p(delta, k, ring)
        if not dbar:
            continue
        # dg = v*dbar mod gbar, then dh = (dbar - dg*hbar) / gbar exactly;
        # the clamp keeps deg h <= deg f - deg g throughout
        dg = rf_divmod(rf_mul(v, dbar, field), gbar, field)[1]
        num = _rf_sub(dbar, rf_mul(dg, hbar, field), field)
        dh, rem = rf_divmod(num, gbar, field)
        if rem:
            raise PrecisionError("hensel correction failed to divide")
        g = _pad(padd(g, pscale(lift_rf(dg, ring), ring.shift(ring.one, k))), len(gbar), ring)
        h = _pad(padd(h, pscale(lift_rf(dh, ring), ring.shift(ring.one, k))), dh_bound + 1, ring)
    if any(not c.is_zero() for c in psub(f, pmul(g, h))):
        raise PrecisionError("hensel lift did not converge at this precision")
    return g, h


def _pad(f, length, ring):
    f = list(f)
    if len(f) < length:
        f += [ring.zero] * (length - len(f))
    elif len(f) > length:
        if any(not c.is_zero() for c in f[length:]):
            raise PrecisionError("hensel factor degree overflow")
        f = f[:length]
    return f


def _rf_sub(a, b, field):
    m = max(len(a), len(b))
    a = a + [field.zero] * (m - len(a))
    b = b + [field.zero] * (m - len(b))
    return rf_trim([field.sub(x, y) for x, y in zip(a, b)], field)


def _rf_add(a, b, field):
    m = max(len(a), len(b))
    a = a + [field.zero] * (m - len(a))
    b = b + [field.zero] * (m - len(b))
    return rf_trim([field.add(x, y) for x, y in zip(a, b)], field)


def _shift_down_mod_p(f, k, ring):
    """(f / p^k) mod p, asserting p^k | f."""
    field = ring.residue
    out = []
    m = ring.p**k
    for a in f:
        if any(c % m for c in a.coeffs):
            raise PrecisionError("hensel correction is not divisible by p^k")
        out.append(tuple((c // m) % ring.p for c in a.coeffs))
    return rf_trim(out, field)


# ---------------------------------------------------------------------------
# three-way slope factorization at an integer threshold


def slope_factor_threeway(ring: Zq, f, a: int):
    """Factor a monic integral f with unit leading coefficient into monic
    (f_minus, f_zero, f_plus) gathering the roots of valuation < a, = a
    and > a.  `a` must be a nonnegative integer.

    Works by inverting the roots through p^a (G(T) = T^deg f(p^a/T), made
    primitive), splitting off the positive-valuation part by Hensel, then
    reversing the cofactor and splitting again; fractional slopes never
    need to be separated from each other, only from the integer level a.
    """
    if a < 0:
        raise ArgumentError("threshold must be nonnegative for integral operators")
    f = ptrim(list(f))
    r = len(f) - 1
    vals = root_valuations(f)
    d_minus = sum(1 for v in vals if v < a)
    d_zero = sum(1 for v in vals if v == a)
    d_plus = sum(1 for v in vals if v > a)
    one = [ring.one]
    if d_zero == r:
        # single group; no factorization work needed
        return one, f, one, 0
    field = ring.residue

    # G_j = f_{r-j} p^(a(r-j)), then strip content
    G = [ring.shift(f[r - j], a * (r - j)) for j in range(r + 1)]
    content = min(v for v in (ring.val(c) for c in G) if v is not None)
    G = [ring.shift(c, -content) for c in G]
    Gbar = reduce_mod_p(G, ring)
    ord_t = 0
    while ord_t < len(Gbar) and not any(Gbar[ord_t]):
        ord_t += 1
    if ord_t != d_minus:
        raise PrecisionError("polygon data inconsistent with reduction mod p")

    if d_minus:
        tpow = [field.zero] * d_minus + [field.one]
        vbar = rf_divmod(Gbar, tpow, field)[0]
        g_lo, h = hensel_factor(ring, G, lift_monomial(field, d_minus), vbar)
    else:
        g_lo, h = one, G

    # f_minus: roots x = p^a / (roots of g_lo); monic after dividing by g_lo(0)
    if d_minus:
        c0 = g_lo[0]
        num = [ring.shift(g_lo[len(g_lo) - 1 - k], a * (len(g_lo) - 1 - k)) for k in range(len(g_lo))]
        try:
            f_minus = [ring.divide_exact(c, c0) for c in num]
        except ArgumentError as exc:
            raise PrecisionError(f"slope factor transport failed: {exc}") from exc
    else:
        f_minus = one

    # reverse h at its full mathematical degree; h(0) is a unit by the split
    if ring.val(h[0]) != 0:
        raise PrecisionError("unit constant term expected after split")
    hstar = list(reversed(h))
    inv0 = ring.inv(hstar[-1])
    hstar = [c * inv0 for c in hstar]  # monic; roots x/p^a with val >= 0
    hbar = reduce_mod_p(hstar, ring)
    ord_t = 0
    while ord_t < len(hbar) and not any(hbar[ord_t]):
        ord_t += 1
    if ord_t != d_plus:
        raise PrecisionError("polygon data inconsistent after reversal")
    if d_plus:
        wbar = rf_divmod(hbar, lift_monomial(field, d_plus), field)[0]
        u_pos, u_unit = hensel_factor(ring, hstar, lift_monomial(field, d_plus), wbar)
    else:
        u_pos, u_unit = one, hstar
    # re-monicize the unit-root factor (its top coefficient is a unit)
    lc = u_unit[-1]
    if ring.val(lc) != 0:
        raise PrecisionError("unit-part leading coefficient not certified")
    u_unit = [c * ring.inv(lc) for c in u_unit]

    f_plus = [ring.shift(u_pos[k], a * (d_plus - k)) for k in range(len(u_pos))]
    f_zero = [ring.shift(u_unit[k], a * (d_zero - k)) for k in range(len(u_unit))]

    if (len(f_minus) - 1, len(f_zero) - 1, len(f_plus) - 1) != (d_minus, d_zero, d_plus):
        raise PrecisionError("slope factor degrees do not match the polygon")
    # transport back loses content + val(g_lo(0)) levels; verify the product
    slack = content + (ring.val(g_lo[0]) if d_minus else 0)
    if slack >= ring.N // 2:
        raise PrecisionError("no precision left to certify the slope factors")
    check = ring.p ** (ring.N - slack)
    prod = pmul(pmul(f_minus, f_zero), f_plus)
    diff = psub(prod, f)
    if any(c % check for x in diff for c in x.coeffs):
        raise PrecisionError("slope factorization failed verification")
    return f_minus, f_zero, f_plus, slack


def lift_monomial(field, d):
    return [field.zero] * d + [field.one]
