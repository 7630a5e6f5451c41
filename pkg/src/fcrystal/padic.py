"""Exact arithmetic in R = W(F_{p^n}) / p^N and its residue field.

Elements of R are stored on the power basis of a fixed generator: a tuple
of n integers in [0, p^N).  The defining polynomial is the
lexicographically smallest monic irreducible of degree n over F_p
(coefficients compared low-degree-first), lifted with the same integer
coefficients, so rings are identical across runs.  The Frobenius sigma is
the Hensel lift of x -> x^p; it is Z/p^N-linear and sigma^n = id.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import ArgumentError, PrecisionError

# ---------------------------------------------------------------------------
# small integer / F_p[x] helpers


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % q == 0:
            return m == q
    # deterministic Miller-Rabin, valid far beyond any sensible p here
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def _fp_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _fp_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _fp_trim(out)


def _fp_divmod(f, g, p):
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    q = [0] * max(0, len(f) - dg)
    while len(f) - 1 >= dg and f:
        c = f[-1] * inv % p
        k = len(f) - 1 - dg
        q[k] = c
        for j, b in enumerate(g):
            f[k + j] = (f[k + j] - c * b) % p
        _fp_trim(f)
    return _fp_trim(q), f


def _fp_gcd(f, g, p):
    f, g = list(f), list(g)
    while g:
        f, g = g, _fp_divmod(f, g, p)[1]
    return f


def _fp_powmod(f, e, mod, p):
    result = [1]
    f = _fp_divmod(f, mod, p)[1]
    while e:
        if e & 1:
            result = _fp_divmod(_fp_mul(result, f, p), mod, p)[1]
        f = _fp_divmod(_fp_mul(f, f, p), mod, p)[1]
        e >>= 1
    return result


def _is_irreducible(coeffs, p):
    """coeffs: monic polynomial as low-to-high list over F_p."""
    n = len(coeffs) - 1
    if n == 1:
        return True
    x = [0, 1]
    # x^(p^n) == x mod f
    if _fp_powmod(x, p**n, coeffs, p) != _fp_divmod(x, coeffs, p)[1]:
        return False
    for q in {d for d in range(2, n + 1) if n % d == 0 and is_prime(d)}:
        y = _fp_powmod(x, p ** (n // q), coeffs, p)
        y = _fp_trim([(a - b) % p for a, b in _zip_pad(y, x)])
        if len(_fp_gcd(coeffs, y, p)) > 1:
            return False
    return True


def _zip_pad(a, b):
    m = max(len(a), len(b))
    return zip(a + [0] * (m - len(a)), b + [0] * (m - len(b)))


def minimal_irreducible(p: int, n: int):
    """Lexicographically smallest monic irreducible of degree n over F_p,
    non-leading coefficients compared low-degree-first."""
    if n == 1:
        # x itself is irreducible and smallest
        return [0, 1]
    bound = p**n
    for k in range(bound):
        coeffs = []
        kk = k
        for _ in range(n):
            coeffs.append(kk % p)
            kk //= p
        f = coeffs + [1]
        if _is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# the ring


class ZqElem:
    """Element of W(F_{p^n})/p^N in canonical (reduced) coordinates."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = coeffs  # tuple of ints in [0, p^N)

    def __add__(self, other):
        other = self.ring.coerce(other)
        pN = self.ring.pN
        return ZqElem(self.ring, tuple((a + b) % pN for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        pN = self.ring.pN
        return ZqElem(self.ring, tuple(-a % pN for a in self.coeffs))

    def __sub__(self, other):
        other = self.ring.coerce(other)
        pN = self.ring.pN
        return ZqElem(self.ring, tuple((a - b) % pN for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return self.ring.coerce(other) - self

    def __mul__(self, other):
        other = self.ring.coerce(other)
        return self.ring._mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.ring.inv(self) ** (-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        return isinstance(other, ZqElem) and self.coeffs == other.coeffs and self.ring is other.ring

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Zq{list(self.coeffs)}"

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_unit(self):
        return any(c % self.ring.p != 0 for c in self.coeffs)


class Zq:
    """Handle for W(F_{p^n})/p^N with its Frobenius.

    Immutable after construction; safe to share.  All arithmetic methods
    are pure.
    """

    def __init__(self, p: int, n: int, N: int):
        if not is_prime(p):
            raise ArgumentError(f"p = {p} is not prime")
        if n < 1 or N < 1:
            raise ArgumentError("need n >= 1 and N >= 1")
        self.p = p
        self.n = n
        self.N = N
        self.pN = p**N
        self.minpoly = minimal_irreducible(p, n)  # monic, integer coeffs in [0, p)
        # reduction table: coords of x^(n+k) for k in 0..n-2
        self._red = self._power_reductions()
        self.zero = ZqElem(self, (0,) * n)
        self.one = self.from_int(1)
        self.gen = ZqElem(self, tuple(1 if i == 1 else 0 for i in range(n))) if n > 1 else self.one
        self.residue = GFq(self)
        self.frob_image = self._hensel_frobenius_image()
        self._frob_mat = self._power_matrix(self.frob_image)

    # -- construction helpers ------------------------------------------------

    def _power_reductions(self):
        n, pN = self.n, self.pN
        # x^n = -(minpoly without leading term)
        red = []
        cur = [(-c) % pN for c in self.minpoly[:-1]]
        red.append(tuple(cur))
        for _ in range(n - 2):
            cur = [0] + cur[:-1] if False else self._shift_reduce(cur)
            red.append(tuple(cur))
        return red

    def _shift_reduce(self, coords):
        n, pN = self.n, self.pN
        top = coords[-1]
        shifted = [0] + list(coords[:-1])
        if top:
            base = self._red[0]
            shifted = [(a + top * b) % pN for a, b in zip(shifted, base)]
        return shifted

    def _mul(self, a: ZqElem, b: ZqElem) -> ZqElem:
        n, pN = self.n, self.pN
        if n == 1:
            return ZqElem(self, (a.coeffs[0] * b.coeffs[0] % pN,))
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    prod[i + j] += x * y
        out = prod[:n]
        for k in range(n, 2 * n - 1):
            c = prod[k] % pN
            if c:
                row = self._red[k - n]
                for i in range(n):
                    out[i] += c * row[i]
        return ZqElem(self, tuple(c % pN for c in out))

    def _hensel_frobenius_image(self):
        if self.n == 1:
            return self.gen  # sigma = id on Z_p
        # Newton iteration on minpoly from the mod-p seed gen^p
        z = self.gen ** self.p
        f = [self.from_int(c) for c in self.minpoly]
        fprime = [self.from_int((i + 1) * c % self.pN) for i, c in enumerate(self.minpoly[1:])]
        prec = 1
        while prec < self.N:
            fz = self._poly_eval(f, z)
            fpz = self._poly_eval(fprime, z)
            z = z - fz * self.inv(fpz)
            prec *= 2
        assert self._poly_eval(f, z).is_zero()
        return z

    def _poly_eval(self, coeff_elems, x: ZqElem) -> ZqElem:
        acc = self.zero
        for c in reversed(coeff_elems):
            acc = acc * x + c
        return acc

    def _power_matrix(self, elem: ZqElem):
        """Columns are the coordinates of elem^i, i = 0..n-1: the matrix of
        the Z/p^N-linear map sending the generator to elem."""
        cols = []
        cur = self.one
        for _ in range(self.n):
            cols.append(cur.coeffs)
            cur = cur * elem
        return [[cols[j][i] for j in range(self.n)] for i in range(self.n)]

    # -- basic API ------------------------------------------------------------

    def coerce(self, x):
        if isinstance(x, ZqElem):
            if x.ring is self:
                return x
            if (x.ring.p, x.ring.n) == (self.p, self.n):
                # same field tower position, different precision
                return ZqElem(self, tuple(c % self.pN for c in x.coeffs))
            raise ArgumentError("element from an incompatible ring")
        if isinstance(x, int):
            return self.from_int(x)
        raise ArgumentError(f"cannot coerce {x!r}")

    def from_int(self, k: int) -> ZqElem:
        return ZqElem(self, (k % self.pN,) + (0,) * (self.n - 1))

    def element(self, coeffs) -> ZqElem:
        coeffs = tuple(int(c) % self.pN for c in coeffs)
        if len(coeffs) != self.n:
            raise ArgumentError(f"expected {self.n} coordinates, got {len(coeffs)}")
        return ZqElem(self, coeffs)

    def sigma(self, a: ZqElem, power: int = 1) -> ZqElem:
        power %= self.n
        mat = self._frob_mat
        coeffs = a.coeffs
        for _ in range(power):
            coeffs = tuple(
                sum(mat[i][j] * coeffs[j] for j in range(self.n)) % self.pN for i in range(self.n)
            )
        return ZqElem(self, coeffs)

    def sigma_inv(self, a: ZqElem) -> ZqElem:
        return self.sigma(a, self.n - 1)

    def val(self, a: ZqElem):
        """p-adic valuation; None means zero at this precision (>= N)."""
        if a.is_zero():
            return None
        v = self.N
        for c in a.coeffs:
            if c:
                w = 0
                while c % self.p == 0:
                    c //= self.p
                    w += 1
                v = min(v, w)
                if v == 0:
                    return 0
        return v

    def inv(self, a: ZqElem) -> ZqElem:
        if not a.is_unit():
            raise ArgumentError("not a unit")
        # invert mod p in the residue field, then Hensel: y <- y(2 - ay)
        ared = tuple(c % self.p for c in a.coeffs)
        y = self.element(self.residue.inv(ared))
        prec = 1
        while prec < self.N:
            y = y * (self.from_int(2) - a * y)
            prec *= 2
        return y

    def divide_exact(self, a: ZqElem, b: ZqElem) -> ZqElem:
        """a / b for b = p^v * unit; requires v <= val(a).  Loses v levels of
        precision; the result is canonical at the current N."""
        v = self.val(b)
        if v is None:
            raise PrecisionError("division by zero at this precision")
        if v:
            va = self.val(a)
            if va is not None and va < v:
                raise ArgumentError("inexact division")
            a = self.shift(a, -v)
            b = self.shift(b, -v)
        return a * self.inv(b)

    def shift(self, a: ZqElem, k: int) -> ZqElem:
        """Multiply by p^k (k may be negative; negative requires divisibility)."""
        if k == 0:
            return a
        if k > 0:
            m = self.p**k
            return ZqElem(self, tuple(c * m % self.pN for c in a.coeffs))
        m = self.p ** (-k)
        out = []
        for c in a.coeffs:
            if c % m:
                raise ArgumentError("inexact division by p")
            out.append(c // m)
        return ZqElem(self, tuple(out))

    def teichmuller(self, residue) -> ZqElem:
        """Multiplicative lift: the unique x with x^(p^n) = x, x = residue mod p."""
        x = self.element(residue if not isinstance(residue, ZqElem) else residue.coeffs)
        q = self.p**self.n
        for _ in range(self.N):
            x = x**q
        assert x**q == x
        return x

    def random_element(self, rng) -> ZqElem:
        return self.element(tuple(rng.randrange(self.pN) for _ in range(self.n)))

    def at_precision(self, N: int) -> "Zq":
        return make_ring(self.p, self.n, N)

    def __repr__(self):
        return f"Zq(p={self.p}, n={self.n}, N={self.N})"


class GFq:
    """Residue field F_{p^n} on the same power basis, elements are tuples
    of ints mod p.  Enumeration order: index k has digits of k base p as
    coordinates, low degree first."""

    def __init__(self, ring: Zq):
        self.p = ring.p
        self.n = ring.n
        self.minpoly = ring.minpoly
        self.q = ring.p**ring.n
        self.zero = (0,) * ring.n
        self.one = (1,) + (0,) * (ring.n - 1)

    def elem_from_index(self, k):
        out = []
        for _ in range(self.n):
            out.append(k % self.p)
            k //= self.p
        return tuple(out)

    def index_of(self, a):
        k = 0
        for c in reversed(a):
            k = k * self.p + c
        return k

    def __iter__(self):
        for k in range(self.q):
            yield self.elem_from_index(k)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        prod = _fp_mul(list(a), list(b), self.p)
        rem = _fp_divmod(prod, self.minpoly, self.p)[1]
        rem += [0] * (self.n - len(rem))
        return tuple(rem)

    def pow(self, a, e):
        if not any(a):
            return self.one if e == 0 else self.zero
        e %= self.q - 1
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        if not any(a):
            raise ArgumentError("zero has no inverse")
        return self.pow(a, self.q - 2)

    def frob(self, a, power=1):
        return self.pow(a, self.p ** (power % self.n))

    def frob_inv(self, a):
        return self.frob(a, self.n - 1)


@functools.lru_cache(maxsize=None)
def make_ring(p: int, n: int, N: int) -> Zq:
    """Deterministic model of W(F_{p^n}) mod p^N.  Cached per process; the
    cache is pure convenience (rings are immutable)."""
    return Zq(p, n, N)


# ---------------------------------------------------------------------------
# spec-level operation aliases


def frobenius(ring: Zq, a: ZqElem) -> ZqElem:
    return ring.sigma(a)


def teichmuller(ring: Zq, residue) -> ZqElem:
    return ring.teichmuller(residue)


def valuation(ring: Zq, a: ZqElem):
    return ring.val(a)
