"""Slope decomposition of a twisted linear operator.

The operator is x -> p^(-c) A sigma(x) on R^d with A integral.  Its
n-fold linearization B = A sigma(A) ... sigma^(n-1)(A) is R-linear and
commutes with the operator, and the characteristic polynomial of B has
Frobenius-fixed coefficients, so the kernels of the grouped slope factors
(roots of valuation < nc, = nc, > nc) are operator-stable subspaces.
They are returned as saturated bases together with the exact operator
slopes per part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionError
from .linalg import PMatrix, char_poly, mat_poly_eval, saturated_span_with_loss
from .rpoly import pmul, root_valuations, slope_factor_threeway


@dataclass
class SlopeSplit:
    """Operator-stable subspace bases for slopes > c, = c, < c (of the true
    operator p^(-c) A sigma).  Empty parts have 0-column bases."""

    plus_basis: PMatrix
    zero_basis: PMatrix
    minus_basis: PMatrix
    plus_slopes: list
    zero_slopes: list
    minus_slopes: list

    def parts(self):
        return (
            ("plus", self.plus_basis, self.plus_slopes),
            ("zero", self.zero_basis, self.zero_slopes),
            ("minus", self.minus_basis, self.minus_slopes),
        )


def linearization(A: PMatrix) -> PMatrix:
    B = A
    for k in range(1, A.ring.n):
        B = B @ A.sigma(k)
    return B


def operator_slopes(A: PMatrix, scale: int = 0) -> list:
    """Ascending slopes (with multiplicity) of x -> p^(-scale) A sigma(x)."""
    n = A.ring.n
    vals = root_valuations(char_poly(linearization(A)))
    return [v / n - scale for v in vals]


def slope_split(A: PMatrix, scale: int = 0) -> SlopeSplit:
    """Split R^d into the parts of slope > scale, = scale, < scale."""
    ring = A.ring
    if scale < 0:
        # fold the p-power into the matrix; the true operator is unchanged
        A = A.pshift(-scale)
        scale = 0
    n, d = ring.n, A.nrows
    B = linearization(A)
    f = char_poly(B)
    if any(ring.sigma(c) != c for c in f):
        raise PrecisionError("linearized characteristic polynomial is not sigma-fixed")
    a = n * scale
    f_minus, f_zero, f_plus, slack = slope_factor_threeway(ring, f, a)
    vals = root_valuations(f)
    slopes = {
        "minus": [v / n - scale for v in vals if v < a],
        "zero": [v / n - scale for v in vals if v == a],
        "plus": [v / n - scale for v in vals if v > a],
    }
    # slope factors carry a reduced floor, and span extraction loses the
    # largest pivot exponent on top of that: certify everything at the
    # common trustworthy precision
    floor = ring.N - slack - 1
    if floor < 2:
        raise PrecisionError("slope factors below usable precision")
    work = ring.at_precision(floor)
    B_w = B.at_ring(work)
    raw = {}
    losses = []
    for name, cofactor in (
        ("plus", pmul(f_zero, f_minus)),
        ("zero", pmul(f_plus, f_minus)),
        ("minus", pmul(f_plus, f_zero)),
    ):
        if not slopes[name]:
            raw[name] = None
            continue
        ev = mat_poly_eval([work.coerce(c) for c in cofactor], B_w)
        basis, loss = saturated_span_with_loss(ev, expected_rank=len(slopes[name]))
        if basis.ncols != len(slopes[name]):
            raise PrecisionError("slope part dimension mismatch at this precision")
        raw[name] = basis
        losses.append(loss + 1)
    floor2 = floor - max(losses, default=0)
    if floor2 < 2:
        raise PrecisionError("slope spans below usable precision")
    final = ring.at_precision(floor2)
    A_f = A.at_ring(final)
    out = {}
    for name in ("plus", "zero", "minus"):
        if raw[name] is None:
            out[name] = PMatrix.zero(final, d, 0)
            continue
        basis = raw[name].at_ring(final)
        if not _operator_stable(A_f, basis):
            raise PrecisionError(f"slope {name} part is not operator stable at this precision")
        out[name] = basis
    return SlopeSplit(
        out["plus"], out["zero"], out["minus"], slopes["plus"], slopes["zero"], slopes["minus"]
    )


def _operator_stable(A: PMatrix, basis: PMatrix) -> bool:
    """Check A sigma(basis) lies in the span of basis at working precision.

    The basis is saturated, so an integral vector lies in the span over
    the fraction field iff it lies in the lattice the basis generates.
    """
    from .lattice import Lattice, lattice_contains

    image = A @ basis.sigma()
    span = Lattice(basis, 0, canonical=False)
    return all(lattice_contains(span, image.column(j)) for j in range(image.ncols))
