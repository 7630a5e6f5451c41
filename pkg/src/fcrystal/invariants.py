"""Top-level invariants: the isomorphism number, the dimension count of
the level-1 automorphism stabilizer for monomial crystals, the rank-2
closed forms, and a consolidated report with cross-checks.

The isomorphism number of a non-ordinary crystal equals its level
torsion; ordinary crystals dispatch to the split/isoclinic closed forms
with the provenance recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .crystal import (
    FCrystal,
    LatticedIsocrystal,
    PermutationCrystal,
    hodge_slopes,
    is_isoclinic,
    is_ordinary,
    newton_slopes,
)
from .errors import ArgumentError, FCrystalError
from .level import level_torsion


# ---------------------------------------------------------------------------
# level-1 stabilizer combinatorics for monomial crystals


@dataclass(frozen=True)
class Gamma1Data:
    I_plus: tuple
    I_zero: tuple
    I_minus: tuple
    nu: dict        # (i, j) in I_minus -> first return time to I_+ or I_-
    I_minus_pi: tuple
    gamma1: int
    orbit_dim: int


def gamma1_permutation(p, e, pi) -> Gamma1Data:
    """Classify index pairs by Hodge block and walk pi x pi orbits: a pair
    of I_- counts toward the stabilizer dimension exactly when its first
    return to I_+ or I_- lands in I_+.  The combinatorics is independent
    of p; the argument is kept for interface symmetry."""
    r = len(e)
    if sorted(pi) != list(range(1, r + 1)):
        raise ArgumentError("pi is not a permutation in one-line notation")
    distinct = sorted(set(e))
    block = {i: distinct.index(e[i]) for i in range(r)}
    plus, zero, minus = [], [], []
    for i in range(r):
        for j in range(r):
            l, m = block[i], block[j]
            if m > l:
                plus.append((i + 1, j + 1))
            elif m == l:
                zero.append((i + 1, j + 1))
            else:
                minus.append((i + 1, j + 1))
    plus_set, minus_set = set(plus), set(minus)
    nu = {}
    chosen = []
    for (i, j) in minus:
        a, b = i, j
        for step in range(1, r * r + 2):
            a, b = pi[a - 1], pi[b - 1]
            if (a, b) in plus_set or (a, b) in minus_set:
                nu[(i, j)] = step
                if (a, b) in plus_set:
                    chosen.append((i, j))
                break
        else:
            raise AssertionError("orbit walk failed to return")
    gamma1 = len(chosen)
    return Gamma1Data(
        tuple(plus), tuple(zero), tuple(minus), nu, tuple(chosen), gamma1, r * r - gamma1
    )


def cycle_constant_exponents(e, pi) -> bool:
    """Independent checker: is e constant on every cycle of pi?"""
    r = len(e)
    seen = [False] * r
    for i in range(r):
        if seen[i]:
            continue
        j = i
        vals = set()
        while not seen[j]:
            seen[j] = True
            vals.add(e[j])
            j = pi[j] - 1
        if len(vals) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# the isomorphism number


def isom_number(M: LatticedIsocrystal):
    """(n, provenance): level torsion for non-ordinary crystals; ordinary
    crystals take 1 when split across several slopes and 0 when
    isoclinic (a documented extension of the closed forms)."""
    if is_ordinary(M):
        if is_isoclinic(M):
            return 0, "ordinary-isoclinic"
        return 1, "ordinary-split"
    return level_torsion(M, M), "main-theorem"


def rank2_closed_form(M: LatticedIsocrystal) -> int:
    """Closed form for rank 2, computed from slope data only (no level
    module): normalize the smaller Hodge slope to 0; then ordinary
    crystals split and give 1, isoclinic ones give the Hodge gap e, and
    the rest give twice the smaller Newton slope."""
    if M.rank != 2:
        raise ArgumentError("closed form applies to rank 2 only")
    hodge = M.hodge_data().exps
    e1, e2 = hodge
    gap = e2 - e1
    newton = [s - e1 + M.scale for s in newton_slopes(M)]  # normalized slopes
    if gap == 0:
        # both slopes equal: etale twist of an isoclinic ordinary crystal
        return 0
    if sorted(newton) == [Fraction(0), Fraction(gap)]:
        return 1
    if newton[0] == newton[1]:
        return gap
    lam1 = min(newton)
    if lam1.denominator != 1:
        raise AssertionError("distinct rank-2 slopes must be integers")
    return 2 * int(lam1)


@dataclass
class InvariantReport:
    hodge: tuple
    newton: list
    ordinary: bool
    isoclinic: bool
    level_torsion: int | None
    isom_number: int | None
    provenance: str | None
    gamma1: int | None
    endo_hat: object | None
    rank2_form: int | None
    checks: dict
    errors: dict


def report(M, permutation: PermutationCrystal = None, with_endo_hat=False, endo_cap=None,
           tower=(1, 2, 3, 4)) -> InvariantReport:
    """Fill every computable field and run the consistency cross-checks;
    individual failures are recorded, not fatal."""
    checks, errors = {}, {}
    hodge = M.hodge_data().exps
    newton = newton_slopes(M)
    ordinary = is_ordinary(M)
    isoclinic = len(set(newton)) == 1
    ell = n = prov = r2form = gamma = endo = None
    try:
        n, prov = isom_number(M)
        ell = level_torsion(M, M) if not ordinary else 0
        if not ordinary:
            checks["n-equals-level-torsion"] = n == ell
    except FCrystalError as exc:
        errors["isom_number"] = str(exc)
    if M.rank == 2:
        try:
            r2form = rank2_closed_form(M)
            if n is not None:
                checks["rank2-closed-form"] = r2form == n
        except FCrystalError as exc:
            errors["rank2_closed_form"] = str(exc)
    if permutation is not None:
        gamma = gamma1_permutation(permutation.p, list(permutation.e), list(permutation.pi)).gamma1
        checks["gamma1-zero-iff-ordinary"] = (gamma == 0) == ordinary
    if with_endo_hat:
        from .truncation import endo_number_hat

        try:
            cap = endo_cap if endo_cap is not None else (2 * (ell if ell is not None else 2) + 2)
            endo = endo_number_hat(M, M, cap=cap, tower=tower)
            if endo.conclusive and ell is not None and not ordinary:
                checks["endo-hat-equals-level-torsion"] = endo.value == ell
        except FCrystalError as exc:
            errors["endo_number_hat"] = str(exc)
    return InvariantReport(
        hodge, newton, ordinary, isoclinic, ell, n, prov, gamma, endo, r2form, checks, errors
    )
