"""Brute-force enumerators over tiny truncated Witt rings.

These are the independent referees for the linear-algebra solvers: they
sweep candidate spaces exhaustively and deterministically.  Costs are
exponential; every entry point takes a budget measured as the full
candidate count p^(n r1 r2 (s + e_r)).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import BudgetError
from .truncation import admissible_maps_mod, is_isomorphic_truncation


@dataclass(frozen=True)
class SearchBudget:
    """Enumeration order is row-major over lifts, least residues first."""

    max_candidates: int = 10**7
    timeout: float | None = None


def _candidate_count(M1, M2, s):
    er = M1.hodge_data().largest
    return M1.p ** (M1.n * M1.rank * M2.rank * (s + er))


def brute_hom_s(M1, M2, s, budget: SearchBudget = SearchBudget()):
    """Explicit solution set mod p^s of the homomorphism congruences, by
    exhaustive sweep of all lifts mod p^(s + e_r)."""
    count = _candidate_count(M1, M2, s)
    if count > budget.max_candidates:
        raise BudgetError(f"candidate count {count} exceeds budget {budget.max_candidates}")
    start = time.monotonic()
    sols = admissible_maps_mod(M1, M2, s)
    if budget.timeout is not None and time.monotonic() - start > budget.timeout:
        raise BudgetError("timeout exceeded")
    return sols


def brute_isom_classes(M, s, twists, budget: SearchBudget = SearchBudget()):
    """Partition the given twist matrices g into truncation-isomorphism
    classes mod p^s.  Returns a list of lists of indices into `twists`."""
    count = _candidate_count(M, M, s) * max(1, len(twists))
    if count > budget.max_candidates:
        raise BudgetError(f"candidate count {count} exceeds budget {budget.max_candidates}")
    start = time.monotonic()
    classes = []
    reps = []
    for idx, g in enumerate(twists):
        placed = False
        for cls, rep in zip(classes, reps):
            if is_isomorphic_truncation(M, g, rep, s, search_bound=budget.max_candidates):
                cls.append(idx)
                placed = True
                break
        if not placed:
            classes.append([idx])
            reps.append(g)
        if budget.timeout is not None and time.monotonic() - start > budget.timeout:
            raise BudgetError("timeout exceeded")
    return classes
