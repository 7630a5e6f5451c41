"""Crystal documents: the JSON schema the CLI reads and writes.

    {"p": 2, "n": 1, "precision": 8, "rank": 2,
     "phi": [[["2"], ["1"]], [["0"], ["4"]]]}

phi is a row-major rank x rank grid; each entry is the list of n
power-basis coordinates as decimal strings with values in [0, p^N).
Monomial crystals may instead use

    {"kind": "permutation", "p": 2, "n": 1, "precision": 8,
     "e": [0, 1], "pi": [2, 1]}

All integers are emitted as decimal strings so consumers are never
exposed to 53/64-bit truncation.
"""

from __future__ import annotations

import json

from .crystal import FCrystal, PermutationCrystal, permutation_crystal
from .errors import DocumentError
from .padic import is_prime


def parse_document(doc):
    """dict -> FCrystal or (FCrystal, PermutationCrystal); raises
    DocumentError with a field path on schema violations."""
    if not isinstance(doc, dict):
        raise DocumentError("$", "document must be a JSON object")
    kind = doc.get("kind", "matrix")
    p = _int_field(doc, "p")
    if not is_prime(p):
        raise DocumentError("p", f"{p} is not prime")
    n = _int_field(doc, "n", default=1)
    if n < 1:
        raise DocumentError("n", "extension degree must be >= 1")
    N = _int_field(doc, "precision", default=None)
    if kind == "permutation":
        e = doc.get("e")
        pi = doc.get("pi")
        if not isinstance(e, list) or not all(isinstance(x, int) and x >= 0 for x in e):
            raise DocumentError("e", "need a list of nonnegative integers")
        if not isinstance(pi, list) or sorted(pi) != list(range(1, len(e) + 1)):
            raise DocumentError("pi", "need a permutation of 1..rank in one-line notation")
        if "phi" in doc:
            raise DocumentError("phi", "permutation documents must omit phi")
        N = N or (max(e, default=0) + 6)
        perm = PermutationCrystal(p, n, tuple(e), tuple(pi))
        return perm.to_fcrystal(N), perm
    if kind != "matrix":
        raise DocumentError("kind", f"unknown kind {kind!r}")
    r = _int_field(doc, "rank")
    phi = doc.get("phi")
    if not isinstance(phi, list) or len(phi) != r:
        raise DocumentError("phi", f"need {r} rows")
    if N is None:
        raise DocumentError("precision", "field is required for matrix documents")
    grid = []
    for i, row in enumerate(phi):
        if not isinstance(row, list) or len(row) != r:
            raise DocumentError(f"phi[{i}]", f"need {r} entries")
        grow = []
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != n:
                raise DocumentError(f"phi[{i}][{j}]", f"need {n} coordinates")
            coords = []
            for t, c in enumerate(entry):
                try:
                    v = int(c, 10) if isinstance(c, str) else int(c)
                except (TypeError, ValueError):
                    raise DocumentError(f"phi[{i}][{j}][{t}]", f"malformed number {c!r}")
                if not 0 <= v < p**N:
                    raise DocumentError(
                        f"phi[{i}][{j}][{t}]", f"coordinate {v} outside [0, p^N)"
                    )
                coords.append(v)
            grow.append(coords)
        grid.append(grow)
    M = FCrystal(p, n, grid, N)
    try:
        M.hodge_data()
    except Exception:
        raise DocumentError("phi", "determinant vanishes at the document precision")
    return M, None


def parse_text(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"malformed JSON: {exc}") from exc
    return parse_document(doc)


def serialize_crystal(M, perm=None):
    if perm is not None:
        return {
            "kind": "permutation",
            "p": perm.p,
            "n": perm.n,
            "precision": M.doc_precision,
            "e": list(perm.e),
            "pi": list(perm.pi),
        }
    return {
        "p": M.p,
        "n": M.n,
        "precision": M.doc_precision,
        "rank": M.rank,
        "phi": [[[str(c) for c in entry] for entry in row] for row in M.coeff_grid],
    }


def _int_field(doc, name, default="required"):
    v = doc.get(name, default)
    if v == "required":
        raise DocumentError(name, "field is required")
    if v is None:
        return None
    if isinstance(v, str):
        try:
            v = int(v, 10)
        except ValueError:
            raise DocumentError(name, f"malformed integer {v!r}")
    if not isinstance(v, int):
        raise DocumentError(name, "must be an integer")
    return v
