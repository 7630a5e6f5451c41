"""Batch CLI: parse crystal documents, dispatch invariant computations,
emit machine-readable JSON on stdout (all integers as decimal strings),
diagnostics on stderr.

Document commands accept one or more files; with several, the output is
a JSON array in input order and --jobs fans the work out over processes.
Exit codes: 0 success, 2 argument/document errors, 3 precision or
nonconvergence, 4 budget/resource errors.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import sys
from fractions import Fraction

from . import crystal as cr
from .document import parse_text
from .errors import (
    ArgumentError,
    BudgetError,
    FCrystalError,
    NonconvergenceError,
    PrecisionError,
    ResourceError,
)
from .invariants import gamma1_permutation, isom_number, rank2_closed_form, report
from .level import level_module
from .oracle import SearchBudget, brute_hom_s, brute_isom_classes
from .truncation import endo_number_hat, hom_s
from .witt import table_text, witt_poly_table

EXIT_OK, EXIT_ARG, EXIT_PRECISION, EXIT_BUDGET = 0, 2, 3, 4


def _frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _load(path, max_precision):
    with open(path, "r", encoding="utf-8") as fh:
        M, perm = parse_text(fh.read())
    if max_precision and M.doc_precision > max_precision:
        raise ArgumentError(
            f"document precision {M.doc_precision} exceeds --max-precision {max_precision}"
        )
    return M, perm


def _lattice_json(L):
    return {
        "scale": str(L.scale),
        "basis": [[[str(c) for c in x.coeffs] for x in L.mat.column(j)] for j in range(L.rank)],
    }


def _matrix_json(B):
    return [[[str(c) for c in x.coeffs] for x in B.column(j)] for j in range(B.ncols)]


# -- per-document commands: (args, path) -> JSON-ready dict -----------------


def cmd_hodge(args, path):
    M, _ = _load(path, args.max_precision)
    return {"hodge": [str(e) for e in M.hodge_data().exps]}


def cmd_newton(args, path):
    M, _ = _load(path, args.max_precision)
    return {"newton": [_frac(s) for s in cr.newton_slopes(M)]}


def cmd_ordinary(args, path):
    M, _ = _load(path, args.max_precision)
    return {"ordinary": cr.is_ordinary(M)}


def cmd_fbasis(args, path):
    M, _ = _load(path, args.max_precision)
    B = cr.f_basis(M)
    return {"precision": str(B.ring.N), "basis": _matrix_json(B)}


def cmd_level_torsion(args, path):
    M1, _ = _load(path, args.max_precision)
    M2 = M1 if not args.pair else _load(args.pair, args.max_precision)[0]
    lm = level_module(M1, M2)
    return {
        "level_torsion": str(lm.torsion),
        "precision": str(lm.precision),
        "iterations": {k: str(v) for k, v in lm.iterations_used.items()},
        "O_plus": _lattice_json(lm.O_plus),
        "O_zero": _lattice_json(lm.O_zero),
        "O_minus": _lattice_json(lm.O_minus),
    }


def cmd_isom_number(args, path):
    M, _ = _load(path, args.max_precision)
    n, prov = isom_number(M)
    out = {"n": str(n), "provenance": prov}
    if M.rank == 2:
        out["rank2_closed_form"] = str(rank2_closed_form(M))
    return out


def cmd_hom_s(args, path):
    M1, _ = _load(path, args.max_precision)
    M2 = M1 if not args.pair else _load(args.pair, args.max_precision)[0]
    H = hom_s(M1, M2, args.s)
    return {
        "s": str(args.s),
        "order": str(H.order),
        "generators": [[str(c) for c in g] for g in H.generators],
        "lift_level": str(H.lift_level),
    }


def cmd_endo_number(args, path):
    M1, _ = _load(path, args.max_precision)
    M2 = M1 if not args.pair else _load(args.pair, args.max_precision)[0]
    tower = tuple(int(t) for t in args.tower.split(","))
    res = endo_number_hat(M1, M2, cap=args.cap, tower=tower)
    return {
        "e_hat": str(res.value),
        "conclusive": res.conclusive,
        "cap": str(res.cap),
        "per_field": {
            str(d): {
                "onset": None if onset is None else str(onset),
                "image_orders": [str(o) for o in orders],
            }
            for d, (onset, orders) in res.per_field.items()
        },
        "note": res.note,
    }


def cmd_gamma1(args, path):
    M, perm = _load(path, args.max_precision)
    if perm is None:
        raise ArgumentError("gamma1 needs a permutation-kind document")
    g = gamma1_permutation(perm.p, list(perm.e), list(perm.pi))
    return {
        "gamma1": str(g.gamma1),
        "orbit_dim": str(g.orbit_dim),
        "I_minus_pi": [[str(i), str(j)] for (i, j) in g.I_minus_pi],
    }


def cmd_report(args, path):
    M, perm = _load(path, args.max_precision)
    rep = report(M, permutation=perm, with_endo_hat=args.checks == "all")
    out = {
        "hodge": [str(e) for e in rep.hodge],
        "newton": [_frac(s) for s in rep.newton],
        "ordinary": rep.ordinary,
        "isoclinic": rep.isoclinic,
        "level_torsion": None if rep.level_torsion is None else str(rep.level_torsion),
        "n": None if rep.isom_number is None else str(rep.isom_number),
        "provenance": rep.provenance,
        "checks": rep.checks,
        "errors": rep.errors,
    }
    if rep.gamma1 is not None:
        out["gamma1"] = str(rep.gamma1)
    if rep.rank2_form is not None:
        out["rank2_closed_form"] = str(rep.rank2_form)
    if rep.endo_hat is not None:
        out["e_hat"] = str(rep.endo_hat.value)
        out["e_hat_conclusive"] = rep.endo_hat.conclusive
    return out


def cmd_witt_table(args):
    table = witt_poly_table(args.p, args.len)
    sys.stdout.write(table_text(table) + "\n")
    return None


def cmd_oracle_hom_s(args):
    M1, _ = _load(args.document, args.max_precision)
    M2 = M1 if not args.pair else _load(args.pair, args.max_precision)[0]
    sols = brute_hom_s(M1, M2, args.s, SearchBudget(max_candidates=args.budget))
    return {
        "s": str(args.s),
        "count": str(len(sols)),
        "solutions": [[str(c) for c in x] for x in sols],
    }


def cmd_oracle_isom(args):
    M, _ = _load(args.document, args.max_precision)
    from .linalg import PMatrix

    ring = M.ring(M.doc_precision)
    twists = []
    for spec in args.twist:
        entries = [int(x, 10) for x in spec.split(",")]
        if len(entries) != M.rank * M.rank * M.n:
            raise ArgumentError(
                f"twist needs {M.rank * M.rank * M.n} comma-separated coordinates"
            )
        rows, idx = [], 0
        for _i in range(M.rank):
            row = []
            for _j in range(M.rank):
                row.append(ring.element(tuple(entries[idx : idx + M.n])))
                idx += M.n
            rows.append(row)
        twists.append(PMatrix(ring, rows))
    classes = brute_isom_classes(M, args.s, twists, SearchBudget(max_candidates=args.budget))
    return {"s": str(args.s), "classes": [[str(i) for i in cls] for cls in classes]}


_WORK = {}


def _run_one(payload):
    fn_name, args, path = payload
    return _WORK[fn_name](args, path)


def build_parser():
    top = argparse.ArgumentParser(prog="fcrystal", description=__doc__)
    top.add_argument("--max-precision", type=int, default=None, help="guard for auto-raised precision")
    top.add_argument("--jobs", type=int, default=1, help="processes for multiple documents")
    sub = top.add_subparsers(dest="command", required=True)

    def doc_cmd(name, fn, pair=False):
        sp = sub.add_parser(name)
        sp.add_argument("documents", nargs="+")
        if pair:
            sp.add_argument("--pair", default=None)
        sp.set_defaults(doc_fn=fn)
        _WORK[fn.__name__] = fn
        return sp

    doc_cmd("hodge", cmd_hodge)
    doc_cmd("newton", cmd_newton)
    doc_cmd("ordinary", cmd_ordinary)
    doc_cmd("fbasis", cmd_fbasis)
    doc_cmd("level-torsion", cmd_level_torsion, pair=True)
    doc_cmd("isom-number", cmd_isom_number)
    sp = doc_cmd("hom-s", cmd_hom_s, pair=True)
    sp.add_argument("--s", type=int, required=True)
    sp = doc_cmd("endo-number", cmd_endo_number, pair=True)
    sp.add_argument("--cap", type=int, required=True)
    sp.add_argument("--tower", default="1,2,3")
    doc_cmd("gamma1", cmd_gamma1)
    sp = doc_cmd("report", cmd_report)
    sp.add_argument("--checks", choices=["basic", "all"], default="basic")

    witt = sub.add_parser("witt")
    wsub = witt.add_subparsers(dest="witt_command", required=True)
    wt = wsub.add_parser("table")
    wt.add_argument("--p", type=int, required=True)
    wt.add_argument("--len", type=int, required=True)
    wt.set_defaults(plain_fn=cmd_witt_table)

    oracle = sub.add_parser("oracle")
    osub = oracle.add_subparsers(dest="oracle_command", required=True)
    oh = osub.add_parser("hom-s")
    oh.add_argument("document")
    oh.add_argument("--pair", default=None)
    oh.add_argument("--s", type=int, required=True)
    oh.add_argument("--budget", type=int, required=True)
    oh.set_defaults(plain_fn=cmd_oracle_hom_s)
    oi = osub.add_parser("isom")
    oi.add_argument("document")
    oi.add_argument("--s", type=int, required=True)
    oi.add_argument("--budget", type=int, required=True)
    oi.add_argument(
        "--twist",
        action="append",
        default=[],
        help="matrix as comma-separated coordinates, row-major",
    )
    oi.set_defaults(plain_fn=cmd_oracle_isom)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "plain_fn", None):
            out = args.plain_fn(args)
        else:
            docs = args.documents
            if args.jobs > 1 and len(docs) > 1:
                payloads = [(args.doc_fn.__name__, args, d) for d in docs]
                with multiprocessing.Pool(args.jobs) as pool:
                    results = pool.map(_run_one, payloads)
            else:
                results = [args.doc_fn(args, d) for d in docs]
            out = results[0] if len(docs) == 1 else results
        if out is not None:
            json.dump(out, sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
    except (BudgetError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PrecisionError, NonconvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except FCrystalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
