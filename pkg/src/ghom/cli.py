"""``ghom`` command line.

Exit codes: 0 success, 1 validation or mathematical failure, 2 parse error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Sequence

from ghom import __version__
from ghom.abelian import GradedGroup, format_invariants
from ghom.bredon import (
    assemble,
    basepoint_pair,
    exactness_check,
    homology,
    homology_mod_p,
)
from ghom.errors import GhomError, ValidationError
from ghom.fileformat import GhomWarning, InputDocument, lenient_from_env, load
from ghom.gcomplex import quotient_complex, validate
from ghom.oracles import underlying_homology
from ghom.spectral import FilteredComplex, graded_assemble, run


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _graded_json(G: GradedGroup) -> dict:
    return G.to_json()


def _load(args) -> InputDocument:
    lenient = args.lenient or lenient_from_env()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GhomWarning)
        doc = load(args.file, lenient=lenient)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return doc


def _require_valid(doc: InputDocument) -> None:
    rep = validate(doc.complex)
    if not rep.ok:
        raise ValidationError("complex is not a simplicial G-complex: " + "; ".join(rep.failures))


def _pair(doc: InputDocument, use_pair: bool):
    return doc.pair(relative=use_pair)


# -- commands -------------------------------------------------------------------------

def cmd_validate(args) -> int:
    doc = _load(args)
    rep = validate(doc.complex)
    X = doc.complex
    print(f"input: {doc.name}")
    print(f"group order: {doc.group.order}")
    print("simplices per dimension: " + " ".join(str(len(x)) for x in X.by_dim))
    if doc.sub:
        print(f"subcomplex simplices: {len(doc.sub)}")
    for name, M in sorted(doc.systems.items()):
        print(f"system {name}: functorial ({M.check_functoriality()} composable pairs checked)")
    if rep.ok:
        print("complex: valid")
        return 0
    print("complex: INVALID")
    for f in rep.failures:
        print(f"  {f}")
    return 1


def cmd_orbits(args) -> int:
    doc = _load(args)
    _require_valid(doc)
    X = doc.complex
    G = X.group
    rows = []
    for p, level in enumerate(X.orbits):
        for orb in level:
            rows.append({
                "dimension": p,
                "representative": X.label(orb.representative),
                "stabilizer": str(orb.stabilizer) if orb.stabilizer.order not in (1, G.order)
                else ("e" if orb.stabilizer.order == 1 else "G"),
                "stabilizer_order": orb.stabilizer.order,
                "orbit_size": len(orb.members),
                "in_subcomplex": orb.representative in doc.sub,
            })
    if args.json:
        print(_dump({"command": "orbits", "input": doc.name, "orbits": rows}))
        return 0
    for p, level in enumerate(X.orbits):
        print(f"dimension {p}: {len(level)} orbit(s)")
        for r in (r for r in rows if r["dimension"] == p):
            mark = "  (in A)" if r["in_subcomplex"] else ""
            print(f"  {r['representative']}  stabilizer {r['stabilizer']} "
                  f"(order {r['stabilizer_order']})  orbit size {r['orbit_size']}{mark}")
    return 0


def cmd_chain(args) -> int:
    doc = _load(args)
    _require_valid(doc)
    C = assemble(_pair(doc, args.pair), doc.system(args.system))
    if args.json:
        out = {"command": "chain", "input": doc.name, "system": args.system,
               "ranks": [C.rank(p) for p in range(C.top + 1)],
               "basis": {str(p): [C.basis_label(p, i) for i in range(C.rank(p))]
                         for p in range(C.top + 1)},
               "boundaries": {str(p): C.d(p).to_lists() for p in range(1, C.top + 1)}}
        print(_dump(out))
        return 0
    for p in range(C.top + 1):
        print(f"C_{p}: rank {C.rank(p)}")
        if args.emit:
            print("  basis: " + " ".join(C.basis_label(p, i) for i in range(C.rank(p))))
    if args.emit:
        for p in range(1, C.top + 1):
            d = C.d(p)
            print(f"d_{p}: {d.rows}x{d.cols}")
            for row in d.to_lists():
                print("  " + " ".join(str(x) for x in row))
    return 0


def cmd_homology(args) -> int:
    doc = _load(args)
    _require_valid(doc)
    M = doc.system(args.system)
    if args.reduced is not None:
        if args.pair:
            raise ValidationError("--reduced and --pair cannot be combined")
        pair = basepoint_pair(doc.complex, args.reduced)
    else:
        pair = _pair(doc, args.pair)
    C = assemble(pair, M)
    out = {"command": "homology", "input": doc.name, "system": args.system,
           "pair": bool(args.pair), "reduced": args.reduced}
    if args.field is not None:
        from ghom.abelian import is_prime

        if not is_prime(args.field):
            raise ValidationError(f"--field needs a prime, got {args.field}")
        dims = homology_mod_p(C, args.field)
        out["coefficients"] = f"F_{args.field}"
        out["homology"] = {str(n): {"dimension": d} for n, d in dims.items()}
        if args.json:
            print(_dump(out))
        else:
            for n, d in dims.items():
                print(f"H_{n} = " + (f"F_{args.field}^{d}" if d > 1 else
                                     f"F_{args.field}" if d == 1 else "0"))
        return 0
    H = homology(C)
    out["coefficients"] = "Z"
    out["homology"] = _graded_json(H.groups)
    if args.json:
        print(_dump(out))
    else:
        for n in H.groups.degrees():
            print(f"H_{n} = {H.groups.format(n)}")
    return 0


def _entry(inv) -> dict:
    return {"betti": inv[0], "torsion": list(inv[1])}


def cmd_spectral(args) -> int:
    doc = _load(args)
    _require_valid(doc)
    pair = _pair(doc, args.pair)
    if args.graded:
        if args.graded not in doc.graded:
            raise ValidationError(f"unknown graded system {args.graded!r}")
        fc = graded_assemble(pair, doc.graded[args.graded])
        label = f"graded {args.graded}"
    else:
        fc = FilteredComplex.from_bredon(assemble(pair, doc.system(args.system)))
        label = args.system
    rep = run(fc, args.pages)
    pages_out = []
    for pg in rep.pages:
        diffs = []
        for (p, q), f in sorted(pg.d.items()):
            if not f.is_zero():
                diffs.append({"source": [p, q], "target": [p - pg.r, q + pg.r - 1],
                              "matrix": f.matrix().to_lists()})
        entries = {f"{p},{q}": _entry(inv) for (p, q), inv in sorted(pg.invariants().items())}
        pages_out.append({"r": pg.r, "entries": entries, "differentials": diffs})
    phi = {}
    for n, chain in rep.phi.items():
        phi[str(n)] = [{"s": s - 1, **_entry(sq.invariants())} for s, sq in enumerate(chain)]
    verdicts = {"convergence": rep.convergence, "e2_rows": rep.e2_matches_rows,
                "direct_pages": rep.direct_matches}
    if args.json:
        print(_dump({"command": "spectral", "input": doc.name, "coefficients": label,
                     "stable_at": rep.stable_at, "pages": pages_out,
                     "einf": {f"{p},{q}": _entry(inv)
                              for (p, q), inv in sorted(rep.einf.invariants().items())},
                     "phi": phi, "homology": _graded_json(rep.homology),
                     "verdicts": verdicts}))
        return 0 if all(verdicts.values()) else 1
    for pg in rep.pages:
        print(f"page {pg.r}")
        for (p, q), inv in sorted(pg.invariants().items(), key=lambda kv: (kv[0][1], kv[0][0])):
            print(f"  E^{pg.r}[{p},{q}] = {format_invariants(inv)}")
        for d in next(x for x in pages_out if x["r"] == pg.r)["differentials"]:
            (p, q), (p2, q2) = d["source"], d["target"]
            print(f"  d^{pg.r}: [{p},{q}] -> [{p2},{q2}]")
            for row in d["matrix"]:
                print("    " + " ".join(str(x) for x in row))
    print(f"stable from page {rep.stable_at}")
    for n, chain in rep.phi.items():
        parts = [f"Phi^{s - 1} = {format_invariants(sq.invariants())}"
                 for s, sq in enumerate(chain)]
        print(f"H_{n}: " + ", ".join(parts))
    for key, ok in verdicts.items():
        print(f"{key}: {'PASS' if ok else 'FAIL'}")
    return 0 if all(verdicts.values()) else 1


def cmd_oracle(args) -> int:
    doc = _load(args)
    _require_valid(doc)
    sub = doc.sub if args.pair else ()
    if args.kind == "quotient":
        H = quotient_complex(doc.complex, sub).chain_complex().graded_homology()
    else:
        H = underlying_homology(doc.complex, sub)
    if args.json:
        print(_dump({"command": "oracle", "kind": args.kind, "input": doc.name,
                     "pair": bool(args.pair), "homology": _graded_json(H)}))
    else:
        for n in H.degrees():
            print(f"H_{n} = {H.format(n)}")
    return 0


def cmd_check(args) -> int:
    """Long exact sequence of the file's pair."""
    doc = _load(args)
    _require_valid(doc)
    rep = exactness_check(doc.pair(), doc.system(args.system))
    print(f"nodes checked: {rep.nodes_checked}")
    for f in rep.failures:
        print(f"  {f}")
    print("exactness: " + ("PASS" if rep.ok else "FAIL"))
    return 0 if rep.ok else 3


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="input .ghom file (bundled examples are found by name)")
    common.add_argument("--lenient", action="store_true",
                        help="downgrade unknown keys and duplicate simplices to warnings")

    ap = argparse.ArgumentParser(prog="ghom",
                                 description="Bredon homology of finite simplicial G-complexes")
    ap.add_argument("--version", action="version", version=f"ghom {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the complex and its systems")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("orbits", parents=[common], help="list simplex orbits and stabilizers")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("chain", parents=[common], help="assemble the Bredon chain complex")
    p.add_argument("--system", default="constant")
    p.add_argument("--pair", action="store_true", help="chains relative to [subcomplex]")
    p.add_argument("--emit", action="store_true", help="print bases and boundary matrices")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("homology", parents=[common], help="Bredon homology")
    p.add_argument("--system", default="constant",
                   help="constant, free-orbit or the name of a [system] section")
    p.add_argument("--pair", action="store_true", help="homology relative to [subcomplex]")
    p.add_argument("--reduced", metavar="VERTEX", help="reduced homology at a vertex")
    p.add_argument("--field", type=int, metavar="P", help="coefficients in the field F_P")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("spectral", parents=[common], help="skeletal spectral sequence")
    p.add_argument("--system", default="constant")
    p.add_argument("--graded", metavar="NAME", help="use a [graded NAME] section")
    p.add_argument("--pair", action="store_true")
    p.add_argument("--pages", type=int, metavar="R", help="compute pages up to R")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("oracle", help="ordinary homology for cross-checks")
    p.add_argument("kind", choices=["quotient", "underlying"])
    p.add_argument("file")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--pair", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("exactness", parents=[common],
                       help="check the long exact sequence of the pair")
    p.add_argument("--system", default="constant")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GhomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # any other failure is a defect
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
