"""liepair command line: validate | atiyah | pbw | kapranov | compare | cohomology | examples."""

import argparse
import json
import random
import sys

from . import catalog
from .algebra import ONE, ZERO, inverse, q_str, sym_dim_upto, sym_index
from .connection import (
    ClassIndependenceFailure, ExtendedConnection, atiyah_cocycle, class_independence,
    compatible_connection_exists, default_connection, is_coboundary, perturb_connection,
    validate_connection,
)
from .enveloping import (
    PBW, PBWFalsified, check_coalgebra_morphism, overlap_defects, transported_action_defects,
)
from .io import DocumentError, _rows, _tensor, dumps, loads
from .kapranov import (
    CoefficientAlgebra, KapranovError, calibrate_normalization, cohomology_bracket,
    compare_r2_atiyah, exhaustive_jacobi, extract, isomorphism_defects,
    jacobi_mc_crosscheck, matched_recursion_check, maurer_cartan_defect,
    reconstruction_defects, structure_isomorphism,
)
from .liealg import PairError, bott_action, check_matched_pair, flatness_defects, validate_lie
from .report import FAIL, PASS, TRIVIAL, Report, form_name, monomial_name, to_json, to_markdown

MAX_DEGREE = 8
MAX_DIM = 6

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


class InputError(Exception):
    pass


class GuardError(Exception):
    pass


def _row_names(rows, names, prefix):
    out = []
    for i, row in enumerate(rows):
        nz = [k for k, x in enumerate(row) if x]
        if len(nz) == 1 and row[nz[0]] == ONE:
            out.append(names[nz[0]])
        else:
            out.append(f"{prefix}{i}")
    return out


def e_names(pair):
    return _row_names(pair.j_rows, pair.L.names, "j")


def a_names(pair):
    return _row_names(pair.A_rows, pair.L.names, "a")


def _sym_el(el, names):
    return {monomial_name(m, names): c for m, c in sorted(el.items())}


def _read_doc(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        doc = loads(text)
    except DocumentError as exc:
        raise InputError(f"{path}: {exc}") from None
    return doc, dumps(doc)


def _guard(args, doc, N=None):
    if args.unsafe:
        return
    if doc.dimension > MAX_DIM:
        raise GuardError(f"dimension {doc.dimension} exceeds guard {MAX_DIM} (use --unsafe)")
    if N is not None and N > MAX_DEGREE:
        raise GuardError(f"degree {N} exceeds guard {MAX_DEGREE} (use --unsafe)")


def _pair(doc, complement=None):
    bad = validate_lie(doc.lie_algebra())
    if bad:
        raise InputError(f"structure constants violate the Lie axioms: {json.dumps(_first(bad))}")
    try:
        return doc.pair(complement)
    except PairError as exc:
        raise InputError(str(exc)) from None


def _first(records):
    r = dict(records[0])
    r["value"] = q_str(r["value"])
    return r


def _connection(args, doc, pair, attr="connection"):
    path = getattr(args, attr, None)
    if path in (None, "default"):
        return doc.connection_for(pair) if attr == "connection" else default_connection(pair)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if isinstance(data, dict):
        data = data.get("connection")
    try:
        t = _tensor(data, (pair.n, pair.q, pair.q), "$.connection")
        nabla = ExtendedConnection(pair, t)
    except (DocumentError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None
    bad = validate_connection(pair, nabla)
    if bad:
        raise InputError(f"{path}: connection does not extend the Bott action at a={bad[0]['a']}, b={bad[0]['b']}")
    return nabla


# -- commands ---------------------------------------------------------------------

def cmd_validate(args, rep, doc):
    _guard(args, doc)
    L = doc.lie_algebra()
    bad = validate_lie(L)
    rep.add("lie-axioms", FAIL if bad else PASS, {"violations": bad})
    if bad:
        return
    try:
        pair = doc.pair()
    except PairError as exc:
        details = {"error": str(exc)}
        if hasattr(exc, "indices"):
            details["indices"] = list(exc.indices)
            details["value"] = exc.value
        rep.add("pair", FAIL, details)
        return
    note = {}
    if pair.r == 0:
        note["note"] = "trivial pair: A = 0"
    elif pair.q == 0:
        note["note"] = "trivial pair: A = L"
    rep.add("subalgebra-closure", PASS, note)
    spl = []
    for b in range(pair.q):
        e = [ONE if i == b else ZERO for i in range(pair.q)]
        if pair.pr(pair.j(e)) != e:
            spl.append({"check": "pr.j", "b": b})
    for a in range(pair.r):
        if any(pair.pr(pair.a_vector(a))):
            spl.append({"check": "pr|A", "a": a})
    rep.add("splitting", FAIL if spl else PASS,
            {"defects": spl, "E_basis": e_names(pair), "A_basis": a_names(pair),
             "complement": pair.j_rows})
    bott = bott_action(pair)
    fl = flatness_defects(bott)
    rep.add("bott-flatness", FAIL if fl else (TRIVIAL if pair.is_degenerate else PASS), {"defects": fl})
    rep.add("matched-pair", PASS, {"matched": check_matched_pair(pair)})


def _alpha_details(pair, al):
    en, an = e_names(pair), a_names(pair)
    comps = {}
    for a in range(pair.r):
        for b in range(pair.q):
            for c in range(pair.q):
                v = al.value(a, b, c)
                if any(v):
                    comps[f"alpha({an[a]};{en[b]}){en[c]}"] = {en[o]: x for o, x in enumerate(v) if x}
    return comps


def cmd_atiyah(args, rep, doc):
    _guard(args, doc)
    pair = _pair(doc)
    nabla = _connection(args, doc, pair)
    if pair.is_degenerate:
        rep.add("atiyah", TRIVIAL, {"note": "trivially verified: degenerate pair"})
        return
    rep.add("connection-extends-bott", PASS)
    try:
        al = atiyah_cocycle(pair, nabla)
        rep.add("cocycle-closed", PASS, {"alpha": _alpha_details(pair, al)})
    except AssertionError as exc:
        rep.add("cocycle-closed", FAIL, {"error": str(exc)})
        return
    beta = is_coboundary(pair, al)
    class_zero = beta is not None
    rep.add("atiyah-class", PASS, {"class_zero": class_zero,
                                   "primitive": beta.vec() if beta is not None else None})
    witness = compatible_connection_exists(pair)
    agree = (witness is not None) == class_zero
    rep.add("compatible-connection", PASS if agree else FAIL,
            {"witness": witness.tensor if witness is not None else None, "agrees_with_class": agree})
    if args.seed is not None:
        rng = random.Random(args.seed)
        fails = []
        for t in range(args.variations):
            n2 = perturb_connection(pair, nabla, rng)
            try:
                class_independence(pair, nabla, n2)
            except ClassIndependenceFailure:
                fails.append({"variation": t, "connection": n2.tensor})
        rep.add("class-independence", FAIL if fails else PASS,
                {"seed": args.seed, "variations": args.variations, "failures": fails})


def _pbw(pair, nabla, N):
    try:
        return PBW(pair, nabla, N)
    except PBWFalsified as exc:
        raise _Falsified(str(exc)) from None


class _Falsified(Exception):
    pass


def cmd_pbw(args, rep, doc):
    N = args.max_degree
    _guard(args, doc, N)
    pair = _pair(doc)
    nabla = _connection(args, doc, pair)
    try:
        pbw = _pbw(pair, nabla, N)
    except _Falsified as exc:
        rep.add("pbw-symbol", FAIL, {"error": str(exc)})
        return
    en = e_names(pair)
    unit_ok = pbw.images[()] == {(): ONE}
    rep.add("pbw-unit", PASS if unit_ok else FAIL, {"PBW(1)": _sym_el(pbw.images[()], en)})
    if N == 0:
        return
    env_dim = pbw.env.dimension(N)
    want = sym_dim_upto(pair.n, N)
    overlaps = overlap_defects(pbw.env)
    rep.add("enveloping-dimension", PASS if env_dim == want and not overlaps else FAIL,
            {"dim": env_dim, "pbw_count": want, "overlap_defects": overlaps})
    qd = len(pbw.Q.basis)
    rep.add("quotient-dimension", PASS if qd == sym_dim_upto(pair.q, N) else FAIL,
            {"dim": qd, "sym_dim": sym_dim_upto(pair.q, N)})
    gens = [b for b in range(pair.q) if pbw.images[(b,)] != {(b,): ONE}]
    rep.add("pbw-generators", FAIL if gens else (TRIVIAL if pair.q == 0 else PASS), {"defects": gens})
    mats = {}
    for d in range(N + 1):
        blk = pbw.degree_block(d)
        mats[str(d)] = blk
    try:
        inverse(pbw.matrix())
        inv_ok = True
    except ValueError:
        inv_ok = False
    rep.add("pbw-matrices", PASS if inv_ok else FAIL,
            {"symbol_blocks": mats, "images": {monomial_name(m, en): _sym_el(img, en)
                                               for m, img in sorted(pbw.images.items())}})
    if args.check_inverse:
        bad = []
        for m in pbw.basis:
            if pbw.inverse(pbw.images[m]) != {m: ONE}:
                bad.append({"direction": "inverse.pbw", "monomial": monomial_name(m, en)})
            if pbw.apply(pbw.inverse({m: ONE})) != {m: ONE}:
                bad.append({"direction": "pbw.inverse", "monomial": monomial_name(m, en)})
        rep.add("round-trip", FAIL if bad else PASS, {"defects": bad})
    if args.check_coalgebra:
        bad = check_coalgebra_morphism(pbw, N)
        rep.add("coalgebra-morphism", FAIL if bad else PASS, {"defects": bad})
    if pair.r:
        bad = transported_action_defects(pbw)
        rep.add("transported-action", FAIL if bad else (TRIVIAL if pair.q == 0 else PASS), {"defects": bad})


def _r_details(K, pair):
    en, an = e_names(pair), a_names(pair)
    out = {}
    for k in sorted(K.R):
        mons = sym_index(K.q, k)
        out[str(k)] = {
            "monomials": [monomial_name(m, en) for m in mons],
            "values": {an[a]: [K.R[k][a].get(m, [ZERO] * K.q) for m in mons] for a in range(K.r)},
        }
    return {"E_basis": en, "A_basis": an, "R": out, "truncated_at": K.N}


def cmd_kapranov(args, rep, doc):
    N, M = args.max_degree, args.jacobi_arity
    _guard(args, doc, N)
    if M > N:
        raise InputError(f"--jacobi-arity {M} exceeds --max-degree {N}")
    pair = _pair(doc)
    if args.matched_recursion and not check_matched_pair(pair):
        raise InputError("matched recursion requested on a pair that is not matched")
    nabla = _connection(args, doc, pair)
    if pair.is_degenerate:
        rep.add("kapranov", TRIVIAL, {"note": "trivially verified: degenerate pair"})
        return
    try:
        K = extract(pair, nabla, N)
    except (AssertionError, PBWFalsified) as exc:
        rep.add("extraction", FAIL, {"error": str(exc)})
        return
    rep.add("extraction", PASS, _r_details(K, pair))
    bad = reconstruction_defects(K)
    rep.add("coderivation-reconstruction", FAIL if bad else PASS, {"defects": bad})
    triv = K.is_zero()
    for n in range(1, M + 1):
        fails, count = exhaustive_jacobi(K, n)
        rep.add(f"jacobi-{n}", FAIL if fails else PASS, {"tuples": count, "failures": fails})
    for k in range(2, N + 1):
        d = maurer_cartan_defect(K, k)
        rep.add(f"maurer-cartan-{k}", FAIL if d else (TRIVIAL if triv else PASS),
                {"defect": {f"{form_name(I, a_names(pair))}|{monomial_name(m, e_names(pair))}": v
                            for (I, m), v in sorted(d.items())}})
    bad = [x for n in range(2, min(M, N) + 1) for x in jacobi_mc_crosscheck(K, n)]
    rep.add("jacobi-mc-crosscheck", FAIL if bad else PASS, {"factor": "1", "mismatches": bad})
    if args.compare_atiyah:
        al = atiyah_cocycle(pair, nabla)
        try:
            cmp = compare_r2_atiyah(K, al)
            rep.add("r2-vs-atiyah", PASS, {"c": cmp.c, "calibrating": cmp.calibrating, "beta": cmp.beta})
        except KapranovError as exc:
            rep.add("r2-vs-atiyah", FAIL, {"error": str(exc)})
    if args.matched_recursion:
        try:
            norm = calibrate_normalization(pair, nabla, K)
        except KapranovError as exc:
            raise InputError(str(exc)) from None
        rep.add("recursion-calibration", PASS if norm else FAIL, {"normalization": norm, "calibrated_at": 2})
        if norm:
            for k in range(2, N):
                d = matched_recursion_check(pair, nabla, K, k, norm)
                rep.add(f"matched-recursion-{k + 1}", FAIL if d else PASS, {"defects": d})


def _parse_rows(text, n):
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--alt-splitting: {exc.msg}") from None
    try:
        return _rows(rows, n, "--alt-splitting")
    except DocumentError as exc:
        raise InputError(str(exc)) from None


def cmd_compare(args, rep, doc):
    N = args.max_degree
    _guard(args, doc, N)
    pair1 = _pair(doc)
    n1 = _connection(args, doc, pair1)
    if args.alt_splitting is not None:
        pair2 = _pair(doc, _parse_rows(args.alt_splitting, doc.dimension))
        n2 = default_connection(pair2) if args.alt_connection is None else _connection(args, doc, pair2, "alt_connection")
    elif args.alt_connection is not None:
        pair2 = pair1
        n2 = _connection(args, doc, pair2, "alt_connection")
    else:
        pair2, n2 = pair1, n1
    if pair1.is_degenerate:
        rep.add("isomorphism", TRIVIAL, {"note": "trivially verified: degenerate pair"})
        return
    K1 = extract(pair1, n1, N)
    K2 = extract(pair2, n2, N)
    res = structure_isomorphism(K1, K2, N)
    if res is None:
        rep.add("isomorphism", FAIL, {"note": "no intertwining coalgebra isomorphism found"})
        return
    phi1, Phi = res
    en = e_names(pair1)
    rep.add("isomorphism", PASS, {"phi_1": phi1, "phi": {
        str(k): {monomial_name(m, en): v for m, v in sorted(Phi[k].items())} for k in sorted(Phi)}})
    bad = isomorphism_defects(K1, K2, phi1, Phi, N)
    rep.add("substitution", FAIL if bad else PASS, {"defects": bad})


def cmd_cohomology(args, rep, doc):
    N = max(args.max_degree, 2)
    _guard(args, doc, N)
    pair = _pair(doc)
    nabla = _connection(args, doc, pair)
    if pair.is_degenerate:
        rep.add("cohomology-bracket", TRIVIAL, {"note": "trivially verified: degenerate pair"})
        return
    K = extract(pair, nabla, N)
    C = None
    if args.coefficients == "dual":
        C = CoefficientAlgebra.dual_numbers(pair.a_constants())
    cb = cohomology_bracket(K, C)
    rep.add("cohomology", PASS, {"dims": {str(p): d for p, d in sorted(cb.dims.items())},
                                 "coefficients": args.coefficients})
    rep.add("bracket-well-defined", PASS if cb.well_defined else FAIL,
            {"failures": [f for f in cb.failures if f["check"] == "representative"]})
    rep.add("bracket-jacobi", PASS if cb.jacobi else FAIL,
            {"failures": [f for f in cb.failures if f["check"] == "jacobi"]})
    rep.add("bracket-trivial", PASS, {"trivial": cb.trivial, "table": {
        f"{a[0]}.{a[1]}|{b[0]}.{b[1]}": v for (a, b), v in sorted(cb.table.items())}})


def cmd_examples(args, out):
    if args.list:
        out.write("\n".join(catalog.NAMES) + "\n")
        return EXIT_OK
    name, path = args.emit
    try:
        doc = catalog.get(name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    text = dumps(doc)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "atiyah": cmd_atiyah, "pbw": cmd_pbw, "kapranov": cmd_kapranov,
    "compare": cmd_compare, "cohomology": cmd_cohomology,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "md"], default="json")
    common.add_argument("--out")
    common.add_argument("--seed", type=int)
    common.add_argument("--unsafe", action="store_true")
    common.add_argument("--timings", action="store_true", help="record elapsed seconds per check")
    ap = argparse.ArgumentParser(prog="liepair", description="Exact checks for Lie pairs.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", parents=[common])
    p.add_argument("file")
    p = sub.add_parser("atiyah", parents=[common])
    p.add_argument("file")
    p.add_argument("--connection", default="default")
    p.add_argument("--variations", type=int, default=3)
    p = sub.add_parser("pbw", parents=[common])
    p.add_argument("file")
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--check-inverse", action="store_true")
    p.add_argument("--check-coalgebra", action="store_true")
    p.add_argument("--connection", default="default")
    p = sub.add_parser("kapranov", parents=[common])
    p.add_argument("file")
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--jacobi-arity", type=int, default=3)
    p.add_argument("--compare-atiyah", action="store_true")
    p.add_argument("--matched-recursion", action="store_true")
    p.add_argument("--connection", default="default")
    p = sub.add_parser("compare", parents=[common])
    p.add_argument("file")
    p.add_argument("--alt-splitting", help="JSON rows of the alternative complement")
    p.add_argument("--alt-connection", help="path to an alternative connection tensor")
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--connection", default="default")
    p = sub.add_parser("cohomology", parents=[common])
    p.add_argument("file")
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--coefficients", choices=["rational", "dual"], default="rational")
    p.add_argument("--connection", default="default")
    p = sub.add_parser("examples", parents=[common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", action="store_true")
    g.add_argument("--emit", nargs=2, metavar=("NAME", "PATH"))
    return ap


def _flags(args):
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("command", "file", "out", "format", "timings")}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "examples":
            return cmd_examples(args, stdout)
        if getattr(args, "max_degree", 0) < 0:
            raise InputError("--max-degree must be non-negative")
        doc, text = _read_doc(args.file)
        rep = Report(args.command, text, _flags(args), timings=args.timings)
        rep.start()
        COMMANDS[args.command](args, rep, doc)
    except InputError as exc:
        stderr.write(f"liepair: input error: {exc}\n")
        return EXIT_INPUT
    except GuardError as exc:
        stderr.write(f"liepair: resource guard: {exc}\n")
        return EXIT_GUARD
    d = rep.to_dict()
    body = to_json(d) if args.format == "json" else to_markdown(d)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(body)
        except OSError as exc:
            stderr.write(f"liepair: input error: {args.out}: {exc.strerror}\n")
            return EXIT_INPUT
    else:
        stdout.write(body)
    return EXIT_FAIL if rep.failed() else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
