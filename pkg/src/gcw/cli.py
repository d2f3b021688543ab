"""Command-line driver: basis enumeration, differentials, cohomology tables,
spectral pages, membership solving, certificate verification and self-tests.

Exit codes: 0 success, 1 mathematical negative (non-membership, failed
verification, failed relation), 2 usage error, 3 budget/cutoff overflow.
Output is deterministic; ``--format json`` emits the machine-readable form of
which the human output is a projection.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .graphs import (
    FLAVORS,
    GC2,
    ICG,
    BasisSlice,
    BudgetError,
    GraphError,
    GraphSum,
    ParseError,
    basis_for_grading,
    enumerate_basis,
    parse_graph_sum,
    serialize_graph,
)
from .lie import CutoffError
from .linalg import assemble, build_complex_slice, gc2_complex_slice, spectral_e1, spectral_er00
from .ops import (
    codegeneracy_s_j,
    cosimplicial_delta,
    cosimplicial_delta_j,
    d_component,
    differential_d,
    merge_externals,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

JSON_SCHEMA_VERSION = 1
CACHE_FORMAT_VERSION = 1


def _emit(args, payload, human_lines):
    if args.format == "json":
        payload = {"schema": JSON_SCHEMA_VERSION, **payload}
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


# ---------------------------------------------------------------------------
# basis cache
# ---------------------------------------------------------------------------


def _cache_dir(args):
    if args.no_cache:
        return None
    path = args.cache_dir or os.environ.get("GCW_CACHE_DIR")
    return path


def cached_basis(args, flavor, n, iv, e):
    """Basis slice with an on-disk cache; corrupt entries are recomputed."""
    path = _cache_dir(args)
    budget = {"edge_budget": args.budget_edges} if args.budget_edges else {}
    if path is None:
        return enumerate_basis(flavor, n, iv, e, **budget)
    os.makedirs(path, exist_ok=True)
    key = f"v{CACHE_FORMAT_VERSION}_{flavor}_{n}_{iv}_{e}.txt"
    fname = os.path.join(path, key)
    if os.path.exists(fname):
        from .graphs import canonicalize, parse_graph

        try:
            with open(fname, encoding="utf-8") as fh:
                lines = [ln.strip() for ln in fh if ln.strip()]
            header, records = lines[0], lines[1:]
            if header != f"{flavor} {n} {iv} {e} {len(records)}":
                raise ValueError("stale header")
            graphs = []
            for rec in records:
                fl, g = parse_graph(rec)
                c = canonicalize(g)
                if fl != flavor or c is None or c[1] != 1 or c[0].graph != g:
                    raise ValueError("non-canonical cache record")
                graphs.append(c[0])
            return BasisSlice(flavor, n, iv, e, tuple(graphs))
        except (OSError, ValueError, IndexError, ParseError, GraphError):
            pass  # fall through to recomputation
    slice_ = enumerate_basis(flavor, n, iv, e, **budget)
    tmp = fname + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(f"{flavor} {n} {iv} {e} {len(slice_)}\n")
        for cg in slice_:
            fh.write(serialize_graph(cg, flavor) + "\n")
    os.replace(tmp, fname)
    return slice_


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_enum(args):
    slice_ = cached_basis(args, args.flavor, args.n, args.iv, args.edges)
    records = [serialize_graph(cg, args.flavor) for cg in slice_]
    _emit(
        args,
        {
            "command": "enum",
            "flavor": args.flavor,
            "n": args.n,
            "iv": args.iv,
            "edges": args.edges,
            "count": len(records),
            "graphs": records,
        },
        [f"# {len(records)} basis graphs"] + records,
    )
    return EXIT_OK


def _read_sum(args):
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    return parse_graph_sum(text)


OPERATORS = {
    "d": differential_d,
    "d0": lambda s: d_component(s, 0),
    "d1": lambda s: d_component(s, 1),
    "delta": cosimplicial_delta,
    "merge": merge_externals,
}


def cmd_diff(args):
    s = _read_sum(args)
    if args.operator in OPERATORS:
        out = OPERATORS[args.operator](s)
    elif args.operator == "delta_j":
        if args.j is None:
            raise UsageError("delta_j needs --j")
        out = cosimplicial_delta_j(s, args.j)
    elif args.operator == "s_j":
        if args.j is None:
            raise UsageError("s_j needs --j")
        out = codegeneracy_s_j(s, args.j)
    else:
        raise UsageError(f"unknown operator {args.operator!r}")
    text = out.serialize()
    _emit(
        args,
        {"command": "diff", "operator": args.operator, "result": text.splitlines()},
        [text],
    )
    return EXIT_OK


def cmd_cohomology(args):
    if args.flavor == GC2:
        cs = gc2_complex_slice(args.n)
        label = f"GC2 loop order {args.n}"
    else:
        if args.aux_grade is None:
            raise UsageError("cohomology needs --aux-grade for ICG/GRAPHS")
        cs = build_complex_slice(args.flavor, args.n, args.aux_grade)
        label = f"{args.flavor}({args.n}) aux grade {args.aux_grade}"
    table = {}
    for d in cs.degrees:
        if cs.dim(d) or cs.cohomology_dim(d):
            table[d] = {"dim": cs.dim(d), "betti": cs.cohomology_dim(d)}
    if args.dump_matrix:
        for i, m in enumerate(cs.matrices):
            fname = f"{args.dump_matrix}.deg{cs.degrees[i]}.txt"
            with open(fname, "w", encoding="utf-8") as fh:
                fh.write(m.to_dump_text() + "\n")
    _emit(
        args,
        {"command": "cohomology", "label": label,
         "table": {str(k): v for k, v in table.items()}},
        [f"# {label}"]
        + [f"degree {d}: dim {v['dim']}, H = {v['betti']}" for d, v in sorted(table.items())],
    )
    return EXIT_OK


def cmd_spectral(args):
    if args.aux_grade is None:
        raise UsageError("spectral needs --aux-grade")
    r = args.k + 1
    e100 = spectral_e1(args.n, 0, 0, args.aux_grade)
    e110 = spectral_e1(args.n, 1, 0, args.aux_grade)
    er = spectral_er00(args.n, r, args.aux_grade)
    _emit(
        args,
        {"command": "spectral", "n": args.n, "aux_grade": args.aux_grade, "page": r,
         "E1_00": e100, "E1_10": e110, "Er_00": er},
        [
            f"# spectral data for n={args.n}, aux grade {args.aux_grade}",
            f"E_1^(0,0) = {e100}",
            f"E_1^(1,0) = {e110}",
            f"E_{r}^(0,0) = {er}",
        ],
    )
    return EXIT_OK


def cmd_membership(args):
    from .bridge import certificate_to_json, krv_hat_membership, krv_membership

    s = _read_sum(args)
    if args.kind == "krvhat":
        cert = krv_hat_membership(s, args.k)
    else:
        cert = krv_membership(s, args.k)
    if cert is None:
        _emit(args, {"command": "membership", "kind": args.kind, "k": args.k,
                     "member": False},
              [f"NotMember: no certificate at loop bound {args.k}"])
        return EXIT_NEGATIVE
    doc = certificate_to_json(cert)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
        human = [f"certificate written to {args.output}"]
    else:
        human = [doc]
    _emit(args, {"command": "membership", "kind": args.kind, "k": args.k,
                 "member": True, "certificate": json.loads(doc)}, human)
    return EXIT_OK


def cmd_verify(args):
    from .bridge import certificate_from_json, verify_certificate

    with open(args.input, encoding="utf-8") as fh:
        cert = certificate_from_json(fh.read())
    report = verify_certificate(cert)
    lines = [f"kind {report['kind']}, loop bound {report['k']}"]
    for name, ok in report["checks"]:
        lines.append(f"  {name}: {'pass' if ok else 'FAIL'}")
    lines.append("PASSED" if report["passed"] else "FAILED")
    _emit(args, {"command": "verify",
                 "report": {"kind": report["kind"], "k": report["k"],
                            "checks": [[n, bool(o)] for n, o in report["checks"]],
                            "passed": report["passed"]}}, lines)
    return EXIT_OK if report["passed"] else EXIT_NEGATIVE


def cmd_extract_grt(args):
    from .bridge import grt_extract
    from .lie import DEFAULT_CUTOFF

    s = _read_sum(args)
    res = grt_extract(s, args.cutoff or DEFAULT_CUTOFF)
    rel = res["relations"]
    all_ok = all(ok for ok, _ in rel.values()) if rel else True
    lines = [f"psi = {res['psi']}", f"phi1 = {res['phi1']}"]
    for name, (ok, wfail) in rel.items():
        lines.append(f"relation {name}: {'pass' if ok else f'FAIL at weight {wfail}'}")
    if res["observed_relation"]:
        lines.append(f"observed: {res['observed_relation']}")
    lines.append(f"note: {res['caveat']}")
    _emit(
        args,
        {"command": "extract-grt",
         "psi": {"".join(f"x{i}" for i in w): str(c) for w, c in res["psi"].items()},
         "relations": {k: [bool(a), b] for k, (a, b) in rel.items()},
         "observed_relation": res["observed_relation"],
         "caveat": res["caveat"],
         "passed": all_ok},
        lines,
    )
    return EXIT_OK if all_ok else EXIT_NEGATIVE


def cmd_selftest(args):
    """Abbreviated invariant suite: differentials, splittings, perturbation."""
    import random

    from .homotopy import GradedMap, perturb, random_filtered_complex, split

    failures = []
    lines = []

    def check(name, ok):
        lines.append(f"{name}: {'ok' if ok else 'FAIL'}")
        if not ok:
            failures.append(name)

    for n in (1, 2):
        for iv in range(0, 3):
            for e in range(0, 6):
                for cg in cached_basis(args, ICG, n, iv, e):
                    s = GraphSum(ICG, n, {cg: Fraction(1)})
                    if not differential_d(differential_d(s)).is_zero():
                        check(f"d2 {serialize_graph(cg, ICG)}", False)
                    if not cosimplicial_delta(cosimplicial_delta(s)).is_zero():
                        check(f"delta2 {serialize_graph(cg, ICG)}", False)
    check("d squared / delta squared on small slices", not failures)

    rng = random.Random(20240817)
    ok = True
    for _ in range(args.trials):
        cx, expected = random_filtered_complex(rng)
        s = split(cx)
        ident = GradedMap.identity(cx.dims)
        ok &= (s.pi0 @ s.pi0 - s.pi0).is_zero()
        ok &= (ident - s.pi0 - (cx.d0 @ s.h0 + s.h0 @ cx.d0)).is_zero()
        h, pi = perturb(s)
        ok &= (pi @ pi - pi).is_zero()
        ok &= (cx.d @ pi - pi @ cx.d).is_zero()
        ok &= (h @ h).is_zero()
        ok &= (h @ pi).is_zero() and (pi @ h).is_zero()
        ok &= (ident - pi - (cx.d @ h + h @ cx.d)).is_zero()
        ok &= all(pi.mat(j).rank() == expected.get(j, 0) for j in cx.degrees())
    check(f"perturbation identities on {args.trials} random complexes", ok)

    _emit(args, {"command": "selftest", "failures": failures,
                 "passed": not failures}, lines)
    return EXIT_OK if not failures else EXIT_NEGATIVE


class UsageError(ValueError):
    pass


def build_parser():
    p = argparse.ArgumentParser(
        prog="gcw",
        description="Exact-arithmetic workbench for internally connected graph complexes.",
    )
    p.add_argument("--version", action="version", version=f"gcw {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads (results are identical for any value)")
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--budget-edges", type=int, default=None)
    common.add_argument("--dump-matrix", default=None, metavar="PREFIX")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("enum", parents=[common], help="print a basis slice")
    q.add_argument("--flavor", choices=FLAVORS, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--iv", type=int, required=True)
    q.add_argument("--edges", type=int, required=True)
    q.set_defaults(func=cmd_enum)

    q = sub.add_parser("diff", parents=[common], help="apply a differential or cosimplicial map")
    q.add_argument("--operator", required=True,
                   choices=sorted(OPERATORS) + ["delta_j", "s_j"])
    q.add_argument("--j", type=int, default=None)
    q.add_argument("input", help="graph-sum file, or - for stdin")
    q.set_defaults(func=cmd_diff)

    q = sub.add_parser("cohomology", parents=[common], help="Betti table of a graded slice")
    q.add_argument("--flavor", choices=FLAVORS, default=ICG)
    q.add_argument("--n", type=int, required=True,
                   help="external arity; for GC2, the loop order")
    q.add_argument("--aux-grade", type=int, default=None)
    q.set_defaults(func=cmd_cohomology)

    q = sub.add_parser("spectral", parents=[common], help="first-page and corner dimensions")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--aux-grade", type=int, required=True)
    q.add_argument("--k", type=int, default=1, help="loop bound; the page index is k+1")
    q.set_defaults(func=cmd_spectral)

    q = sub.add_parser("membership", parents=[common], help="solve for a certificate")
    q.add_argument("--kind", choices=("krvhat", "krv"), default="krvhat")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--output", default=None, help="write the certificate JSON here")
    q.add_argument("input", help="tree graph-sum file, or - for stdin")
    q.set_defaults(func=cmd_membership)

    q = sub.add_parser("verify", parents=[common], help="re-verify a certificate file")
    q.add_argument("input")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("extract-grt", parents=[common],
                       help="run the extraction pipeline on a GC2 class")
    q.add_argument("--cutoff", type=int, default=None)
    q.add_argument("input", help="GC2 graph-sum file, or - for stdin")
    q.set_defaults(func=cmd_extract_grt)

    q = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    q.add_argument("--trials", type=int, default=25)
    q.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (BudgetError, CutoffError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # bridge/membership input errors
        from .bridge import BridgeError, MembershipError

        if isinstance(exc, (BridgeError, MembershipError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        raise


if __name__ == "__main__":
    sys.exit(main())
