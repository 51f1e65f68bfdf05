"""Command-line front end: parse the graph DSL, dispatch, report, exit code.

Exit codes: 0 success or PASS, 1 verification FAIL, 2 usage/parse/precondition
error, 3 resource limit.  Reports are deterministic for fixed input and flags;
timing is reported outside the result payload.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path as FsPath

from .classify import classify as classify_graph
from .classify import ideal_report
from .ktheory import (KTheoryResult, graph_k_theory,
                      verify_multiplication_by_m, verify_on_subquotients)
from .construct import blowup_graph, jeong_park_subgraph
from .dsl import emit_graph, parse_graph, parse_pathspec
from .errors import ContractViolation, DslError, GraphckError, ResourceLimit
from .graphs import (DirectedGraph, every_vertex_connects_to_cycle, is_acyclic,
                     satisfies_condition_K, sinks)
from .rep import kappa_matrix, approximation_gap
from .symbolic import (AlgebraMode, FormalSum, commutator_is_zero,
                       edge_isometry, gabe_approximate_identity, iota_image,
                       jm_image, normal_form, sums_equal, verify_tck_family,
                       vertex_projection)

SCHEMA = "graphck/1"


def _digest(g: DirectedGraph) -> str:
    return hashlib.sha256(emit_graph(g).encode("utf-8")).hexdigest()


def _read_graph(path: str) -> DirectedGraph:
    text = sys.stdin.read() if path == "-" else FsPath(path).read_text(encoding="utf-8")
    return parse_graph(text)


def _report(command: str, g: DirectedGraph | None, result, citations=(),
            started: float | None = None) -> dict:
    rep = {
        "schema": SCHEMA,
        "command": command,
        "input_digest": _digest(g) if g is not None else None,
        "result": result,
        "citations": list(citations),
    }
    if started is not None:
        rep["timing_ms"] = round(1000.0 * (time.monotonic() - started), 3)
    return rep


def _emit(report: dict, as_json: bool, text_lines=None) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=False))
    else:
        for line in (text_lines or [json.dumps(report["result"], indent=2)]):
            print(line)


def _ktheory_payload(res: KTheoryResult) -> dict:
    return {"k0": {"rank": res.k0_free_rank, "torsion": res.k0_torsion},
            "k1": {"rank": res.k1_rank}}


def _cmd_analyze(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    conditions = {
        "condition_K": satisfies_condition_K(g),
        "every_vertex_connects_to_cycle": every_vertex_connects_to_cycle(g),
        "acyclic": is_acyclic(g),
        "sinks": [v.id for v in sinks(g)],
    }
    ideals = ideal_report(g, args.max_vertices).as_dict()
    if sinks(g):
        ktheory = {"skipped": "graph has sinks"}
    else:
        ktheory = _ktheory_payload(graph_k_theory(g))
    verdict = classify_graph(g, args.max_vertices)
    result = {"conditions": conditions, "ideals": ideals, "ktheory": ktheory,
              "classification": verdict.as_dict()}
    citations = [r.citation for r in verdict.rules_fired]
    rep = _report("analyze", g, result, citations, started)
    lines = [f"condition (K): {conditions['condition_K']}",
             f"every vertex connects to a cycle: "
             f"{conditions['every_vertex_connects_to_cycle']}",
             f"acyclic: {conditions['acyclic']}",
             f"sinks: {', '.join(conditions['sinks']) or 'none'}",
             f"gauge-invariant ideal lattice: {len(ideals['sets'])} sets",
             f"K-theory: {ktheory}",
             f"nuclear dimension: lower={verdict.lower} upper={verdict.upper} "
             f"toeplitz_upper={verdict.toeplitz_upper}"]
    _emit(rep, args.json, lines)
    return 0


def _cmd_ktheory(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    res = graph_k_theory(g)
    payload = _ktheory_payload(res)
    payload["verifications"] = []
    ok = True
    if args.verify_m is not None:
        if args.subquotients:
            report = verify_on_subquotients(g, args.verify_m,
                                                        args.max_vertices)
            for e in report.entries:
                payload["verifications"].append({
                    "target": e.target, "m": args.verify_m,
                    "pass": e.status != "fail",
                    "status": e.status,
                    "certificate": _cert_payload(e.certificate)})
            ok = report.ok
        else:
            cert = verify_multiplication_by_m(g, args.verify_m)
            payload["verifications"].append({
                "target": "whole graph", "m": args.verify_m,
                "pass": cert.ok and cert.reverify(),
                "certificate": _cert_payload(cert)})
            ok = cert.ok
    rep = _report("ktheory", g, payload, started=started)
    lines = [f"K0: free rank {res.k0_free_rank}, torsion {res.k0_torsion or 'none'}",
             f"K1: free rank {res.k1_rank}"]
    for v in payload["verifications"]:
        lines.append(f"multiplication by {v['m']} on {v['target']}: "
                     + ("PASS" if v["pass"] else "FAIL"))
    _emit(rep, args.json, lines)
    return 0 if ok else 1


def _cert_payload(cert) -> dict | None:
    if cert is None:
        return None
    return {"ok": cert.ok,
            "k0_witnesses": cert.k0_witnesses,
            "k1_basis": cert.k1_basis,
            "failure": cert.failure}


def _cmd_ideals(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    report = ideal_report(g, args.max_vertices)
    rep = _report("ideals", g, report.as_dict(), started=started)
    lines = []
    for e in report.entries:
        lines.append("{" + ",".join(e.vertices) + "}: "
                     f"restriction purely infinite={e.restriction_purely_infinite}, "
                     f"quotient acyclic={e.quotient_acyclic}")
    if report.warning:
        lines.append("warning: " + report.warning)
    _emit(rep, args.json, lines)
    return 0


def _cmd_classify(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    verdict = classify_graph(g, args.max_vertices)
    rep = _report("classify", g, verdict.as_dict(),
                  [r.citation for r in verdict.rules_fired], started)
    lines = [f"nuclear dimension lower bound: {verdict.lower}",
             f"nuclear dimension upper bound: {verdict.upper}",
             f"Toeplitz algebra upper bound: {verdict.toeplitz_upper}"]
    for r in verdict.rules_fired:
        lines.append(f"[{r.rule}] {r.citation}")
    _emit(rep, args.json, lines)
    return 0


def _cmd_blowup(args) -> int:
    g = _read_graph(args.graph)
    bg = blowup_graph(g, args.m)
    sys.stdout.write(emit_graph(bg.graph))
    return 0


def _cmd_jeong_park(args) -> int:
    g = _read_graph(args.graph)
    v_set = {g.vertex(x) for x in args.vertices.split(",") if x} if args.vertices else set()
    f_set = {g.edge(x) for x in args.edges.split(",") if x} if args.edges else set()
    sub = jeong_park_subgraph(g, v_set, f_set)
    sys.stdout.write(emit_graph(sub))
    return 0


def _cmd_kappa(args) -> int:
    started = time.monotonic()
    kappa = kappa_matrix(args.m)
    rows = [[str(x) for x in row] for row in kappa.entries]
    rep = _report("kappa", None, {"m": args.m, "entries": rows}, started=started)
    width = max(len(s) for row in rows for s in row)
    lines = ["  ".join(s.rjust(width) for s in row) for row in rows]
    _emit(rep, args.json, lines)
    return 0


def _cmd_approx(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    mu = parse_pathspec(g, args.mu)
    nu = parse_pathspec(g, args.nu)
    bg = blowup_graph(g, args.m)
    gap = approximation_gap(bg, mu, nu, args.depth)
    result = {
        "m": args.m, "mu": mu.id, "nu": nu.id,
        "max_coefficient": str(gap.max_coefficient),
        "k_values": [str(v) for v in gap.coefficients.values],
        "max_defect": str(gap.coefficients.max_defect),
        "difference_terms": len(gap.difference.terms),
    }
    rep = _report("approx", g, result, started=started)
    lines = [f"max |coefficient| of the gap: {gap.max_coefficient}",
             f"per-length coefficient sums: "
             + " ".join(str(v) for v in gap.coefficients.values),
             f"max defect from the coefficient table: {gap.coefficients.max_defect}"]
    _emit(rep, args.json, lines)
    return 0


def _cmd_verify_hom(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    bg = blowup_graph(g, args.m)
    if args.which == "iota":
        vertex_images = {v: iota_image(bg, v) for v in g.vertices}
        edge_images = {e: iota_image(bg, e) for e in g.edges}
        check = verify_tck_family(g, vertex_images, edge_images,
                                  AlgebraMode.TOEPLITZ, args.depth)
        target = "inclusion into the blow-up (relation-free mode)"
    else:
        em = bg.graph
        vertex_images = {v: jm_image(bg, v) for v in em.vertices}
        edge_images = {e: jm_image(bg, e) for e in em.edges}
        check = verify_tck_family(em, vertex_images, edge_images,
                                  AlgebraMode.CUNTZ_KRIEGER, args.depth)
        target = "reinclusion into the base algebra with matrix units"
    result = {"which": args.which, "m": args.m, "pass": check.ok,
              "failed_relation": check.failed_relation}
    rep = _report("verify-hom", g, result, started=started)
    line = f"{target}: " + ("PASS" if check.ok else f"FAIL ({check.failed_relation})")
    _emit(rep, args.json, [line])
    return 0 if check.ok else 1


def _cmd_quasidiag(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    h = {g.vertex(x) for x in args.ideal.split(",") if x}
    x = {g.vertex(t) for t in args.window.split(",") if t}
    e_x = gabe_approximate_identity(g, h, x)
    failures = []
    if not sums_equal(e_x * e_x, e_x, AlgebraMode.CUNTZ_KRIEGER, args.depth):
        failures.append("projection")
    words = [("p_" + v.id, vertex_projection(g, v)) for v in g.vertices if v in x]
    for e in g.edges:
        if e.source in x and e.range in x:
            words.append(("s_" + e.id, edge_isometry(g, e)))
    for name, w in words:
        if not commutator_is_zero(e_x, w, args.depth):
            failures.append(f"commutator({name})")
    result = {"ideal": sorted(v.id for v in h), "window": sorted(v.id for v in x),
              "terms": len(e_x.terms), "pass": not failures, "failures": failures}
    rep = _report("quasidiag", g, result, started=started)
    line = "PASS" if not failures else "FAIL (" + ", ".join(failures) + ")"
    _emit(rep, args.json, [line])
    return 0 if not failures else 1


def _cmd_verify_m(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph)
    cert = verify_multiplication_by_m(g, args.m)
    ok = cert.ok and cert.reverify()
    result = {"m": args.m, "pass": ok, "certificate": _cert_payload(cert)}
    rep = _report("verify-m", g, result, started=started)
    _emit(rep, args.json, ["PASS" if ok else f"FAIL ({cert.failure})"])
    return 0 if ok else 1


def _cmd_corpus(args) -> int:
    root = FsPath(args.directory)
    if not root.is_dir():
        raise ContractViolation(f"{args.directory} is not a directory")
    fixtures = sorted(root.glob("*.expect.json"))
    if not fixtures:
        raise ContractViolation(f"no *.expect.json fixtures in {args.directory}")
    failures = []
    for expect_file in fixtures:
        spec = json.loads(expect_file.read_text(encoding="utf-8"))
        graph_file = expect_file.with_name(expect_file.name.replace(".expect.json", ".g"))
        argv = list(spec["command"]) + ["--json", str(graph_file)]
        code, report = _run_capture(argv)
        if report is None or report.get("result") != spec["result"]:
            failures.append(expect_file.name)
            print(f"{expect_file.name}: MISMATCH")
        else:
            print(f"{expect_file.name}: ok")
    if failures:
        print(f"{len(failures)} fixture(s) failed")
        return 1
    print(f"all {len(fixtures)} fixture(s) match")
    return 0


def _run_capture(argv: list[str]) -> tuple[int, dict | None]:
    """Run a command, capturing its JSON report instead of printing it."""
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    try:
        with redirect_stdout(buf):
            code = main(argv)
    except SystemExit as ex:  # argparse failure inside a fixture
        return int(ex.code or 2), None
    text = buf.getvalue()
    try:
        return code, json.loads(text)
    except json.JSONDecodeError:
        return code, {"result": text}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphck",
        description="invariants and verdicts for finite-graph operator algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("graph", help="graph DSL file, or - for stdin")
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--max-vertices", type=int, default=20,
                       help="bound for subset enumeration")
        p.add_argument("--depth", type=int, default=None,
                       help="leveling depth for symbolic equality")
        p.add_argument("--truncation", type=int, default=None,
                       help="cutoff for truncated representations")

    p = sub.add_parser("analyze", help="conditions, ideals, K-theory, classification")
    common(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("ktheory", help="K-groups and multiplication-by-m checks")
    common(p)
    p.add_argument("--verify-m", type=int, default=None, metavar="M")
    p.add_argument("--subquotients", action="store_true")
    p.set_defaults(func=_cmd_ktheory)

    p = sub.add_parser("ideals", help="gauge-invariant ideal lattice report")
    common(p)
    p.set_defaults(func=_cmd_ideals)

    p = sub.add_parser("classify", help="nuclear-dimension bounds")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("blowup", help="emit the m-th blow-up graph as DSL")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_blowup)

    p = sub.add_parser("jeong-park", help="closure subgraph containing the inputs")
    common(p)
    p.add_argument("--vertices", default="", help="comma-separated vertex ids")
    p.add_argument("--edges", default="", help="comma-separated edge ids")
    p.set_defaults(func=_cmd_jeong_park)

    p = sub.add_parser("kappa", help="print the exact weight matrix")
    common(p, graph=False)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_kappa)

    p = sub.add_parser("approx", help="compression-vs-inclusion gap of a word")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mu", required=True, help="path: vertex id or dot-joined edge ids")
    p.add_argument("--nu", required=True, help="path: vertex id or dot-joined edge ids")
    p.set_defaults(func=_cmd_approx)

    p = sub.add_parser("verify-hom", help="check generator images form a family")
    common(p)
    p.add_argument("--which", choices=("iota", "jm"), required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_verify_hom)

    p = sub.add_parser("verify-m", help="multiplication-by-m certificate")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_verify_m)

    p = sub.add_parser("quasidiag", help="window projection and commutation checks")
    common(p)
    p.add_argument("--ideal", required=True, help="comma-separated vertex ids")
    p.add_argument("--window", required=True, help="comma-separated vertex ids")
    p.set_defaults(func=_cmd_quasidiag)

    p = sub.add_parser("corpus", help="run fixture directory and compare reports")
    p.add_argument("directory")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        # argparse exits 2 on usage errors already; normalize the success path
        if ex.code in (0, None):
            return 0
        return 2
    try:
        return args.func(args)
    except DslError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    except ContractViolation as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    except ResourceLimit as ex:
        print(f"resource limit: {ex}", file=sys.stderr)
        return 3
    except FileNotFoundError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    except GraphckError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
