"""Command-line front end: ``ggk <command> FILE ...``.

Exit codes: 0 success, 1 input or validation error, 2 a check failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .certificate import Certificate, certify_fjcw, check_certificate
from .constructions import (
    FiniteEqualTo,
    kernel_vertex_stabilizer_class,
    lemma_tree_check,
    quotient_by_max_finite_normal,
    quotient_by_max_infinite_cyclic,
    verify_edge_kernel_is_max_finite_normal,
)
from .dot import ball_to_dot
from .errors import ClaimViolated, GGKError
from .gog import infinite_edge_reduction, presentation, validate
from .pi1 import reduce
from .serialize import dumps, load, parse_word
from .tree import ball
from .vcgroup import max_finite_normal, model_name, quotient_by_max_finite


class _InputInvalid(Exception):
    def __init__(self, rep):
        super().__init__("; ".join(f"{i.code}: {i.message}" for i in rep.issues))
        self.rep = rep


class _BadInput(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


def _emit(args, text: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, default=repr))
    else:
        print(text)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_validate(args) -> None:
    gog = load(args.file, strict=False)
    rep = validate(gog)
    if not rep.ok:
        raise _InputInvalid(rep)
    _emit(args, f"ok: {len(gog.vertices)} vertices, {len(gog.graph.edge_ids)} edges",
          {"command": "validate", **rep.to_dict()})


def cmd_classify(args) -> None:
    gog = load(args.file)
    rows = []
    for v in gog.vertices:
        G = gog.vertex_groups[v]
        F = max_finite_normal(G).subgroup
        rows.append({"vertex": v, "class": G.kind, "max_finite_normal_order": F.order,
                     "quotient": model_name(quotient_by_max_finite(G).model), "group": G.describe()})
    text = "\n".join(f"{r['vertex']}: {r['class']}, |F| = {r['max_finite_normal_order']}, "
                     f"G/F = {r['quotient']}" for r in rows)
    _emit(args, text, {"command": "classify", "vertices": rows})


def cmd_present(args) -> None:
    gog = load(args.file)
    p = presentation(gog)
    _emit(args, p.text(), {"command": "present", "presentation": p.text(),
                           "generators": list(p.generators)})


def cmd_reduce(args) -> None:
    gog = load(args.file)
    w = parse_word(gog, args.word)
    nf = reduce(w, args.strategy)
    _emit(args, nf.text(), {"command": "reduce", "input": w.text(), "normal_form": nf.text(),
                            "length": len(nf)})


def cmd_tree_ball(args) -> None:
    gog = load(args.file)
    tb = ball(gog, args.base, args.radius, args.branch_cap)
    if args.dot:
        _write(args.dot, ball_to_dot(tb))
    trunc = sum(1 for x in tb.vertices if tb.truncated[x])
    _emit(args, f"{len(tb.vertices)} vertices, {len(tb.edges)} edges, {trunc} truncated",
          {"command": "tree-ball", "vertices": len(tb.vertices), "edges": len(tb.edges),
           "truncated": trunc, "labels": [x.text(gog) for x in tb.vertices]})


def _quotient(args, construct, name) -> None:
    gog = load(args.file)
    r = construct(gog)
    text = dumps(r.gog)
    if args.out:
        _write(args.out, text + "\n")
    if args.json:
        print(json.dumps({"command": name, "document": json.loads(text)}, sort_keys=True))
    elif not args.out:
        print(text)


def cmd_quotient_fin(args) -> None:
    _quotient(args, quotient_by_max_finite_normal, "quotient-fin")


def cmd_quotient_cyc(args) -> None:
    _quotient(args, quotient_by_max_infinite_cyclic, "quotient-cyc")


def cmd_check(args) -> None:
    gog = load(args.file)
    payload: dict = {"command": "check", "lemma": args.lemma, "radius": args.radius}
    if args.lemma == "tree":
        rep = lemma_tree_check(gog, args.radius)
        payload.update(rep.to_dict())
        if not rep.ok:
            raise CheckFailed("quotient ball check failed", payload)
        _emit(args, "quotient ball is a tree, matches universal cover", payload)
        return
    leaves, _ = infinite_edge_reduction(gog)
    results = []
    if args.lemma == "edge-kernel":
        for L in leaves:
            for e in L.graph.oriented_edges:
                try:
                    verify_edge_kernel_is_max_finite_normal(L, e)
                    results.append({"edge": list(e), "ok": True})
                except ClaimViolated as exc:
                    results.append({"edge": list(e), "ok": False, "witness": exc.witness})
        payload["edges"] = results
        if not all(r["ok"] for r in results):
            raise CheckFailed("edge kernel differs from the maximal finite normal subgroup", payload)
        _emit(args, f"edge kernels are the maximal finite normal subgroups ({len(results)} oriented edges)",
              payload)
        return
    # stabilizers
    for L in leaves:
        if not L.graph.edge_ids and not L.vertex_groups[L.vertices[0]].is_infinite:
            continue
        r = quotient_by_max_finite_normal(L)
        r2 = quotient_by_max_infinite_cyclic(r.gog)
        for v in L.vertices:
            c1 = kernel_vertex_stabilizer_class(r.q, v)
            c2 = kernel_vertex_stabilizer_class(r2.q, v)
            ok = isinstance(c1, FiniteEqualTo) and c1.matches_max_finite and not isinstance(c2, FiniteEqualTo)
            results.append({"vertex": v, "finite_normal": c1.describe(), "infinite_cyclic": c2.describe(),
                            "ok": ok})
    payload["vertices"] = results
    if not all(r["ok"] for r in results):
        raise CheckFailed("kernel stabilizer classes differ from the expected ones", payload)
    _emit(args, "\n".join(f"{r['vertex']}: {r['finite_normal']}, {r['infinite_cyclic']}" for r in results)
          or "no infinite leaves", payload)


def cmd_certify(args) -> None:
    gog = load(args.file)
    cert = certify_fjcw(gog)
    text = cert.to_json()
    if args.out:
        _write(args.out, text + "\n")
        _emit(args, f"certificate with {len(cert.nodes)} nodes written to {args.out}",
              {"command": "certify", "nodes": len(cert.nodes), "out": args.out})
    else:
        print(text)


def cmd_check_cert(args) -> None:
    with open(args.file, encoding="utf-8") as fh:
        try:
            cert = Certificate.from_json(fh.read())
        except json.JSONDecodeError as exc:
            raise _BadInput(f"not valid JSON: {exc}")
    rep = check_certificate(cert)
    payload = {"command": "check-cert", **rep.to_dict()}
    if not rep.ok:
        raise CheckFailed("; ".join(f"{i.code}: {i.message}" for i in rep.issues[:5]), payload)
    _emit(args, f"certificate ok ({rep.facts.get('nodes')} nodes)", payload)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ggk", description="Graphs of virtually cyclic groups.")
    p.add_argument("--json", action="store_true", help="machine-readable output and diagnostics")
    # SUPPRESS keeps a flag given before the subcommand from being reset
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.add_argument("file")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "validate a graph-of-groups document")
    add("classify", cmd_classify, "finite / orientable / nonorientable per vertex")
    add("present", cmd_present, "presentation of the fundamental group")
    sp = add("reduce", cmd_reduce, "normal form of a word")
    sp.add_argument("--word", required=True)
    sp.add_argument("--strategy", choices=("stack", "leftmost", "rightmost"), default="stack")
    sp = add("tree-ball", cmd_tree_ball, "ball in the Bass-Serre tree")
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--base", default=None)
    sp.add_argument("--branch-cap", type=int, default=3)
    sp.add_argument("--dot")
    for name, func, help_ in (("quotient-fin", cmd_quotient_fin, "quotient by maximal finite normal subgroups"),
                              ("quotient-cyc", cmd_quotient_cyc, "quotient by maximal infinite cyclic subgroups")):
        sp = add(name, func, help_)
        sp.add_argument("--out")
    sp = add("check", cmd_check, "desk checks of the lemmas")
    sp.add_argument("--lemma", choices=("tree", "edge-kernel", "stabilizers"), required=True)
    sp.add_argument("--radius", type=int, default=4)
    sp = add("certify", cmd_certify, "emit a derivation certificate")
    sp.add_argument("--out")
    add("check-cert", cmd_check_cert, "check a certificate")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def diag(code: int, payload: dict, text: str) -> int:
        if args.json:
            print(json.dumps(payload, sort_keys=True, default=repr), file=sys.stderr)
        else:
            print(f"error: {text}", file=sys.stderr)
        return code

    try:
        args.func(args)
    except CheckFailed as exc:
        if args.json:
            print(json.dumps(exc.payload, sort_keys=True, default=repr))
        return diag(2, {"error": "CheckFailed", "message": str(exc)}, str(exc))
    except _InputInvalid as exc:
        return diag(1, {"error": "ValidationError", **exc.rep.to_dict()}, str(exc))
    except ClaimViolated as exc:
        return diag(2, exc.to_dict(), str(exc))
    except GGKError as exc:
        return diag(1, exc.to_dict(), f"{exc.code}: {exc}")
    except (OSError, _BadInput) as exc:
        return diag(1, {"error": type(exc).__name__, "message": str(exc)}, str(exc))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
