"""FJCw derivation certificates: emission, canonical JSON, and checking.

A certificate is a DAG of nodes.  Each node states a claim about a group,
names the inheritance rule that justifies it, lists role-tagged premises,
and records side conditions that the checker recomputes from the embedded
graph-of-groups documents.  Rules:

  R1a subgroup, R1b finite-index overgroup, R2 products, R3 directed colimit,
  R4 extension (quotient, kernel, preimages of infinite cyclic subgroups),
  R5 CAT(0), R6 solvable, R7 graphs of abelian groups,
  R8 amalgam/HNN over a finite group, Axiom (finite groups).

The preimage obligations q⁻¹(C) cannot be decided for a general C, so each
case of the argument becomes its own premise.
"""

from __future__ import annotations

import copy
import hashlib
import json
import random
import re
from dataclasses import dataclass
from functools import lru_cache

from .constructions import (
    FiniteEqualTo,
    check_induced_monos,
    kernel_vertex_stabilizer_class,
    lemma_tree_check,
    proper_cocompact_check,
    quotient_by_max_finite_normal,
    quotient_by_max_infinite_cyclic,
)
from .errors import (
    CertificateError,
    CycleDetected,
    NotVirtuallyCyclicVertex,
    RuleShapeMismatch,
    SideConditionFailed,
    TamperedNode,
)
from .gog import Amalgam, GraphOfGroups, split_along_finite_edge, validate
from .report import ValidationReport
from .serialize import canonical_json, gog_doc, parse_document
from .vcgroup import VCGroup

FORMAT = "ggk-cert/1"
RULES = ("R1a", "R1b", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "Axiom")

# role -> (min, max) premises; None means unbounded
SCHEMA: dict[str, dict[str, tuple[int, int | None]]] = {
    "R1a": {"overgroup": (1, 1)},
    "R1b": {"subgroup": (1, 1)},
    "R2": {"factor": (2, None)},
    "R3": {"member": (1, None)},
    "R4": {"quotient": (1, 1), "kernel": (1, 1), "preimage": (1, None)},
    "R5": {},
    "R6": {},
    "R7": {},
    "R8": {"left": (0, 1), "right": (0, 1), "base": (0, 1)},
    "Axiom": {},
}
TERMS = {
    "R1a": {"Subgroup"}, "R1b": {"Subgroup"}, "R2": {"GogTerm"}, "R3": {"Colimit"},
    "R4": {"ExtensionWithHom"}, "R5": {"Axiom"}, "R6": {"Axiom"}, "R7": {"Axiom"},
    "R8": {"AmalgamOverFinite", "HNNOverFinite"}, "Axiom": {"Axiom"},
}
AXIOM_KIND = {"R5": "CAT0", "R6": "Solvable", "R7": "GraphOfAbelian", "Axiom": "Finite"}
BRANCHES = {
    "max_finite_normal": ("trivial-intersection", "meets-vertex-conjugate"),
    "max_infinite_cyclic": ("no-vertex-conjugate",),
}
JUSTIFICATION = {
    "R5": "acts on its Bass-Serre tree properly and cocompactly, hence CAT(0)",
    "R7": "fundamental group of a graph of infinite cyclic groups",
    "R3": "directed colimit of CAT(0) groups",
    "R8": "amalgamated product or HNN extension along a finite subgroup",
    "R4": "extension: quotient, kernel and preimages of infinite cyclic subgroups",
    "R1a": "subgroup of a group satisfying the conjecture",
    "R1b": "contains a finite-index subgroup satisfying the conjecture",
    "Axiom": "finite group",
}


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def doc_hash(doc: dict) -> str:
    return "d" + _sha(canonical_json(doc))[:16]


def node_hash(node: dict) -> str:
    body = {k: node.get(k) for k in ("id", "claim", "rule", "premises", "side_conditions", "justification")}
    return _sha(canonical_json(body))


def pi1(d: str) -> str:
    return f"pi1({d})"


def hom_name(construction: str, d: str, d2: str) -> str:
    return f"q[{construction}:{d}->{d2}]"


_PI1 = re.compile(r"^pi1\((d[0-9a-f]+)\)$")
_HOM = r"q\[(max_finite_normal|max_infinite_cyclic):(d[0-9a-f]+)->(d[0-9a-f]+)\]"
_KER = re.compile(rf"^Ker\(({_HOM})\)$")
_KERPHI = re.compile(rf"^Ker\(phi\.({_HOM})\)$")
_PRE = re.compile(rf"^({_HOM})\^-1\(C\)\|([a-z-]+)$")
_PRE_SUB = re.compile(rf"^({_HOM})\^-1\(C'\)\|inside-vertex-conjugate$")
_PIECES = re.compile(r"^pieces\((.*)\)$")


@dataclass
class Certificate:
    data: dict

    @property
    def nodes(self) -> list[dict]:
        return self.data["nodes"]

    @property
    def root(self) -> str:
        return self.data["root"]

    def node(self, nid: str) -> dict:
        return next(n for n in self.nodes if n["id"] == nid)

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> Certificate:
        return cls(json.loads(text))

    def seal(self) -> Certificate:
        for n in self.nodes:
            n["hash"] = node_hash(n)
        return self


# ---------------------------------------------------------------------------
# Emission


class _Builder:
    def __init__(self):
        self.nodes: list[dict] = []
        self.docs: dict[str, dict] = {}
        self._memo: dict[str, str] = {}

    def doc(self, gog: GraphOfGroups) -> str:
        d = gog_doc(gog)
        h = doc_hash(d)
        self.docs[h] = d
        return h

    def node(self, claim, rule, premises=(), side=()) -> str:
        nid = f"n{len(self.nodes)}"
        n = {"id": nid, "claim": claim, "rule": rule,
             "premises": [{"role": r, "node": p} for r, p in premises],
             "side_conditions": [{"check": c, "args": a, "value": v} for c, a, v in side],
             "justification": JUSTIFICATION.get(rule, "")}
        self.nodes.append(n)
        return nid

    def gog(self, gog: GraphOfGroups) -> str:
        d = self.doc(gog)
        if d in self._memo:
            return self._memo[d]
        finite = [i for i in gog.graph.edge_ids if not gog.edge_group(i).is_infinite]
        if finite:
            i = finite[0]
            split = split_along_finite_edge(gog, i)
            if isinstance(split, Amalgam):
                parts = [split.left, split.right]
                roles, term, kind = ("left", "right"), "AmalgamOverFinite", "amalgam"
            else:
                parts = [split.base]
                roles, term, kind = ("base",), "HNNOverFinite", "hnn"
            kids = [self.gog(p) for p in parts]
            value = {"kind": kind, "edge_order": split.edge_group.finite_part.order,
                     "parts": [self.doc(p) for p in parts]}
            nid = self.node({"term": term, "group": pi1(d)}, "R8", zip(roles, kids),
                            [("finite_edge_split", {"doc": d, "edge": i}, value)])
        elif not gog.graph.edge_ids and not gog.vertex_groups[gog.vertices[0]].is_infinite:
            order = gog.vertex_groups[gog.vertices[0]].finite_part.order
            nid = self.node({"term": "Axiom", "kind": "Finite", "group": pi1(d)}, "Axiom", (),
                            [("finite_group", {"doc": d}, order)])
        else:
            nid = self.finite_normal_step(gog, d)
        self._memo[d] = nid
        return nid

    def cat0_pieces(self, group: str, side) -> str:
        leaf = self.node({"term": "Axiom", "kind": "CAT0", "group": f"pieces({group})"}, "R5", (), side)
        return self.node({"term": "Colimit", "group": group}, "R3", [("member", leaf)])

    def finite_normal_step(self, gog: GraphOfGroups, d: str) -> str:
        c = "max_finite_normal"
        r = quotient_by_max_finite_normal(gog)
        d2 = self.doc(r.gog)
        q = hom_name(c, d, d2)
        stabs = kernel_stabilizers(gog, c)
        quotient = self.infinite_cyclic_step(r.gog, d2)
        kernel = self.cat0_pieces(f"Ker({q})", [("kernel_stabilizers", {"doc": d, "construction": c}, stabs)])
        p1 = self.cat0_pieces(f"{q}^-1(C)|trivial-intersection",
                              [("kernel_stabilizers", {"doc": d, "construction": c}, stabs)])
        over = self.cat0_pieces(f"Ker(phi.{q})", [("lemma_tree", {"doc": d2, "radius": 3}, True)])
        inside = self.node({"term": "Subgroup", "group": f"{q}^-1(C')|inside-vertex-conjugate"}, "R1a",
                           [("overgroup", over)])
        p2 = self.node({"term": "Subgroup", "group": f"{q}^-1(C)|meets-vertex-conjugate"}, "R1b",
                       [("subgroup", inside)])
        return self.node(
            {"term": "ExtensionWithHom", "group": pi1(d), "hom": q}, "R4",
            [("quotient", quotient), ("kernel", kernel), ("preimage", p1), ("preimage", p2)],
            [("quotient", {"doc": d, "construction": c}, d2),
             ("induced_monos_injective", {"doc": d, "construction": c}, True)])

    def infinite_cyclic_step(self, gog: GraphOfGroups, d: str) -> str:
        c = "max_infinite_cyclic"
        r = quotient_by_max_infinite_cyclic(gog)
        d3 = self.doc(r.gog)
        q = hom_name(c, d, d3)
        stabs = kernel_stabilizers(gog, c)
        quotient = self.node({"term": "Axiom", "kind": "CAT0", "group": pi1(d3)}, "R5", (),
                             [("proper_cocompact", {"doc": d3, "radius": 3}, True)])
        kernel = self.node({"term": "Axiom", "kind": "GraphOfAbelian", "group": f"Ker({q})"}, "R7", (),
                           [("kernel_stabilizers", {"doc": d, "construction": c}, stabs)])
        pre = self.node({"term": "Axiom", "kind": "GraphOfAbelian",
                         "group": f"{q}^-1(C)|no-vertex-conjugate"}, "R7", (),
                        [("vertex_groups_finite", {"doc": d3}, True),
                         ("kernel_stabilizers", {"doc": d, "construction": c}, stabs)])
        return self.node(
            {"term": "ExtensionWithHom", "group": pi1(d), "hom": q}, "R4",
            [("quotient", quotient), ("kernel", kernel), ("preimage", pre)],
            [("quotient", {"doc": d, "construction": c}, d3),
             ("induced_monos_injective", {"doc": d, "construction": c}, True)])


def certify_fjcw(gog: GraphOfGroups) -> Certificate:
    """Derivation of FJCw for π₁ of ``gog`` mirroring the proof structure."""
    for v in gog.vertices:
        if not isinstance(gog.vertex_groups[v], VCGroup):
            raise NotVirtuallyCyclicVertex(f"vertex {v} is not virtually cyclic", witness=v)
    validate(gog, strict=True)
    b = _Builder()
    root = b.gog(gog)
    subject = b.doc(gog)
    cert = Certificate({"format": FORMAT, "subject": subject, "root": root,
                        "documents": b.docs, "nodes": b.nodes})
    return cert.seal()


# ---------------------------------------------------------------------------
# Side conditions, recomputed from documents


def kernel_stabilizers(gog: GraphOfGroups, construction: str) -> dict:
    r = (quotient_by_max_finite_normal if construction == "max_finite_normal"
         else quotient_by_max_infinite_cyclic)(gog)
    out = {}
    for v in gog.vertices:
        cls = kernel_vertex_stabilizer_class(r.q, v)
        if isinstance(cls, FiniteEqualTo):
            out[v] = f"finite:{cls.subgroup.order}" + ("" if cls.matches_max_finite else ":not-max")
        else:
            out[v] = "infinite-cyclic"
    return out


@lru_cache(maxsize=256)
def _parsed(text: str) -> GraphOfGroups:
    return parse_document(json.loads(text))


@lru_cache(maxsize=1024)
def _recompute(check: str, args_text: str, doc_text: str):
    args = json.loads(args_text)
    gog = _parsed(doc_text)
    if check == "finite_edge_split":
        split = split_along_finite_edge(gog, args["edge"])
        if isinstance(split, Amalgam):
            parts, kind = [split.left, split.right], "amalgam"
        else:
            parts, kind = [split.base], "hnn"
        return {"kind": kind, "edge_order": split.edge_group.finite_part.order,
                "parts": [doc_hash(gog_doc(p)) for p in parts]}
    if check == "finite_group":
        if gog.graph.edge_ids or len(gog.vertices) != 1:
            return None
        G = gog.vertex_groups[gog.vertices[0]]
        return None if G.is_infinite else G.finite_part.order
    if check == "quotient":
        f = (quotient_by_max_finite_normal if args["construction"] == "max_finite_normal"
             else quotient_by_max_infinite_cyclic)
        return doc_hash(gog_doc(f(gog).gog))
    if check == "induced_monos_injective":
        f = (quotient_by_max_finite_normal if args["construction"] == "max_finite_normal"
             else quotient_by_max_infinite_cyclic)
        return check_induced_monos(f(gog)).ok
    if check == "kernel_stabilizers":
        return kernel_stabilizers(gog, args["construction"])
    if check == "proper_cocompact":
        return proper_cocompact_check(gog, args["radius"]).ok
    if check == "lemma_tree":
        return lemma_tree_check(gog, args["radius"]).ok
    if check == "vertex_groups_finite":
        return all(not gog.vertex_groups[v].is_infinite for v in gog.vertices)
    raise KeyError(check)


def _side_value(docs: dict, sc: dict):
    args = sc.get("args", {})
    d = args.get("doc")
    if d not in docs:
        raise SideConditionFailed(f"side condition {sc.get('check')} names unknown document {d}")
    rest = {k: v for k, v in args.items() if k != "doc"}
    return _recompute(sc["check"], canonical_json(rest), canonical_json(docs[d]))


# ---------------------------------------------------------------------------
# Checking


def _expected(node: dict, side: dict) -> tuple[dict[str, list[str]], list[str]]:
    """Expected premise groups per role, plus binding problems of the node itself."""
    rule, claim = node["rule"], node["claim"]
    group = claim.get("group", "")
    problems: list[str] = []
    exp: dict[str, list[str]] = {}
    if rule == "R8":
        m = _PI1.match(group)
        sc = side.get("finite_edge_split")
        if not m or sc is None or sc["args"].get("doc") != m.group(1):
            problems.append("R8 node must split the document it claims")
        else:
            v = sc["value"]
            if not isinstance(v, dict) or not isinstance(v.get("edge_order"), int) or v.get("edge_order", 0) < 1:
                problems.append("R8 needs a finite edge group")
            else:
                parts = v.get("parts", [])
                roles = ("left", "right") if v.get("kind") == "amalgam" else ("base",)
                want_term = "AmalgamOverFinite" if v.get("kind") == "amalgam" else "HNNOverFinite"
                if claim.get("term") != want_term or len(parts) != len(roles):
                    problems.append("R8 claim term does not match the split")
                for r, p in zip(roles, parts):
                    exp[r] = [pi1(p)]
    elif rule == "R4":
        m = _PI1.match(group)
        hm = re.match(rf"^{_HOM}$", claim.get("hom", ""))
        sc = side.get("quotient")
        if not (m and hm and sc and "induced_monos_injective" in side):
            problems.append("R4 node needs a quotient map and its checks")
        else:
            c, d, d2 = hm.groups()
            inj = side["induced_monos_injective"]
            if d != m.group(1) or sc["args"] != {"doc": d, "construction": c} or sc["value"] != d2:
                problems.append("R4 quotient map does not match the claim")
            if inj["args"] != {"doc": d, "construction": c} or inj["value"] is not True:
                problems.append("R4 induced maps must be injective")
            q = claim["hom"]
            exp = {"quotient": [pi1(d2)], "kernel": [f"Ker({q})"],
                   "preimage": [f"{q}^-1(C)|{b}" for b in BRANCHES[c]]}
    elif rule == "R3":
        exp = {"member": [f"pieces({group})"]}
    elif rule == "R1b":
        m = _PRE.match(group)
        if not m or m.group(5) != "meets-vertex-conjugate":
            problems.append("R1b is used only for the finite-index reduction of q^-1(C)")
        else:
            exp = {"subgroup": [f"{m.group(1)}^-1(C')|inside-vertex-conjugate"]}
    elif rule == "R1a":
        m = _PRE_SUB.match(group)
        if not m:
            problems.append("R1a is used only for q^-1(C') inside Ker(phi.q)")
        else:
            exp = {"overgroup": [f"Ker(phi.{m.group(1)})"]}
    elif rule in ("R5", "R7", "Axiom"):
        problems += _leaf_binding(rule, group, side)
    elif rule in ("R2", "R6"):
        problems.append(f"rule {rule} does not occur in these derivations")
    return exp, problems


def _leaf_binding(rule: str, group: str, side: dict) -> list[str]:
    def has(check, **args):
        sc = side.get(check)
        return sc is not None and all(sc["args"].get(k) == v for k, v in args.items())

    def stabs_all(sc, finite: bool):
        vals = sc["value"].values() if isinstance(sc["value"], dict) else []
        ok = [isinstance(v, str) and ((v.startswith("finite:") and not v.endswith(":not-max"))
                                      if finite else v == "infinite-cyclic") for v in vals]
        return bool(ok) and all(ok)

    if rule == "Axiom":
        m = _PI1.match(group)
        sc = side.get("finite_group")
        if not (m and sc and sc["args"].get("doc") == m.group(1) and isinstance(sc["value"], int)):
            return ["finite axiom must certify a finite single-vertex document"]
        return []
    if rule == "R5":
        m = _PI1.match(group)
        if m:
            ok = has("proper_cocompact", doc=m.group(1)) and side["proper_cocompact"]["value"] is True
            return [] if ok else ["CAT(0) leaf needs a proper cocompact action"]
        pm = _PIECES.match(group)
        inner = pm.group(1) if pm else ""
        k, p, kp = _KER.match(inner), _PRE.match(inner), _KERPHI.match(inner)
        if k or (p and p.group(5) == "trivial-intersection"):
            c, d = (k or p).group(2), (k or p).group(3)
            if c != "max_finite_normal":
                return ["finite-stabilizer pieces arise from the finite normal quotient"]
            ok = has("kernel_stabilizers", doc=d, construction=c) and stabs_all(side["kernel_stabilizers"], True)
            return [] if ok else ["kernel stabilizers must be the finite normal subgroups"]
        if kp:
            d2 = kp.group(4)
            ok = has("lemma_tree", doc=d2) and side["lemma_tree"]["value"] is True
            return [] if ok else ["Ker(phi.q) leaf needs the quotient-tree check"]
        return ["CAT(0) leaf claims an unknown group"]
    # R7
    k, p = _KER.match(group), _PRE.match(group)
    m = k or (p if p and p.group(5) == "no-vertex-conjugate" else None)
    if not m or m.group(2) != "max_infinite_cyclic":
        return ["graph-of-abelian leaf claims an unknown group"]
    d, d3 = m.group(3), m.group(4)
    ok = has("kernel_stabilizers", doc=d, construction="max_infinite_cyclic") and stabs_all(
        side["kernel_stabilizers"], False)
    if p:
        ok = ok and has("vertex_groups_finite", doc=d3) and side["vertex_groups_finite"]["value"] is True
    return [] if ok else ["kernel stabilizers must be infinite cyclic"]


def check_certificate(cert: Certificate | dict, strict: bool = False) -> ValidationReport:
    """Validate shape, hashes, acyclicity, rule schemas and side conditions."""
    data = cert.data if isinstance(cert, Certificate) else cert
    rep = ValidationReport()

    def fail(exc_type: type[CertificateError], msg: str, witness=None):
        rep.add(exc_type.code, msg, witness)
        if strict:
            raise exc_type(msg, witness=witness)

    try:
        nodes = {n["id"]: n for n in data["nodes"]}
        docs = data["documents"]
        root = data["root"]
        if data.get("format") != FORMAT or len(nodes) != len(data["nodes"]) or root not in nodes:
            raise KeyError("header")
        for n in data["nodes"]:
            for key in ("claim", "rule", "premises", "side_conditions", "hash"):
                n[key]
            for p in n["premises"]:
                p["role"], p["node"]
            for sc in n["side_conditions"]:
                sc["check"], sc["args"], sc["value"]
    except (KeyError, TypeError) as exc:
        fail(RuleShapeMismatch, f"malformed certificate ({exc})")
        return rep

    for h, d in docs.items():
        if doc_hash(d) != h:
            fail(TamperedNode, f"document {h} does not match its hash", h)
    for nid, n in nodes.items():
        if node_hash(n) != n["hash"]:
            fail(TamperedNode, f"node {nid} does not match its hash", nid)
        for p in n["premises"]:
            if p["node"] not in nodes:
                fail(RuleShapeMismatch, f"node {nid} cites missing premise {p['node']}", nid)
    if not rep.ok:
        return rep

    # acyclicity and reachability
    state: dict[str, int] = {}
    order: list[str] = []

    def visit(nid: str, stack: list[str]) -> bool:
        state[nid] = 1
        for p in nodes[nid]["premises"]:
            s = state.get(p["node"], 0)
            if s == 1:
                fail(CycleDetected, f"cycle through {nid} -> {p['node']}", stack + [nid, p["node"]])
                return False
            if s == 0 and not visit(p["node"], stack + [nid]):
                return False
        state[nid] = 2
        order.append(nid)
        return True

    if not visit(root, []):
        return rep
    orphans = sorted(set(nodes) - set(order))
    if orphans:
        fail(RuleShapeMismatch, "nodes unreachable from the root", orphans)

    subject = data.get("subject")
    if subject not in docs or nodes[root]["claim"].get("group") != pi1(subject):
        fail(RuleShapeMismatch, "root does not claim the subject document", root)

    for nid in order:
        n = nodes[nid]
        rule = n["rule"]
        if rule not in SCHEMA:
            fail(RuleShapeMismatch, f"{nid}: unknown rule {rule!r}", nid)
            continue
        claim = n["claim"]
        if claim.get("term") not in TERMS[rule]:
            fail(RuleShapeMismatch, f"{nid}: claim term {claim.get('term')!r} cannot follow from {rule}", nid)
        if claim.get("term") == "Axiom" and claim.get("kind") != AXIOM_KIND.get(rule):
            fail(RuleShapeMismatch, f"{nid}: axiom kind {claim.get('kind')!r} does not match {rule}", nid)
        counts: dict[str, int] = {}
        for p in n["premises"]:
            counts[p["role"]] = counts.get(p["role"], 0) + 1
        schema = SCHEMA[rule]
        for role, k in counts.items():
            if role not in schema:
                fail(RuleShapeMismatch, f"{nid}: role {role!r} not allowed for {rule}", nid)
        for role, (lo, hi) in schema.items():
            k = counts.get(role, 0)
            if k < lo or (hi is not None and k > hi):
                fail(RuleShapeMismatch, f"{nid}: {rule} needs {lo}..{hi} premises of role {role}, has {k}", nid)

        side: dict[str, dict] = {}
        for sc in n["side_conditions"]:
            if sc["check"] in side:
                fail(RuleShapeMismatch, f"{nid}: duplicate side condition {sc['check']}", nid)
            side[sc["check"]] = sc
            try:
                value = _side_value(docs, sc)
            except SideConditionFailed as exc:
                fail(SideConditionFailed, f"{nid}: {exc}", nid)
                continue
            except Exception as exc:
                fail(SideConditionFailed, f"{nid}: side condition {sc['check']} cannot be evaluated ({exc})", nid)
                continue
            if value != sc["value"]:
                fail(SideConditionFailed, f"{nid}: side condition {sc['check']} recomputes to {value!r}",
                     {"node": nid, "recorded": sc["value"], "recomputed": value})

        exp, problems = _expected(n, side)
        for msg in problems:
            fail(RuleShapeMismatch, f"{nid}: {msg}", nid)
        got: dict[str, list[str]] = {}
        for p in n["premises"]:
            got.setdefault(p["role"], []).append(nodes[p["node"]]["claim"].get("group"))
        for role in set(exp) | set(got):
            if sorted(exp.get(role, [])) != sorted(got.get(role, [])):
                fail(RuleShapeMismatch, f"{nid}: premises of role {role} do not match the rule",
                     {"expected": exp.get(role, []), "found": got.get(role, [])})
    rep.facts.update(nodes=len(nodes), documents=len(docs))
    return rep


# ---------------------------------------------------------------------------
# Mutations for testing the checker


MUTATIONS = ("rule", "drop_premise", "extra_premise", "retarget", "side_value", "claim", "cycle")


def mutate(cert: Certificate, rng: random.Random, kind: str | None = None,
           reseal: bool = True) -> tuple[Certificate, str]:
    """Copy of ``cert`` with one node changed; resealed unless ``reseal`` is False."""
    data = copy.deepcopy(cert.data)
    nodes = data["nodes"]
    kinds = [kind] if kind else list(MUTATIONS)
    rng.shuffle(kinds)
    for k in kinds:
        cands = list(nodes)
        rng.shuffle(cands)
        for n in cands:
            if _apply(k, n, data, rng):
                out = Certificate(data)
                if reseal:
                    out.seal()
                return out, f"{k}@{n['id']}"
    raise ValueError("no applicable mutation")


def _apply(kind: str, n: dict, data: dict, rng: random.Random) -> bool:
    nodes = data["nodes"]
    if kind == "rule":
        n["rule"] = rng.choice([r for r in RULES if r != n["rule"]])
        return True
    if kind == "drop_premise" and n["premises"]:
        n["premises"].pop(rng.randrange(len(n["premises"])))
        return True
    if kind == "extra_premise":
        roles = list(SCHEMA[n["rule"]]) or ["member"]
        other = rng.choice(nodes)
        if other is n:
            return False
        n["premises"].append({"role": rng.choice(roles), "node": other["id"]})
        return True
    if kind == "retarget" and n["premises"]:
        p = rng.choice(n["premises"])
        mine = next(x for x in nodes if x["id"] == p["node"])["claim"].get("group")
        others = [x for x in nodes if x["claim"].get("group") != mine and x is not n]
        if not others:
            return False
        p["node"] = rng.choice(others)["id"]
        return True
    if kind == "side_value" and n["side_conditions"]:
        sc = rng.choice(n["side_conditions"])
        v = sc["value"]
        if isinstance(v, bool):
            sc["value"] = not v
        elif isinstance(v, int):
            sc["value"] = v + 1
        elif isinstance(v, str):
            sc["value"] = v + "0"
        elif isinstance(v, dict) and v:
            key = rng.choice(sorted(v))
            v[key] = ["tampered", v[key]]
        else:
            return False
        return True
    if kind == "claim":
        n["claim"]["group"] = n["claim"].get("group", "") + "'"
        return True
    if kind == "cycle":
        # the root is an ancestor of every node, itself included
        n["premises"].append({"role": rng.choice(list(SCHEMA[n["rule"]]) or ["member"]),
                              "node": data["root"]})
        return True
    return False
