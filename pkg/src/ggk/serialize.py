"""JSON documents for groups, homomorphisms and graphs of groups; word syntax."""

from __future__ import annotations

import json
import re
from typing import Any

from .errors import SchemaError, WordSyntaxError
from .finite_core import FiniteGroup, make_finite_group, permutation_group
from .gog import Graph, GraphOfGroups, validate
from .pi1 import EdgeSym, Pi1Word, VertexElt
from .vcgroup import (
    Element,
    FiniteVC,
    NonorientableVC,
    OrientableVC,
    VCGroup,
    VCHom,
    finite_vc,
    nonorientable,
    orientable,
)


def _need(doc: Any, key: str, path: str):
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object", witness=path)
    if key not in doc:
        raise SchemaError(f"{path}: missing field {key!r}", witness=f"{path}.{key}")
    return doc[key]


def _int_list(x, path: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in x):
        raise SchemaError(f"{path}: expected a list of integers", witness=path)
    return x


# groups ----------------------------------------------------------------------


def parse_finite_group(doc: Any, path: str = "$") -> FiniteGroup:
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object", witness=path)
    gens = doc.get("generators")
    if gens is not None:
        gens = _int_list(gens, f"{path}.generators")
    try:
        if "table" in doc:
            rows = doc["table"]
            if not isinstance(rows, list) or not rows:
                raise SchemaError(f"{path}.table: expected a non-empty list of rows", witness=path)
            for i, r in enumerate(rows):
                _int_list(r, f"{path}.table[{i}]")
            return make_finite_group(rows, gens)
        if "perm_gens" in doc:
            perms = doc["perm_gens"]
            if not isinstance(perms, list):
                raise SchemaError(f"{path}.perm_gens: expected a list", witness=path)
            for i, p in enumerate(perms):
                _int_list(p, f"{path}.perm_gens[{i}]")
            if not perms:
                return make_finite_group([[0]])
            return permutation_group(perms)[0]
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}", witness=path) from exc
    raise SchemaError(f"{path}: finite group needs 'table' or 'perm_gens'", witness=path)


def parse_group(doc: Any, path: str = "$") -> VCGroup:
    kind = _need(doc, "kind", path)
    if kind == "finite":
        return finite_vc(parse_finite_group(doc, path))
    if kind == "orientable":
        F = parse_finite_group(_need(doc, "finite_part", path), f"{path}.finite_part")
        alpha = doc.get("alpha")
        if alpha is not None:
            alpha = _int_list(alpha, f"{path}.alpha")
        return orientable(F, alpha)
    if kind == "nonorientable":
        C = parse_finite_group(_need(doc, "C", path), f"{path}.C")
        A = parse_finite_group(_need(doc, "A", path), f"{path}.A")
        B = parse_finite_group(_need(doc, "B", path), f"{path}.B")
        ca = _int_list(_need(doc, "C_in_A", path), f"{path}.C_in_A")
        cb = _int_list(_need(doc, "C_in_B", path), f"{path}.C_in_B")
        ra, rb = _need(doc, "refl_a", path), _need(doc, "refl_b", path)
        if not isinstance(ra, int) or not isinstance(rb, int):
            raise SchemaError(f"{path}: refl_a/refl_b must be integers", witness=path)
        return nonorientable(C, A, B, ca, cb, ra, rb)
    raise SchemaError(f"{path}.kind: unknown kind {kind!r}", witness=f"{path}.kind")


def finite_group_doc(F: FiniteGroup) -> dict:
    doc: dict = {"table": F.table.tolist()}
    if F._generators is not None:
        doc["generators"] = list(F._generators)
    return doc


def group_doc(G: VCGroup) -> dict:
    if isinstance(G, FiniteVC):
        return {"kind": "finite", **finite_group_doc(G.finite_part)}
    if isinstance(G, OrientableVC):
        return {"kind": "orientable", "finite_part": finite_group_doc(G.finite_part),
                "alpha": list(G.alpha.images)}
    if isinstance(G, NonorientableVC):
        return {"kind": "nonorientable",
                "C": finite_group_doc(G.finite_part),
                "A": finite_group_doc(G.A), "B": finite_group_doc(G.B),
                "C_in_A": list(G.emb_a.images), "C_in_B": list(G.emb_b.images),
                "refl_a": G.refl_a, "refl_b": G.refl_b}
    raise TypeError(G)


# elements and homs -------------------------------------------------------------


def element_from_json(G: VCGroup, x: Any) -> Element:
    def tup(y):
        return tuple(tup(z) for z in y) if isinstance(y, list) else y
    return G.check(tup(x))


def element_to_json(x: Element):
    if isinstance(x, tuple):
        return [element_to_json(y) for y in x]
    return x


def parse_hom(doc: Any, source: VCGroup, target: VCGroup, path: str = "$") -> VCHom:
    """A list of generator images, or an object {"finite": [...], "t": x} / {"finite": [...], "a": x, "b": y}."""
    if isinstance(doc, dict):
        fin = doc.get("finite", [])
        if not isinstance(fin, list):
            raise SchemaError(f"{path}.finite: expected a list", witness=path)
        items = list(fin)
        if source.kind == "orientable":
            items.append(_need(doc, "t", path))
        elif source.kind == "nonorientable":
            items += [_need(doc, "a", path), _need(doc, "b", path)]
    elif isinstance(doc, list):
        items = doc
    else:
        raise SchemaError(f"{path}: expected a list of images", witness=path)
    try:
        images = [element_from_json(target, y) for y in items]
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}", witness=path) from exc
    return VCHom(source, target, images)


def hom_doc(f: VCHom) -> list:
    return [element_to_json(y) for y in f.images]


# graphs of groups ------------------------------------------------------------------


def parse_document(doc: Any, strict: bool = True) -> GraphOfGroups:
    verts = _need(doc, "vertices", "$")
    edges = doc.get("edges", [])
    if not isinstance(verts, list) or not verts:
        raise SchemaError("$.vertices: expected a non-empty list", witness="$.vertices")
    if not isinstance(edges, list):
        raise SchemaError("$.edges: expected a list", witness="$.edges")
    vgroups: dict[str, VCGroup] = {}
    for i, v in enumerate(verts):
        p = f"$.vertices[{i}]"
        vid = _need(v, "id", p)
        if not isinstance(vid, str) or vid in vgroups:
            raise SchemaError(f"{p}.id: ids must be unique strings", witness=p)
        vgroups[vid] = parse_group(_need(v, "group", p), f"{p}.group")
    ends, egroups, monos = {}, {}, {}
    for i, e in enumerate(edges):
        p = f"$.edges[{i}]"
        eid = _need(e, "id", p)
        if not isinstance(eid, str) or eid in ends:
            raise SchemaError(f"{p}.id: ids must be unique strings", witness=p)
        o, t = _need(e, "from", p), _need(e, "to", p)
        for end in (o, t):
            if end not in vgroups:
                raise SchemaError(f"{p}: unknown vertex {end!r}", witness=p)
        ends[eid] = (o, t)
        Ge = parse_group(_need(e, "group", p), f"{p}.group")
        egroups[eid] = Ge
        monos[(eid, 1)] = parse_hom(_need(e, "mono_from", p), Ge, vgroups[o], f"{p}.mono_from")
        monos[(eid, -1)] = parse_hom(_need(e, "mono_to", p), Ge, vgroups[t], f"{p}.mono_to")
    gog = GraphOfGroups(Graph(tuple(vgroups), ends), vgroups, egroups, monos)
    if strict:
        validate(gog, strict=True)
    return gog


def gog_doc(gog: GraphOfGroups) -> dict:
    g = gog.graph
    return {
        "vertices": [{"id": v, "group": group_doc(gog.vertex_groups[v])} for v in g.vertices],
        "edges": [{"id": i, "from": g.ends[i][0], "to": g.ends[i][1],
                   "group": group_doc(gog.edge_groups[i]),
                   "mono_from": hom_doc(gog.monos[(i, 1)]),
                   "mono_to": hom_doc(gog.monos[(i, -1)])} for i in g.edge_ids],
    }


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def load(path: str, strict: bool = True) -> GraphOfGroups:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})", witness=path) from exc
    return parse_document(doc, strict)


def dumps(gog: GraphOfGroups) -> str:
    return json.dumps(gog_doc(gog), indent=1, sort_keys=True)


# words -----------------------------------------------------------------------------

_TOKEN = re.compile(r"^\s*(?:g\(\s*([^,()\s]+)\s*,(.*)\)|([eE])\(\s*([^()\s]+)\s*\))\s*$", re.S)


def parse_word(gog: GraphOfGroups, text: str) -> Pi1Word:
    """Parse ``g(v,ELT);e(ID);E(ID)``; an empty string or ``1`` is the identity."""
    text = text.strip()
    if text in ("", "1"):
        return Pi1Word(gog, ())
    tokens = []
    for k, raw in enumerate(text.split(";")):
        m = _TOKEN.match(raw)
        if not m:
            raise WordSyntaxError(f"token {k}: cannot parse {raw!r}", witness=raw)
        if m.group(1) is not None:
            v = m.group(1)
            if v not in gog.vertex_groups:
                raise WordSyntaxError(f"token {k}: unknown vertex {v!r}", witness=raw)
            try:
                x = element_from_json(gog.vertex_groups[v], json.loads(m.group(2)))
            except Exception as exc:
                raise WordSyntaxError(f"token {k}: bad element {m.group(2)!r}", witness=raw) from exc
            tokens.append(VertexElt(v, x))
        else:
            eid = m.group(4)
            if eid not in gog.graph.ends:
                raise WordSyntaxError(f"token {k}: unknown edge {eid!r}", witness=raw)
            tokens.append(EdgeSym(eid, 1 if m.group(3) == "e" else -1))
    return Pi1Word(gog, tuple(tokens))
