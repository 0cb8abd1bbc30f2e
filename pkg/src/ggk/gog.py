"""Graphs of groups: data model, validation, spanning trees, presentations.

Oriented edges are pairs ``(edge_id, +1)`` (from ``origin`` to ``terminus``)
and ``(edge_id, -1)`` (the reverse).  ``bar`` flips the sign, so it is a
fixed-point-free involution by construction.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Union

from .errors import Disconnected, EdgeGroupNotFinite, ValidationError
from .report import ValidationReport
from .vcgroup import VCGroup, VCHom, kernel_witness, vc_hom_is_injective

Edge = tuple[str, int]


def bar(e: Edge) -> Edge:
    return (e[0], -e[1])


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    ends: Mapping[str, tuple[str, str]]  # edge id -> (origin, terminus)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "ends", dict(sorted(self.ends.items())))

    def __hash__(self):
        return hash((self.vertices, tuple(self.ends.items())))

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(self.ends)

    @cached_property
    def oriented_edges(self) -> tuple[Edge, ...]:
        return tuple(e for i in self.ends for e in ((i, 1), (i, -1)))

    def iota(self, e: Edge) -> str:
        o, t = self.ends[e[0]]
        return o if e[1] > 0 else t

    def tau(self, e: Edge) -> str:
        o, t = self.ends[e[0]]
        return t if e[1] > 0 else o

    def outgoing(self, v: str) -> list[Edge]:
        """Oriented edges with ι(e) = v, in (id, +1 before -1) order."""
        return [e for e in self.oriented_edges if self.iota(e) == v]

    def components(self, edge_ids=None) -> list[list[str]]:
        ids = self.edge_ids if edge_ids is None else edge_ids
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for i in ids:
            o, t = self.ends[i]
            adj[o].add(t)
            adj[t].add(o)
        seen: set[str] = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp, queue = [], deque([v])
            seen.add(v)
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in sorted(adj[u]):
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def structural_issues(self) -> list[str]:
        out = []
        for i, (o, t) in self.ends.items():
            if o not in self.vertices or t not in self.vertices:
                out.append(f"edge {i} has an endpoint outside the vertex set")
        for e in self.oriented_edges:
            b = bar(e)
            if b == e or bar(b) != e or self.iota(b) != self.tau(e) or self.tau(b) != self.iota(e):
                out.append(f"bar is not a fixed-point-free involution at {e}")
        return out


@dataclass(frozen=True, eq=False)
class GraphOfGroups:
    graph: Graph
    vertex_groups: Mapping[str, VCGroup]
    edge_groups: Mapping[str, VCGroup]  # keyed by geometric edge id: G_ē is G_e
    monos: Mapping[Edge, VCHom]  # α_e : G_e → G_ι(e)

    def vertex_group(self, v: str) -> VCGroup:
        return self.vertex_groups[v]

    def edge_group(self, e: Edge | str) -> VCGroup:
        return self.edge_groups[e if isinstance(e, str) else e[0]]

    def mono(self, e: Edge) -> VCHom:
        return self.monos[e]

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    def restrict(self, vertices, edge_ids) -> GraphOfGroups:
        vs = set(vertices)
        ends = {i: self.graph.ends[i] for i in edge_ids}
        return GraphOfGroups(
            Graph(tuple(vs), ends),
            {v: self.vertex_groups[v] for v in sorted(vs)},
            {i: self.edge_groups[i] for i in ends},
            {e: m for e, m in self.monos.items() if e[0] in ends},
        )

    def __eq__(self, other):
        return (isinstance(other, GraphOfGroups) and self.graph == other.graph
                and dict(self.vertex_groups) == dict(other.vertex_groups)
                and dict(self.edge_groups) == dict(other.edge_groups)
                and dict(self.monos) == dict(other.monos))

    def __hash__(self):
        return hash(self.graph)

    @cached_property
    def tree(self) -> SpanningTree:
        return spanning_tree(self.graph)


def validate(gog: GraphOfGroups, strict: bool = False) -> ValidationReport:
    report = ValidationReport()

    def fail(code, msg, witness=None):
        report.add(code, msg, witness)
        if strict:
            raise ValidationError(f"{code}: {msg}", witness={"code": code, "detail": witness})

    g = gog.graph
    for msg in g.structural_issues():
        fail("BadGraph", msg)
    comps = g.components()
    if len(comps) != 1:
        fail("Disconnected", f"graph has {len(comps)} components", comps)
    for v in g.vertices:
        if v not in gog.vertex_groups:
            fail("MissingVertexGroup", f"vertex {v} has no group", v)
    for e in g.oriented_edges:
        if e not in gog.monos:
            fail("MissingMono", f"oriented edge {e} has no monomorphism", list(e))
            continue
        m = gog.monos[e]
        if m.source is not gog.edge_group(e) and m.source != gog.edge_group(e):
            fail("MonoSourceMismatch", f"mono of {e} does not start at the edge group", list(e))
        if m.target != gog.vertex_groups.get(g.iota(e)):
            fail("MonoTargetMismatch", f"mono of {e} does not land in G_{g.iota(e)}", list(e))
        if not vc_hom_is_injective(m):
            fail("NonInjectiveMono", f"mono of {e} is not injective",
                 {"edge": list(e), "kernel_element": repr(kernel_witness(m))})
    return report


@dataclass(frozen=True)
class SpanningTree:
    root: str
    edges: frozenset  # oriented edges, closed under bar
    parent: Mapping[str, Edge]  # v -> tree edge e with τ(e) = v, pointing away from root
    graph: Graph

    def __contains__(self, e: Edge) -> bool:
        return e in self.edges

    def path_to(self, v: str) -> list[Edge]:
        """Tree path from the root to ``v`` as oriented edges."""
        path = []
        while v != self.root:
            e = self.parent[v]
            path.append(e)
            v = self.graph.iota(e)
        path.reverse()
        return path

    def geometric_ids(self) -> list[str]:
        return sorted({e[0] for e in self.edges})


def spanning_tree(graph: Graph) -> SpanningTree:
    """BFS tree from the least vertex; incident edges scanned in id order."""
    root = graph.vertices[0]
    seen = {root}
    parent: dict[str, Edge] = {}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for e in graph.outgoing(u):
            w = graph.tau(e)
            if w not in seen:
                seen.add(w)
                parent[w] = e
                queue.append(w)
    if len(seen) != len(graph.vertices):
        missing = sorted(set(graph.vertices) - seen)
        raise Disconnected(f"vertices {missing} unreachable from {root}", witness=missing)
    edges = frozenset(x for e in parent.values() for x in (e, bar(e)))
    return SpanningTree(root, edges, parent, graph)


# ---------------------------------------------------------------------------
# Presentations

Symbol = tuple[str, int]  # (generator symbol, ±1)


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relations: tuple[tuple[tuple[Symbol, ...], tuple[Symbol, ...]], ...]  # lhs = rhs

    def text(self) -> str:
        rels = [f"{format_word(l)} = {format_word(r)}" for l, r in self.relations]
        return f"< {', '.join(self.generators)} | {', '.join(rels)} >"


def format_word(word) -> str:
    if not word:
        return "1"
    parts = []
    i = 0
    while i < len(word):
        sym, s = word[i]
        j = i
        while j < len(word) and word[j] == (sym, s):
            j += 1
        k = (j - i) * s
        parts.append(sym if k == 1 else f"{sym}^{k}")
        i = j
    return "*".join(parts)


def vertex_symbol(v: str, name: str) -> str:
    return f"{v}.{name}"


def element_symbols(gog: GraphOfGroups, v: str, x) -> tuple[Symbol, ...]:
    G = gog.vertex_groups[v]
    names = G.generator_names
    return tuple((vertex_symbol(v, names[k]), s) for k, s in G.element_word(x))


def presentation(gog: GraphOfGroups, tree: SpanningTree | None = None) -> Presentation:
    tree = tree or gog.tree
    g = gog.graph
    gens: list[str] = []
    rels: list = []
    for v in g.vertices:
        G = gog.vertex_groups[v]
        gens.extend(vertex_symbol(v, n) for n in G.generator_names)
        for _, w in G.relators:
            rels.append((tuple((vertex_symbol(v, G.generator_names[k]), s) for k, s in w), ()))
    for i in g.edge_ids:
        e = (i, 1)
        if e not in tree:
            gens.append(i)
        Ge = gog.edge_group(i)
        for s in Ge.generator_elements:
            mid = element_symbols(gog, g.iota(bar(e)), gog.monos[bar(e)](s))
            rhs = element_symbols(gog, g.iota(e), gog.monos[e](s))
            lhs = mid if e in tree else ((i, 1),) + mid + ((i, -1),)
            rels.append((lhs, rhs))
    return Presentation(tuple(gens), tuple(rels))


# ---------------------------------------------------------------------------
# Splitting along finite edge groups


@dataclass(frozen=True)
class Amalgam:
    left: GraphOfGroups
    right: GraphOfGroups
    edge: str
    edge_group: VCGroup
    mono_left: VCHom
    mono_right: VCHom


@dataclass(frozen=True)
class HNN:
    base: GraphOfGroups
    edge: str
    edge_group: VCGroup
    mono_from: VCHom
    mono_to: VCHom


def split_along_finite_edge(gog: GraphOfGroups, edge_id: str) -> Union[Amalgam, HNN]:
    Ge = gog.edge_group(edge_id)
    if Ge.is_infinite:
        raise EdgeGroupNotFinite(f"edge group of {edge_id} is infinite", witness=edge_id)
    g = gog.graph
    rest = [i for i in g.edge_ids if i != edge_id]
    comps = g.components(rest)
    e = (edge_id, 1)
    if len(comps) == 1:
        return HNN(gog.restrict(g.vertices, rest), edge_id, Ge, gog.monos[e], gog.monos[bar(e)])
    first = next(c for c in comps if g.iota(e) in c)
    second = next(c for c in comps if c is not first)
    parts = []
    for comp in (first, second):
        cs = set(comp)
        ids = [i for i in rest if g.ends[i][0] in cs]
        parts.append(gog.restrict(comp, ids))
    return Amalgam(parts[0], parts[1], edge_id, Ge, gog.monos[e], gog.monos[bar(e)])


@dataclass(frozen=True)
class DecompositionNode:
    """``kind`` is leaf | amalgam | hnn; ``children`` hold sub-decompositions."""

    kind: str
    gog: GraphOfGroups
    edge: str | None = None
    edge_group: VCGroup | None = None
    children: tuple[DecompositionNode, ...] = field(default_factory=tuple)

    def leaves(self) -> list[GraphOfGroups]:
        if self.kind == "leaf":
            return [self.gog]
        return [x for c in self.children for x in c.leaves()]

    def count(self, kind: str) -> int:
        return (self.kind == kind) + sum(c.count(kind) for c in self.children)


def infinite_edge_reduction(gog: GraphOfGroups) -> tuple[list[GraphOfGroups], DecompositionNode]:
    tree = _reduce(gog)
    return tree.leaves(), tree


def _reduce(gog: GraphOfGroups) -> DecompositionNode:
    finite = [i for i in gog.graph.edge_ids if not gog.edge_group(i).is_infinite]
    if not finite:
        return DecompositionNode("leaf", gog)
    split = split_along_finite_edge(gog, finite[0])
    if isinstance(split, Amalgam):
        kids = (_reduce(split.left), _reduce(split.right))
        return DecompositionNode("amalgam", gog, split.edge, split.edge_group, kids)
    return DecompositionNode("hnn", gog, split.edge, split.edge_group, (_reduce(split.base),))
