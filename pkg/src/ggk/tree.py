"""Finite balls of the Bass–Serre tree and their quotients by kernels.

A vertex of the tree is a coset ``p·G_v`` where ``p`` is a path in the
fundamental groupoid from the spanning-tree root to ``v``.  Its canonical
representative is the normal form of ``p`` with the trailing vertex-group
element dropped.  A T-word ``w`` acts by left multiplication, through its
root-based loop.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable

import networkx as nx

from .errors import EnumerationCapExceeded, UndecidableMembership
from .gog import Edge, GraphOfGroups, bar
from .pi1 import (
    InducedHom,
    NormalForm,
    NotMember,
    Pi1Word,
    VertexElt,
    _PathReducer,
    _path_items,
    apply_phi,
    map_tokens_q,
    membership_in_vertex_group,
    random_word,
    reduce,
    reduce_path,
)
from .vcgroup import random_element

DEFAULT_BRANCH_CAP = 3


@dataclass(frozen=True)
class TreeVertex:
    label: str
    pairs: tuple  # ((s, e), ...) normal path from the root, trailing element dropped

    def __len__(self) -> int:
        return len(self.pairs)

    def path_items(self) -> list:
        out: list = []
        for s, e in self.pairs:
            out += [("g", s), ("e", e)]
        return out

    def rep(self, gog: GraphOfGroups) -> NormalForm:
        return NormalForm(gog, gog.tree.root, self.pairs, gog.vertex_groups[self.label].identity)

    def text(self, gog: GraphOfGroups) -> str:
        return f"{self.label}/{self.rep(gog).text()}"


def _vertex(nf: NormalForm) -> TreeVertex:
    return TreeVertex(nf.end, nf.pairs)


def base_vertex(gog: GraphOfGroups, v0: str | None = None) -> TreeVertex:
    """The coset G_v0 itself, reached from the root along the spanning tree."""
    tree = gog.tree
    v0 = tree.root if v0 is None else v0
    items = [("e", e) for e in tree.path_to(v0)]
    return _vertex(reduce_path(gog, tree.root, items))


def act(w: Pi1Word, x: TreeVertex) -> TreeVertex:
    gog = w.gog
    items = _path_items(gog, w.tokens) + x.path_items()
    return _vertex(reduce_path(gog, gog.tree.root, items))


def neighbours(gog: GraphOfGroups, x: TreeVertex, branch_cap: int = DEFAULT_BRANCH_CAP):
    """All tree edges at ``x`` as (oriented edge e, coset rep s, neighbour); flag if truncated."""
    out = []
    truncated = False
    for e in gog.graph.outgoing(x.label):
        reps, cut = gog.monos[e].transversal(branch_cap)
        truncated |= cut
        for s in reps:
            r = _PathReducer(gog, gog.tree.root)
            r.pairs = list(x.pairs)
            r.vertex = x.label
            r.last = s
            r.mul_edge(e)
            out.append((e, s, _vertex(r.result())))
    return out, truncated


@dataclass
class TreeBall:
    gog: GraphOfGroups
    base: TreeVertex
    radius: int
    vertices: list[TreeVertex]  # BFS order
    depth: dict[TreeVertex, int]
    edges: list[tuple[TreeVertex, TreeVertex, Edge, object]]  # (x, y, e from x, coset rep s)
    truncated: dict[TreeVertex, bool] = field(default_factory=dict)

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        for x in self.vertices:
            g.add_node(x, label=x.label)
        for x, y, e, _ in self.edges:
            g.add_edge(x, y, key=e[0], edge=e)
        return g

    def degree(self, x: TreeVertex) -> int:
        return sum(1 for a, b, _, _ in self.edges if a == x or b == x)


def ball(gog: GraphOfGroups, v0: str | None = None, r: int = 2,
         branch_cap: int = DEFAULT_BRANCH_CAP) -> TreeBall:
    if r < 0:
        raise ValueError("radius must be non-negative")
    if branch_cap < 1:
        raise EnumerationCapExceeded("branch cap below 1 makes radius 1 impossible", witness=branch_cap)
    x0 = base_vertex(gog, v0)
    depth = {x0: 0}
    order = [x0]
    edges = []
    truncated: dict[TreeVertex, bool] = {}
    queue = deque([x0])
    while queue:
        x = queue.popleft()
        if depth[x] >= r:
            continue
        nbrs, cut = neighbours(gog, x, branch_cap)
        truncated[x] = cut
        for e, s, y in nbrs:
            if y in depth:
                continue  # the parent: already recorded from its side
            depth[y] = depth[x] + 1
            order.append(y)
            edges.append((x, y, e, s))
            queue.append(y)
    for x in order:
        truncated.setdefault(x, False)
    return TreeBall(gog, x0, r, order, depth, edges, truncated)


def expected_degree(gog: GraphOfGroups, v: str) -> int | None:
    """Σ_e [G_v : α_e(G_e)] over edges with ι(e) = v; None when an index is infinite."""
    from .vcgroup import subgroup_index
    total = 0
    for e in gog.graph.outgoing(v):
        k = subgroup_index(gog.monos[e])
        if k is None:
            return None
        total += k
    return total


# ---------------------------------------------------------------------------
# Stabilizers


@dataclass(frozen=True)
class StabilizerWitness:
    conjugator: Pi1Word
    vertex: str
    checked_members: int
    checked_nonmembers: int


def stabilizer_witness(tb: TreeBall, x: TreeVertex, samples: int = 50,
                       seed: int = 0) -> StabilizerWitness:
    """Stab(x) = g·G_v·g⁻¹ with g the representative path of x.

    Checked on ``samples`` random members (they fix x) and ``samples`` random
    words outside the conjugate (they move x).
    """
    gog = tb.gog
    g = x.rep(gog).word()
    ginv = g.inverse()
    v = x.label
    G = gog.vertex_groups[v]
    rng = random.Random(seed)
    for _ in range(samples):
        h = Pi1Word(gog, (VertexElt(v, random_element(G, rng, 5)),))
        w = g * h * ginv
        if act(w, x) != x:
            raise AssertionError(f"conjugate element {w.text()} moves {x.text(gog)}")
    misses, tries = 0, 0
    while misses < samples and tries < 50 * samples:
        tries += 1
        w = random_word(gog, rng, 8)
        if not isinstance(membership_in_vertex_group(ginv * w * g, v), NotMember):
            continue
        misses += 1
        if act(w, x) == x:
            raise AssertionError(f"{w.text()} is outside the stabilizer but fixes {x.text(gog)}")
    return StabilizerWitness(g, v, samples, misses)


# ---------------------------------------------------------------------------
# Quotients


@dataclass
class QuotientBall:
    kind: str
    base: Hashable
    graph: nx.MultiGraph  # nodes keyed by (v, invariant key), edges keyed by geometric id + ends

    def truncated(self, radius: int) -> nx.MultiGraph:
        dist = nx.single_source_shortest_path_length(self.graph, self.base, cutoff=radius)
        return self.graph.subgraph(dist).copy()


def vertex_key(h: InducedHom, x: TreeVertex):
    """Invariant of the orbit Ker(h)·x."""
    gog = h.source
    if h.kind == "PhiFree":
        nf = x.rep(gog)
        return (x.label, apply_phi(h, nf))
    if h.kind == "QQuotient":
        target = h.target
        items = []
        for s, e in x.pairs:
            items += [("g", h.projections[gog.graph.iota(e)](s)), ("e", e)]
        return (x.label, _vertex(reduce_path(target, target.tree.root, items)).pairs)
    raise UndecidableMembership(f"no orbit invariant for kind {h.kind!r}")


def quotient_ball_by_kernel(tb: TreeBall, h: InducedHom) -> QuotientBall:
    assert h.source is tb.gog, "hom and ball live on different graphs of groups"
    g = nx.MultiGraph()
    key = {x: vertex_key(h, x) for x in tb.vertices}
    for x in tb.vertices:
        g.add_node(key[x], label=x.label)
    for x, y, e, _ in tb.edges:
        a, b = (key[x], key[y]) if e[1] > 0 else (key[y], key[x])
        ek = (e[0], a, b)
        if not g.has_edge(a, b, key=ek):
            g.add_edge(a, b, key=ek, edge=e[0])
    return QuotientBall(h.kind, key[tb.base], g)


def is_tree(g) -> bool:
    """Connected with |E| = |V| - 1 (multi-edges and loops counted)."""
    n = g.number_of_nodes()
    if n == 0:
        return False
    return nx.is_connected(nx.Graph(g)) and g.number_of_edges() == n - 1


def universal_cover_ball(gog: GraphOfGroups, v0: str | None = None, r: int = 2) -> nx.MultiGraph:
    """Radius-r ball of the universal cover of the underlying graph, by unfolding
    non-backtracking edge paths."""
    graph = gog.graph
    v0 = gog.tree.root if v0 is None else v0
    g = nx.MultiGraph()
    root = ()
    g.add_node(root, label=v0)
    frontier = [(root, v0)]
    for _ in range(r):
        nxt = []
        for path, v in frontier:
            for e in graph.outgoing(v):
                if path and path[-1] == bar(e):
                    continue
                child = path + (e,)
                w = graph.tau(e)
                g.add_node(child, label=w)
                g.add_edge(path, child, key=e[0], edge=e[0])
                nxt.append((child, w))
        frontier = nxt
    return g


def same_labelled_graph(a, b) -> bool:
    return nx.is_isomorphic(
        a, b,
        node_match=lambda p, q: p["label"] == q["label"],
        edge_match=lambda p, q: sorted(d["edge"] for d in p.values()) == sorted(d["edge"] for d in q.values()),
    )


def orbit_graph(tb: TreeBall) -> nx.MultiGraph:
    """Image of the ball in π₁\\X = Γ: vertices by label, edges by geometric id."""
    g = nx.MultiGraph()
    for x in tb.vertices:
        g.add_node(x.label, label=x.label)
    seen = set()
    for x, y, e, _ in tb.edges:
        if e[0] in seen:
            continue
        seen.add(e[0])
        o, t = tb.gog.graph.ends[e[0]]
        g.add_edge(o, t, key=e[0], edge=e[0])
    return g


def map_word_q(h: InducedHom, w: Pi1Word) -> Pi1Word:
    return Pi1Word(h.target, map_tokens_q(h, w.tokens))
