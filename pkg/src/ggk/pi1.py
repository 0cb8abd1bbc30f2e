"""Words and normal forms in the fundamental group of a graph of groups.

User-facing words live in the presentation relative to the spanning tree
``T``: vertex elements and edge symbols, tree edges allowed but trivial.
Internally a word is translated into a path in the fundamental groupoid
based at the tree root (vertex element ``x`` at ``v`` becomes
``γ_v·x·γ_v⁻¹`` for the tree path ``γ_v``) and reduced there.

A normal form is ``s₁ e₁ s₂ e₂ … s_n e_n g``: each ``s_i`` is the least
representative of its coset ``s_i·α_{e_i}(G_{e_i})``, there is no backtrack
``e_{i+1} = ē_i`` with ``s_{i+1} = 1``, and ``g`` is arbitrary.  Dropping the
tree edges from it gives the printed word.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import ProjectionMismatch, TokenTypeMismatch
from .gog import Edge, GraphOfGroups, bar
from .vcgroup import Element, VCHom, random_element


@dataclass(frozen=True)
class VertexElt:
    vertex: str
    element: Element

    def text(self) -> str:
        return f"g({self.vertex},{json.dumps(_jsonable(self.element), separators=(',', ':'))})"


@dataclass(frozen=True)
class EdgeSym:
    edge: str
    sign: int = 1

    def text(self) -> str:
        return f"{'e' if self.sign > 0 else 'E'}({self.edge})"

    @property
    def oriented(self) -> Edge:
        return (self.edge, self.sign)


Token = Union[VertexElt, EdgeSym]


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def format_tokens(tokens: Sequence[Token]) -> str:
    return ";".join(t.text() for t in tokens) if tokens else "1"


@dataclass(frozen=True, eq=False)
class Pi1Word:
    gog: GraphOfGroups
    tokens: tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        g = self.gog
        for t in self.tokens:
            if isinstance(t, VertexElt):
                if t.vertex not in g.vertex_groups:
                    raise TokenTypeMismatch(f"unknown vertex {t.vertex!r}", witness=t.text())
                try:
                    elt = g.vertex_groups[t.vertex].check(_tupleize(t.element))
                except Exception as exc:
                    raise TokenTypeMismatch(f"{t.element!r} is not in G_{t.vertex}",
                                            witness=t.vertex) from exc
                if elt != t.element:
                    raise TokenTypeMismatch(f"element {t.element!r} not in canonical encoding")
            elif isinstance(t, EdgeSym):
                if t.edge not in g.graph.ends or t.sign not in (1, -1):
                    raise TokenTypeMismatch(f"unknown edge symbol {t.text()}", witness=t.text())
            else:
                raise TokenTypeMismatch(f"not a token: {t!r}")

    def __mul__(self, other: Pi1Word) -> Pi1Word:
        return Pi1Word(self.gog, self.tokens + other.tokens)

    def inverse(self) -> Pi1Word:
        out: list[Token] = []
        for t in reversed(self.tokens):
            if isinstance(t, VertexElt):
                G = self.gog.vertex_groups[t.vertex]
                out.append(VertexElt(t.vertex, G.inv(t.element)))
            else:
                out.append(EdgeSym(t.edge, -t.sign))
        return Pi1Word(self.gog, tuple(out))

    def text(self) -> str:
        return format_tokens(self.tokens)

    def __repr__(self) -> str:
        return f"Pi1Word({self.text()})"


def _tupleize(x):
    if isinstance(x, list):
        return tuple(_tupleize(y) for y in x)
    return x


def word(gog: GraphOfGroups, tokens: Iterable[Token]) -> Pi1Word:
    return Pi1Word(gog, tuple(tokens))


def vertex_word(gog: GraphOfGroups, v: str, x: Element) -> Pi1Word:
    return Pi1Word(gog, (VertexElt(v, x),))


# ---------------------------------------------------------------------------
# Normal forms


@dataclass(frozen=True, eq=False)
class NormalForm:
    gog: GraphOfGroups
    start: str
    pairs: tuple[tuple[Element, Edge], ...]
    last: Element

    @property
    def end(self) -> str:
        return self.gog.graph.tau(self.pairs[-1][1]) if self.pairs else self.start

    def key(self) -> tuple:
        return (self.start, self.pairs, self.last)

    def __eq__(self, other):
        return isinstance(other, NormalForm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_identity(self) -> bool:
        return not self.pairs and self.last == self.gog.vertex_groups[self.start].identity

    def __len__(self) -> int:
        return len(self.pairs)

    def tokens(self) -> tuple[Token, ...]:
        """Word in the presentation relative to T (tree edges and unit factors dropped)."""
        g = self.gog
        tree = g.tree
        out: list[Token] = []
        for s, e in self.pairs:
            v = g.graph.iota(e)
            if s != g.vertex_groups[v].identity:
                out.append(VertexElt(v, s))
            if e not in tree:
                out.append(EdgeSym(e[0], e[1]))
        if self.last != g.vertex_groups[self.end].identity:
            out.append(VertexElt(self.end, self.last))
        return tuple(out)

    def word(self) -> Pi1Word:
        return Pi1Word(self.gog, self.tokens())

    def text(self) -> str:
        return format_tokens(self.tokens())

    def __repr__(self) -> str:
        return f"NormalForm({self.text()})"


class _PathReducer:
    """Right-multiplies a normal form by groupoid generators, keeping it normal."""

    def __init__(self, gog: GraphOfGroups, start: str):
        self.gog = gog
        self.start = start
        self.vertex = start
        self.pairs: list[tuple[Element, Edge]] = []
        self.last = gog.vertex_groups[start].identity

    def mul_element(self, x: Element) -> None:
        self.last = self.gog.vertex_groups[self.vertex].mul(self.last, x)

    def mul_edge(self, e: Edge) -> None:
        g = self.gog
        assert g.graph.iota(e) == self.vertex, "path is not composable"
        mono = g.monos[e]
        if self.pairs and self.pairs[-1][1] == bar(e):
            h = mono.preimage(self.last)
            if h is not None:
                # pinch e_k·α_ē_k(h)·ē_k = α_e_k(h)
                s, ek = self.pairs.pop()
                self.vertex = g.graph.iota(ek)
                self.last = g.vertex_groups[self.vertex].mul(s, g.monos[ek](h))
                return
        s, h = mono.decompose(self.last)
        self.pairs.append((s, e))
        self.vertex = g.graph.tau(e)
        self.last = g.monos[bar(e)](h)

    def mul_path(self, path: Sequence[Edge]) -> None:
        for e in path:
            self.mul_edge(e)

    def result(self) -> NormalForm:
        return NormalForm(self.gog, self.start, tuple(self.pairs), self.last)


def _path_items(gog: GraphOfGroups, tokens: Sequence[Token]) -> list:
    """Groupoid path for a T-relative word: items ('e', edge) and ('g', element)."""
    tree = gog.tree
    out: list = []

    def tree_path(v):
        return [("e", e) for e in tree.path_to(v)]

    def back_path(v):
        return [("e", bar(e)) for e in reversed(tree.path_to(v))]

    for t in tokens:
        if isinstance(t, VertexElt):
            out += tree_path(t.vertex) + [("g", t.element)] + back_path(t.vertex)
        else:
            e = t.oriented
            out += tree_path(gog.graph.iota(e)) + [("e", e)] + back_path(gog.graph.tau(e))
    return out


def _as_tokens(w) -> tuple[Token, ...]:
    if isinstance(w, Pi1Word):
        return w.tokens
    if isinstance(w, NormalForm):
        return w.tokens()
    return tuple(w)


def reduce(w: Pi1Word | NormalForm, strategy: str = "stack") -> NormalForm:
    """Normal form of ``w``.

    ``strategy`` selects the route: "stack" (right-multiplication into a
    normal form), or "leftmost"/"rightmost" (repeated pinch rewriting, then a
    single transversal pass).  All three give the same result.
    """
    gog = w.gog
    items = _path_items(gog, _as_tokens(w))
    return reduce_path(gog, gog.tree.root, items, strategy)


def reduce_path(gog: GraphOfGroups, start: str, items: Sequence, strategy: str = "stack") -> NormalForm:
    if strategy == "stack":
        r = _PathReducer(gog, start)
        for kind, x in items:
            if kind == "e":
                r.mul_edge(x)
            else:
                r.mul_element(x)
        return r.result()
    if strategy in ("leftmost", "rightmost"):
        return _rewrite(gog, start, items, strategy == "leftmost")
    raise ValueError(f"unknown strategy {strategy!r}")


def _rewrite(gog: GraphOfGroups, start: str, items: Sequence, leftmost: bool) -> NormalForm:
    graph = gog.graph
    # collapse into x0 e1 x1 … en xn
    xs = [gog.vertex_groups[start].identity]
    es: list[Edge] = []
    v = start
    for kind, x in items:
        if kind == "e":
            assert graph.iota(x) == v, "path is not composable"
            es.append(x)
            v = graph.tau(x)
            xs.append(gog.vertex_groups[v].identity)
        else:
            xs[-1] = gog.vertex_groups[v].mul(xs[-1], x)
    while True:
        order = range(len(es) - 1) if leftmost else range(len(es) - 2, -1, -1)
        hit = None
        for i in order:
            if es[i + 1] == bar(es[i]):
                h = gog.monos[es[i + 1]].preimage(xs[i + 1])
                if h is not None:
                    hit = (i, h)
                    break
        if hit is None:
            break
        i, h = hit
        ei = es[i]
        u = graph.iota(ei)
        G = gog.vertex_groups[u]
        merged = G.mul(G.mul(xs[i], gog.monos[ei](h)), xs[i + 2])
        xs[i:i + 3] = [merged]
        es[i:i + 2] = []
    pairs = []
    for i, e in enumerate(es):
        s, h = gog.monos[e].decompose(xs[i])
        pairs.append((s, e))
        w = graph.tau(e)
        xs[i + 1] = gog.vertex_groups[w].mul(gog.monos[bar(e)](h), xs[i + 1])
    return NormalForm(gog, start, tuple(pairs), xs[-1])


def pi1_eq(u: Pi1Word, v: Pi1Word) -> bool:
    return reduce(u * v.inverse()).is_identity()


def identity_word(gog: GraphOfGroups) -> Pi1Word:
    return Pi1Word(gog, ())


@dataclass(frozen=True)
class NotMember:
    reason: str = "normal form is not a single vertex element"


def membership_in_vertex_group(w: Pi1Word | NormalForm, v: str) -> Element | NotMember:
    """The element x of G_v equal to w, or NotMember."""
    gog = w.gog
    tree = gog.tree
    items = [("e", bar(e)) for e in reversed(tree.path_to(v))]
    items += _path_items(gog, _as_tokens(w))
    items += [("e", e) for e in tree.path_to(v)]
    nf = reduce_path(gog, v, items)
    if nf.pairs:
        return NotMember()
    return nf.last


# ---------------------------------------------------------------------------
# Free group and induced homomorphisms

FreeWord = tuple[tuple[str, int], ...]


def free_reduce(letters: Iterable[tuple[str, int]]) -> FreeWord:
    out: list[tuple[str, int]] = []
    for a, s in letters:
        if out and out[-1] == (a, -s):
            out.pop()
        else:
            out.append((a, s))
    return tuple(out)


def format_free(w: FreeWord) -> str:
    return "".join(a if s > 0 else f"{a}^-1" for a, s in w) or "1"


@dataclass(frozen=True, eq=False)
class InducedHom:
    """φ (kind PhiFree) or q (kind QQuotient) on π₁ of ``source``."""

    kind: str
    source: GraphOfGroups
    target: object  # Graph for PhiFree, GraphOfGroups for QQuotient
    projections: Mapping[str, VCHom] = field(default_factory=dict)

    def __call__(self, w):
        return apply_phi(self, w) if self.kind == "PhiFree" else apply_q(self, w)

    def in_kernel(self, w) -> bool:
        img = self(w)
        return (not img) if self.kind == "PhiFree" else img.is_identity()


def phi_free(gog: GraphOfGroups) -> InducedHom:
    return InducedHom("PhiFree", gog, gog.graph)


def apply_phi(h: InducedHom, w) -> FreeWord:
    tree = h.source.tree
    letters = [(t.edge, t.sign) for t in _as_tokens(w)
               if isinstance(t, EdgeSym) and t.oriented not in tree]
    return free_reduce(letters)


def q_induced(gog: GraphOfGroups, gog2: GraphOfGroups, projections: Mapping[str, VCHom]) -> InducedHom:
    if gog.graph != gog2.graph:
        raise ProjectionMismatch("source and target graphs differ")
    for v in gog.vertices:
        p = projections.get(v)
        if p is None or p.source != gog.vertex_groups[v] or p.target != gog2.vertex_groups[v]:
            raise ProjectionMismatch(f"projection at {v} does not match the vertex groups", witness=v)
    return InducedHom("QQuotient", gog, gog2, dict(projections))


def map_tokens_q(h: InducedHom, tokens: Sequence[Token]) -> tuple[Token, ...]:
    out: list[Token] = []
    for t in tokens:
        if isinstance(t, VertexElt):
            out.append(VertexElt(t.vertex, h.projections[t.vertex](t.element)))
        else:
            out.append(t)
    return tuple(out)


def apply_q(h: InducedHom, w) -> NormalForm:
    target: GraphOfGroups = h.target  # type: ignore[assignment]
    return reduce(Pi1Word(target, map_tokens_q(h, _as_tokens(w))))


# ---------------------------------------------------------------------------
# Utilities


def random_word(gog: GraphOfGroups, rng: random.Random, max_len: int = 12) -> Pi1Word:
    tokens: list[Token] = []
    edges = gog.graph.edge_ids
    for _ in range(rng.randint(0, max_len)):
        if edges and rng.random() < 0.45:
            tokens.append(EdgeSym(rng.choice(edges), rng.choice((1, -1))))
        else:
            v = rng.choice(gog.vertices)
            tokens.append(VertexElt(v, random_element(gog.vertex_groups[v], rng, 4)))
    return Pi1Word(gog, tuple(tokens))


def relation_words(gog: GraphOfGroups) -> list[tuple[str, Pi1Word]]:
    """Every relation instance (i)-(iii) and vertex relator as a word that must be trivial."""
    out: list[tuple[str, Pi1Word]] = []
    g = gog.graph
    for v in g.vertices:
        G = gog.vertex_groups[v]
        gens = G.generator_elements
        for name, w in G.relators:
            toks = []
            for k, s in w:
                x = gens[k] if s > 0 else G.inv(gens[k])
                toks.append(VertexElt(v, x))
            out.append((f"{v}: {name}", Pi1Word(gog, tuple(toks))))
    for i in g.edge_ids:
        e = (i, 1)
        out.append((f"(i) {i}", Pi1Word(gog, (EdgeSym(i, 1), EdgeSym(i, -1)))))
        if e in gog.tree:
            out.append((f"(iii) {i}", Pi1Word(gog, (EdgeSym(i, 1),))))
        Ge = gog.edge_group(i)
        for k, s in enumerate(Ge.generator_elements):
            a_bar = gog.monos[bar(e)](s)
            a_e = gog.monos[e](s)
            Gi = gog.vertex_groups[g.iota(e)]
            toks = (EdgeSym(i, 1), VertexElt(g.tau(e), a_bar), EdgeSym(i, -1),
                    VertexElt(g.iota(e), Gi.inv(a_e)))
            out.append((f"(ii) {i} s{k}", Pi1Word(gog, toks)))
    return out


def inclusion_tokens(sub: GraphOfGroups, gog: GraphOfGroups, tokens: Sequence[Token]) -> tuple[Token, ...]:
    """Image of a word of a sub-graph-of-groups (relative to its own tree) in ``gog``."""
    tree = sub.tree

    def path(v, inverse=False):
        p = tree.path_to(v)
        if inverse:
            return [EdgeSym(e[0], -e[1]) for e in reversed(p)]
        return [EdgeSym(e[0], e[1]) for e in p]

    out: list[Token] = []
    for t in tokens:
        if isinstance(t, VertexElt):
            out += path(t.vertex) + [t] + path(t.vertex, True)
        else:
            e = t.oriented
            out += path(sub.graph.iota(e)) + [t] + path(sub.graph.tau(e), True)
    return tuple(out)
