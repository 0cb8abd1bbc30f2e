"""The two quotient graph-of-groups constructions, their checks, and the
wreath-product embedding of a virtually cyclic group."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

import networkx as nx

from .errors import (
    ClaimViolated,
    EdgeGroupFinite,
    GroupFinite,
    InducedMapNotInjective,
    NotNormal,
    NotWellDefined,
    PreimageNotFinite,
    VertexNotZorDinfty,
)
from .gog import GraphOfGroups, validate
from .pi1 import InducedHom, phi_free, q_induced
from .report import ValidationReport
from .tree import ball, is_tree, orbit_graph, quotient_ball_by_kernel, same_labelled_graph
from .vcgroup import (
    Element,
    VCFiniteSubgroup,
    VCGroup,
    VCHom,
    brute_force_max_finite_normal,
    induced_hom_mod_max_infinite_cyclic,
    induced_hom_on_quotients,
    injective_on_ball,
    is_dinfty_model,
    is_z_model,
    max_finite_normal,
    max_infinite_cyclic,
    preimage_of_subgroup,
    quotient_by_max_finite,
    random_element,
    solve_power,
    vc_ball,
    vc_hom_is_injective,
)
from .vcgroup import quotient_by_max_infinite_cyclic as group_mod_max_cyclic


@dataclass(frozen=True, eq=False)
class QuotientResult:
    construction: str  # max_finite_normal | max_infinite_cyclic
    source: GraphOfGroups
    gog: GraphOfGroups
    vertex_projections: Mapping[str, VCHom]
    edge_projections: Mapping[str, VCHom]
    q: InducedHom


def _require_infinite_edges(gog: GraphOfGroups) -> None:
    for i in gog.graph.edge_ids:
        if not gog.edge_group(i).is_infinite:
            raise EdgeGroupFinite(
                f"edge {i} has a finite group; split it off with infinite_edge_reduction first",
                witness=i)


def _assemble(construction: str, gog: GraphOfGroups, vq: dict, induce) -> QuotientResult:
    vgroups = {v: vq[v].model for v in gog.vertices}
    vproj = {v: vq[v].projection for v in gog.vertices}
    egroups, eproj, monos = {}, {}, {}
    for e in gog.graph.oriented_edges:
        try:
            ind = induce(gog.monos[e])
        except NotWellDefined as exc:
            raise InducedMapNotInjective(f"edge {e}: {exc}", witness=list(e)) from exc
        if not ind.injective:
            raise InducedMapNotInjective(f"induced map on edge {e} is not injective", witness=list(e))
        egroups[e[0]] = ind.source_quotient.model
        eproj[e[0]] = ind.source_quotient.projection
        monos[e] = ind.hom
    gog2 = GraphOfGroups(gog.graph, vgroups, egroups, monos)
    validate(gog2, strict=True)
    return QuotientResult(construction, gog, gog2, vproj, eproj, q_induced(gog, gog2, vproj))


def quotient_by_max_finite_normal(gog: GraphOfGroups) -> QuotientResult:
    """G'_v = G_v/F_v and G'_e = G_e/α_e⁻¹(F_ι(e)), with the induced monos."""
    _require_infinite_edges(gog)
    vq = {v: quotient_by_max_finite(gog.vertex_groups[v]) for v in gog.vertices}
    return _assemble("max_finite_normal", gog, vq, induced_hom_on_quotients)


def quotient_by_max_infinite_cyclic(gog: GraphOfGroups) -> QuotientResult:
    """Vertex groups Z or D∞ become trivial or Z/2."""
    _require_infinite_edges(gog)
    vq = {}
    for v in gog.vertices:
        G = gog.vertex_groups[v]
        if not (is_z_model(G) or is_dinfty_model(G)):
            raise VertexNotZorDinfty(f"vertex {v} carries {G.describe()}", witness=v)
        vq[v] = group_mod_max_cyclic(G)
    return _assemble("max_infinite_cyclic", gog, vq, induced_hom_mod_max_infinite_cyclic)


# ---------------------------------------------------------------------------
# Checks


def verify_edge_kernel_is_max_finite_normal(gog: GraphOfGroups, e) -> ValidationReport:
    """α_e⁻¹(F_ι(e)) against the brute-force maximal finite normal subgroup of G_e."""
    rep = ValidationReport()
    mono = gog.monos[e]
    F = max_finite_normal(mono.target).subgroup
    pre = preimage_of_subgroup(mono, F)
    oracle = brute_force_max_finite_normal(mono.source)
    structural = max_finite_normal(mono.source).subgroup
    rep.facts.update(edge=list(e), preimage_order=pre.order, oracle_order=len(oracle.maximum))
    if pre.elements != oracle.maximum or pre != structural:
        raise ClaimViolated(
            f"edge {e}: preimage of F has {pre.order} elements, oracle finds {len(oracle.maximum)}",
            witness={"preimage": sorted(map(repr, pre.elements)),
                     "oracle": sorted(map(repr, oracle.maximum))})
    return rep


def check_induced_monos(result: QuotientResult, radius: int = 8) -> ValidationReport:
    """Decision procedure and ball oracle must both report injective."""
    rep = ValidationReport()
    for e, f in result.gog.monos.items():
        dec, orc = vc_hom_is_injective(f), injective_on_ball(f, radius)
        if not (dec and orc):
            rep.add("InducedMapNotInjective", f"edge {e}: decision={dec}, ball oracle={orc}", list(e))
    return rep


@dataclass(frozen=True)
class FiniteEqualTo:
    subgroup: VCFiniteSubgroup
    matches_max_finite: bool

    def describe(self) -> str:
        return f"FiniteEqualTo(order {self.subgroup.order})"


@dataclass(frozen=True)
class InfiniteCyclic:
    generator: Element

    def describe(self) -> str:
        return f"InfiniteCyclic({self.generator!r})"


def kernel_vertex_stabilizer_class(q: InducedHom, v: str, radius: int = 4):
    """Ker(q) ∩ G_v, computed exactly from the projection at v."""
    proj = q.projections[v]
    G, M = proj.source, proj.target
    trivial = VCFiniteSubgroup(M, frozenset([M.identity]))
    try:
        kernel = preimage_of_subgroup(proj, trivial)
    except PreimageNotFinite:
        kernel = None
    if kernel is not None:
        return FiniteEqualTo(kernel, kernel == max_finite_normal(G).subgroup)
    gen = max_infinite_cyclic(G).generator
    # every kernel element of the ball is a power of gen, and gen is in the kernel
    assert proj(gen) == M.identity
    for x in vc_ball(G, radius):
        if proj(x) == M.identity:
            n = solve_power(G.translation(gen), G.translation(x))
            if n is None or G.pow(gen, n) != x:
                raise ClaimViolated(f"kernel element {x!r} is not a power of {gen!r}", witness=repr(x))
    return InfiniteCyclic(gen)


def proper_cocompact_check(gog: GraphOfGroups, radius: int = 3) -> ValidationReport:
    """Finite stabilizers on a ball of the tree and a finite quotient graph equal to Γ."""
    rep = ValidationReport()
    tb = ball(gog, None, radius)
    infinite = sorted({x.label for x in tb.vertices if gog.vertex_groups[x.label].is_infinite})
    if infinite:
        rep.add("InfiniteStabilizer", "vertex stabilizers are infinite", infinite)
    og = orbit_graph(tb)
    gamma = nx.MultiGraph()
    for v in gog.vertices:
        gamma.add_node(v, label=v)
    for i, (o, t) in gog.graph.ends.items():
        gamma.add_edge(o, t, key=i, edge=i)
    if not same_labelled_graph(og, gamma):
        rep.add("QuotientGraphMismatch", "orbit graph of the ball differs from the underlying graph")
    rep.facts.update(ball_vertices=len(tb.vertices), quotient_vertices=og.number_of_nodes(),
                     quotient_edges=og.number_of_edges())
    return rep


def lemma_tree_check(gog: GraphOfGroups, radius: int = 4) -> ValidationReport:
    """Ker(φ)-quotient of a ball, truncated, is a tree equal to the universal-cover ball."""
    from .tree import universal_cover_ball
    rep = ValidationReport()
    tb = ball(gog, None, radius)
    qb = quotient_ball_by_kernel(tb, phi_free(gog)).truncated(radius)
    uc = universal_cover_ball(gog, None, radius)
    tree_ok, iso_ok = is_tree(qb), same_labelled_graph(qb, uc)
    if not tree_ok:
        rep.add("NotATree", "quotient ball is not a tree")
    if not iso_ok:
        rep.add("CoverMismatch", "quotient ball differs from the universal-cover ball")
    rep.facts.update(ball_vertices=len(tb.vertices), quotient_vertices=qb.number_of_nodes())
    return rep


# ---------------------------------------------------------------------------
# Normal cyclic subgroups and the wreath embedding


def in_cyclic(G: VCGroup, t: Element, x: Element) -> int | None:
    """n with t^n = x, or None."""
    n = solve_power(G.translation(t), G.translation(x))
    if n is None or G.pow(t, n) != x:
        return None
    return n


def normal_cyclic_finder(G: VCGroup) -> tuple[Element, int]:
    """A generator t of a normal infinite cyclic subgroup and its index m."""
    if not G.is_infinite:
        raise GroupFinite(f"{G.describe()} is finite", witness=G.describe())
    F = G.finite_part
    if G.kind == "orientable":
        k = G.alpha_order
        t, m = (F.identity, k), k * F.order
    else:
        k = G.tau_order
        Tk = G.pow(G.T, k)
        # a·T^k·a⁻¹ = c'·T^-k; then T^(k·j) is normal for j the order of c'
        c_prime = G.mul(G.conj(G.a, Tk), Tk)
        assert c_prime[1] == (0, 0)
        j = F.element_order(c_prime[0])
        t, m = G.pow(G.T, k * j), 2 * F.order * k * j
    for g in G.generator_elements:
        if in_cyclic(G, t, G.conj(g, t)) is None:
            raise NotNormal(f"<{t!r}> is not normalised by {g!r}", witness=repr(g))
    return t, m


@dataclass(frozen=True)
class WreathElement:
    """(a, σ) in Z≀S_m; product (a,σ)(b,τ) = (j ↦ a_τ(j) + b_j, σ∘τ)."""

    vector: tuple[int, ...]
    perm: tuple[int, ...]

    def __mul__(self, other: WreathElement) -> WreathElement:
        a, s = self.vector, self.perm
        b, t = other.vector, other.perm
        return WreathElement(tuple(a[t[j]] + b[j] for j in range(len(b))),
                             tuple(s[t[j]] for j in range(len(t))))

    @staticmethod
    def identity(m: int) -> WreathElement:
        return WreathElement((0,) * m, tuple(range(m)))

    def inverse(self) -> WreathElement:
        m = len(self.perm)
        inv = [0] * m
        for j, i in enumerate(self.perm):
            inv[i] = j
        return WreathElement(tuple(-self.vector[inv[i]] for i in range(m)), tuple(inv))


class WreathEmbedding:
    """g ↦ (a, σ) where g·r_j = r_σ(j)·t^(a_j) for the transversal r_1..r_m."""

    def __init__(self, G: VCGroup, t: Element, m: int):
        self.group, self.t, self.m = G, t, m
        for g in G.generator_elements:
            if in_cyclic(G, t, G.conj(g, t)) is None:
                raise NotNormal(f"<{t!r}> is not normal", witness=repr(g))
        reps: list = []
        for z in G.elements_by_key():
            if all(in_cyclic(G, t, G.mul(G.inv(r), z)) is None for r in reps):
                reps.append(z)
                if len(reps) == m:
                    break
        self.transversal = tuple(reps)
        self._rinv = tuple(G.inv(r) for r in reps)
        self.generator_images = tuple(self(g) for g in G.generator_elements)

    def __call__(self, g: Element) -> WreathElement:
        G = self.group
        vec, perm = [], []
        for r in self.transversal:
            y = G.mul(g, r)
            for i, ri in enumerate(self._rinv):
                n = in_cyclic(G, self.t, G.mul(ri, y))
                if n is not None:
                    perm.append(i)
                    vec.append(n)
                    break
            else:
                raise NotNormal(f"{y!r} lies in no coset of the transversal")
        return WreathElement(tuple(vec), tuple(perm))

    def via_generators(self, x: Element) -> WreathElement:
        """Image computed from a word for x in the generators (second route)."""
        out = WreathElement.identity(self.m)
        for k, s in self.group.element_word(x):
            img = self.generator_images[k]
            out = out * (img if s > 0 else img.inverse())
        return out


def wreath_embed(G: VCGroup, t: Element | None = None, m: int | None = None) -> WreathEmbedding:
    if t is None or m is None:
        t, m = normal_cyclic_finder(G)
    return WreathEmbedding(G, t, m)


def check_wreath(emb: WreathEmbedding, pairs: int = 200, radius: int = 6, seed: int = 0) -> ValidationReport:
    rep = ValidationReport()
    G = emb.group
    rng = random.Random(seed)
    for _ in range(pairs):
        x, y = random_element(G, rng, 8), random_element(G, rng, 8)
        if emb(G.mul(x, y)) != emb(x) * emb(y):
            rep.add("NotHomomorphism", "image of a product differs", [repr(x), repr(y)])
            break
        if emb.via_generators(x) != emb(x):
            rep.add("GeneratorMismatch", "generator route disagrees", repr(x))
            break
    b = vc_ball(G, radius)
    if len({emb(x) for x in b}) != len(b):
        rep.add("NotInjective", f"two elements of the radius-{radius} ball collide")
    rep.facts.update(ball=len(b), m=emb.m)
    return rep
