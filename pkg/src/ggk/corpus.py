"""Generated families of small virtually cyclic groups used for exhaustive checks."""

from __future__ import annotations

from .finite_core import (
    FiniteGroup,
    all_subgroups,
    alternating_group,
    automorphisms,
    cyclic_group,
    dihedral_group,
    direct_product,
    quaternion_group,
    subgroup_as_group,
    symmetric_group,
)
from .gog import Graph, GraphOfGroups
from .vcgroup import VCGroup, VCHom, finite_vc, nonorientable, orientable


def small_finite_groups(max_order: int = 16) -> list[tuple[str, FiniteGroup]]:
    z2 = cyclic_group(2)
    groups = [(f"Z{n}", cyclic_group(n)) for n in range(1, 9)]
    groups += [
        ("Z2xZ2", direct_product(z2, z2)),
        ("S3", symmetric_group(3)),
        ("D4", dihedral_group(4)),
        ("Q8", quaternion_group()),
        ("Z2xZ4", direct_product(z2, cyclic_group(4))),
        ("Z2^3", direct_product(z2, direct_product(z2, z2))),
        ("Z12", cyclic_group(12)),
        ("A4", alternating_group(4)),
        ("D6", dihedral_group(6)),
        ("Z16", cyclic_group(16)),
        ("D8", dihedral_group(8)),
        ("Z2xQ8", direct_product(z2, quaternion_group())),
    ]
    return [(n, g) for n, g in groups if g.order <= max_order]


def finite_corpus(max_order: int = 16) -> list[tuple[str, VCGroup]]:
    return [(f"fin:{n}", finite_vc(g)) for n, g in small_finite_groups(max_order)]


def orientable_corpus(max_order: int = 16, per_group: int = 3) -> list[tuple[str, VCGroup]]:
    out = []
    for name, g in small_finite_groups(max_order):
        for i, alpha in enumerate(automorphisms(g, limit=per_group)):
            out.append((f"ori:{name}:aut{i}", orientable(g, alpha)))
    return out


def nonorientable_corpus(max_c_order: int = 16) -> list[tuple[str, VCGroup]]:
    z2 = cyclic_group(2)
    bigs = [(f"Z{n}", cyclic_group(n)) for n in (2, 4, 6, 8)]
    bigs += [
        ("Z2xZ2", direct_product(z2, z2)),
        ("S3", symmetric_group(3)),
        ("D4", dihedral_group(4)),
        ("Q8", quaternion_group()),
        ("D6", dihedral_group(6)),
        ("Z2xZ4", direct_product(z2, cyclic_group(4))),
        ("D8", dihedral_group(8)),
        ("Z2xD4", direct_product(z2, dihedral_group(4))),
        ("Z2xA4", direct_product(z2, alternating_group(4))),
    ]
    out = []
    for name, A in bigs:
        if A.order > 2 * max_c_order:
            continue
        for j, h in enumerate(s for s in all_subgroups(A) if 2 * s.order == A.order):
            C, inc = subgroup_as_group(h)
            refl_a = next(x for x in range(A.order) if x not in h)
            CxZ2 = direct_product(C, z2)
            to_prod = [2 * c for c in range(C.order)]
            out.append((f"non:{name}:H{j}:xZ2",
                        nonorientable(C, A, CxZ2, inc.images, to_prod, refl_a, 1)))
            if j == 0:
                out.append((f"non:{name}:H{j}:double",
                            nonorientable(C, A, A, inc.images, inc.images, refl_a, refl_a)))
    return out


def vc_corpus(max_order: int = 16) -> list[tuple[str, VCGroup]]:
    return finite_corpus(max_order) + orientable_corpus(max_order) + nonorientable_corpus(max_order)


def _self_embeddings(G: VCGroup):
    """An edge group E with two injective maps E → G, the second stretching the
    infinite generator."""
    F = G.finite_part
    if G.kind == "orientable":
        k = G.alpha_order
        fin = [(g, 0) for g in F.generators]
        return G, VCHom(G, G, fin + [G.t]), VCHom(G, G, fin + [(F.identity, k + 1)])
    k = G.tau_order
    E = orientable(F, G.tau_power(1))
    fin = [(g, (0, 0)) for g in F.generators]
    return E, VCHom(E, G, fin + [G.T]), VCHom(E, G, fin + [G.pow(G.T, k + 1)])


def gog_corpus(per_kind: int = 6) -> list[tuple[str, GraphOfGroups]]:
    """Loops and amalgams over infinite edge groups, plus one finite-edge mix per group."""

    picks = orientable_corpus()[::7][:per_kind] + nonorientable_corpus()[::5][:per_kind]
    out = []
    z2 = finite_vc(cyclic_group(2))
    one = finite_vc(cyclic_group(1))
    for name, G in picks:
        E, inc, stretch = _self_embeddings(G)
        loop = GraphOfGroups(Graph(("v",), {"l": ("v", "v")}), {"v": G}, {"l": E},
                             {("l", 1): inc, ("l", -1): stretch})
        amalgam = GraphOfGroups(Graph(("u", "w"), {"e": ("u", "w")}), {"u": G, "w": G}, {"e": E},
                                {("e", 1): inc, ("e", -1): stretch})
        mixed = GraphOfGroups(
            Graph(("u", "w"), {"e": ("u", "w"), "f": ("w", "w")}), {"u": G, "w": z2},
            {"e": one, "f": one},
            {("e", 1): VCHom(one, G, [G.identity]), ("e", -1): VCHom(one, z2, [0]),
             ("f", 1): VCHom(one, z2, [0]), ("f", -1): VCHom(one, z2, [0])})
        out += [(f"{name}/loop", loop), (f"{name}/amalgam", amalgam), (f"{name}/mixed", mixed)]
    return out
