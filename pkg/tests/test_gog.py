import pytest

from conftest import TRIVIAL_DOC, Z_DOC, cyclic_doc, fixture_path, loop_doc
from ggk.errors import EdgeGroupNotFinite, ValidationError
from ggk.gog import (
    Amalgam,
    HNN,
    infinite_edge_reduction,
    presentation,
    spanning_tree,
    split_along_finite_edge,
    validate,
)
from ggk.serialize import load, parse_document
from ggk.vcgroup import kernel_witness, vc_hom_is_injective

SINGLE_Z = {"vertices": [{"id": "v", "group": Z_DOC}], "edges": []}


def test_single_vertex_valid():
    assert validate(parse_document(SINGLE_Z)).ok


def test_bs23_valid_and_monos_injective(gogs):
    g = gogs["bs23"]
    assert validate(g).ok
    assert all(vc_hom_is_injective(m) for m in g.monos.values())


def test_non_injective_mono_reported():
    doc = loop_doc(Z_DOC, Z_DOC, [[0, 0]], [[0, 1]])
    g = parse_document(doc, strict=False)
    rep = validate(g)
    assert rep.codes() == ["NonInjectiveMono"]
    assert rep.issues[0].witness["edge"] == ["l", 1]
    assert kernel_witness(g.monos[("l", 1)]) is not None
    with pytest.raises(ValidationError):
        validate(g, strict=True)


def test_disconnected():
    doc = {"vertices": [{"id": "a", "group": Z_DOC}, {"id": "b", "group": Z_DOC}], "edges": []}
    rep = validate(parse_document(doc, strict=False))
    assert "Disconnected" in rep.codes()


def test_spanning_trees(gogs):
    assert not spanning_tree(gogs["single_z"].graph).edges
    assert not spanning_tree(gogs["bs23"].graph).edges
    t = spanning_tree(gogs["theta"].graph)
    assert {e if isinstance(e, str) else e[0] for e in t.edges} == {"f"}


def test_presentations(gogs):
    assert presentation(gogs["single_z"]).text() == "< v.t |  >"
    g = parse_document(loop_doc(TRIVIAL_DOC, TRIVIAL_DOC, [0], [0]))
    p = presentation(g)
    assert p.generators == ("l",) and p.text() == "< l |  >"
    # relation (ii) with x = t: l x^3 l^-1 = x^2
    assert presentation(gogs["bs23"]).text() == "< v.t, l | l*v.t^3*l^-1 = v.t^2 >"


def test_split_amalgam_and_hnn(gogs):
    s = split_along_finite_edge(gogs["z2_free_z3"], "e")
    assert isinstance(s, Amalgam)
    assert s.left.vertices == ("a",) and s.right.vertices == ("b",)
    assert s.left.vertex_groups["a"].finite_part.order == 2
    assert s.edge_group.finite_part.order == 1
    g = parse_document(loop_doc(Z_DOC, TRIVIAL_DOC, [[0, 0]], [[0, 0]]))
    h = split_along_finite_edge(g, "l")
    assert isinstance(h, HNN) and h.base.graph.edge_ids == ()
    with pytest.raises(EdgeGroupNotFinite):
        split_along_finite_edge(gogs["bs23"], "l")


def test_infinite_edge_reduction(gogs):
    leaves, tree = infinite_edge_reduction(gogs["bs23"])
    assert leaves == [gogs["bs23"]] and tree.kind == "leaf"
    leaves, tree = infinite_edge_reduction(gogs["z2_free_z3"])
    assert len(leaves) == 2 and tree.kind == "amalgam" and tree.count("amalgam") == 1
    assert all(len(L.vertices) == 1 for L in leaves)
    leaves, tree = infinite_edge_reduction(gogs["theta"])
    # removing the finite edge f leaves the graph connected: one HNN step, one leaf
    assert len(leaves) == 1 and tree.kind == "hnn" and tree.count("hnn") == 1
    assert leaves[0].graph.edge_ids == ("x", "y")


def test_leaves_have_only_infinite_edges():
    from ggk.corpus import gog_corpus
    for _, g in gog_corpus():
        leaves, _ = infinite_edge_reduction(g)
        for L in leaves:
            assert validate(L).ok
            assert all(L.edge_group(i).is_infinite for i in L.graph.edge_ids)


def test_load_fixture_path():
    assert load(fixture_path("single_z6")).vertices == ("v",)
