import networkx as nx
import pydot
import pytest

from conftest import FIXTURE_NAMES
from ggk.constructions import quotient_by_max_finite_normal
from ggk.dot import ball_to_dot, gog_to_dot, quotient_to_dot
from ggk.gog import infinite_edge_reduction
from ggk.pi1 import EdgeSym, Pi1Word, VertexElt, identity_word, phi_free
from ggk.tree import (
    act,
    ball,
    base_vertex,
    expected_degree,
    is_tree,
    quotient_ball_by_kernel,
    same_labelled_graph,
    stabilizer_witness,
    universal_cover_ball,
)


def test_radius_zero(gogs):
    tb = ball(gogs["bs23"], r=0)
    assert tb.vertices == [base_vertex(gogs["bs23"])] and not tb.edges


@pytest.mark.parametrize("r", range(6))
def test_dinfty_ball_is_a_path(gogs, r):
    g = ball(gogs["dinfty_amalgam"], r=r).graph()
    assert g.number_of_nodes() == 2 * r + 1
    assert is_tree(g) and max((d for _, d in g.degree()), default=0) <= 2


def test_free_product_ball(gogs):
    g = gogs["z2_free_z3"]
    tb = ball(g, "a", 2)
    assert len(tb.vertices) == 7
    for x in tb.vertices:
        if tb.depth[x] < 2 and not tb.truncated[x]:
            assert tb.degree(x) == expected_degree(g, x.label) == {"a": 2, "b": 3}[x.label]


def test_action_basics(gogs):
    g = gogs["bs23"]
    x0 = base_vertex(g)
    assert act(identity_word(g), x0) == x0
    assert act(Pi1Word(g, (VertexElt("v", (0, 7)),)), x0) == x0
    moved = act(Pi1Word(g, (EdgeSym("l", 1),)), x0)
    assert moved != x0
    # e moves the base to the vertex with representative e
    assert moved.rep(g).text() == "e(l)"


def test_stabilizer_conjugators(gogs):
    g = gogs["bs23"]
    tb = ball(g, r=2)
    w = stabilizer_witness(tb, tb.base)
    assert w.conjugator.tokens == () and w.vertex == "v"
    for x in tb.vertices:
        assert len(stabilizer_witness(tb, x, samples=10).conjugator.tokens) >= tb.depth[x]
        if tb.depth[x] == 2:
            assert len(x.rep(g)) == 2


def test_phi_quotients(gogs):
    g = gogs["dinfty_amalgam"]
    qb = quotient_ball_by_kernel(ball(g, r=2), phi_free(g))
    assert qb.graph.number_of_nodes() == 2 and qb.graph.number_of_edges() == 1
    g = gogs["bs23"]
    qb = quotient_ball_by_kernel(ball(g, r=4), phi_free(g)).truncated(4)
    assert is_tree(qb) and max(d for _, d in qb.degree()) == 2 and qb.number_of_nodes() == 9


def test_q_quotient_has_finite_stabilizer_classes(gogs):
    g = gogs["zxz2_loop"]
    r = quotient_by_max_finite_normal(g)
    tb = ball(g, r=2)
    qb = quotient_ball_by_kernel(tb, r.q)
    # each class is hit by at most |F_v| ball vertices adjacent to the base
    assert qb.graph.number_of_nodes() < len(tb.vertices)


def test_is_tree_small():
    g = nx.MultiGraph()
    g.add_node(0)
    assert is_tree(g)
    assert not is_tree(nx.MultiGraph(nx.cycle_graph(3)))
    assert not is_tree(nx.MultiGraph())


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_tree_lemma_per_fixture(gogs, name):
    g = gogs[name]
    qb = quotient_ball_by_kernel(ball(g, r=4), phi_free(g)).truncated(4)
    assert is_tree(qb)
    assert same_labelled_graph(qb, universal_cover_ball(g, r=4))


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_dot_parses(gogs, name):
    g = gogs[name]
    tb = ball(g, r=2)
    for text in (gog_to_dot(g), ball_to_dot(tb), quotient_to_dot(quotient_ball_by_kernel(tb, phi_free(g)))):
        graphs = pydot.graph_from_dot_data(text)
        assert graphs and len(graphs) == 1
    parsed = pydot.graph_from_dot_data(ball_to_dot(tb))[0]
    assert len(parsed.get_nodes()) == len(tb.vertices)
    assert ball_to_dot(tb) == ball_to_dot(ball(g, r=2))  # deterministic


def test_truncation_marked(gogs):
    tb = ball(gogs["theta"], r=2, branch_cap=2)
    assert any(tb.truncated.values())
    assert "truncated" in ball_to_dot(tb)
