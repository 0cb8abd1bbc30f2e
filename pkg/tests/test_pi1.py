import random
import re

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggk.constructions import quotient_by_max_finite_normal
from ggk.errors import ProjectionMismatch, TokenTypeMismatch
from ggk.pi1 import (
    EdgeSym,
    NotMember,
    Pi1Word,
    VertexElt,
    apply_phi,
    identity_word,
    membership_in_vertex_group,
    phi_free,
    pi1_eq,
    q_induced,
    random_word,
    reduce,
    relation_words,
)
from ggk.serialize import parse_word
from ggk.vcgroup import random_element

E, EI = EdgeSym("l", 1), EdgeSym("l", -1)


def x(n):
    return VertexElt("v", (0, n))


def bs_oracle(tokens):
    """Independent rewriting for BS(2,3): l t^3k l⁻¹ → t^2k and t^0 erasure, to a fixpoint.

    Words are lists of ('t', n) and ('l', ±1); returns the rewritten list.
    """
    w = []
    for t in tokens:
        w.append(("t", t.element[1]) if isinstance(t, VertexElt) else ("l", t.sign))
    changed = True
    while changed:
        changed = False
        out = []
        for a in w:
            if a == ("t", 0):
                changed = True
                continue
            if out and a[0] == "t" and out[-1][0] == "t":
                out[-1] = ("t", out[-1][1] + a[1])
                changed = True
            elif out and a[0] == "l" and out[-1] == ("l", -a[1]):
                out.pop()
                changed = True
            else:
                out.append(a)
        w = out
        for i in range(len(w) - 2):
            if w[i] == ("l", 1) and w[i + 1][0] == "t" and w[i + 1][1] % 3 == 0 and w[i + 2] == ("l", -1):
                w[i:i + 3] = [("t", 2 * w[i + 1][1] // 3)]
                changed = True
                break
    return w


def test_edge_inverse_cancels(gogs):
    g = gogs["bs23"]
    assert reduce(Pi1Word(g, (E, EI))).is_identity()


def test_bs23_relation_instances(gogs):
    g = gogs["bs23"]
    assert reduce(Pi1Word(g, (E, x(3), EI))).text() == "g(v,[0,2])"
    assert reduce(Pi1Word(g, (E, x(6), EI))).text() == "g(v,[0,4])"
    assert bs_oracle((E, x(6), EI)) == [("t", 4)]
    assert pi1_eq(Pi1Word(g, (E, x(3), EI)), Pi1Word(g, (x(2),)))
    w = Pi1Word(g, (x(1), E))
    assert pi1_eq(w, w)
    assert not pi1_eq(Pi1Word(g, (x(1),)), Pi1Word(g, (x(2),)))


def test_bs23_against_rewriting_oracle(gogs):
    """Identity detection agrees with the oracle on words the oracle fully reduces."""
    g = gogs["bs23"]
    rng = random.Random(7)
    agree = 0
    for _ in range(400):
        toks = []
        for _ in range(rng.randint(0, 10)):
            toks.append(rng.choice([E, EI, x(rng.choice([-3, -2, -1, 1, 2, 3, 6]))]))
        o = bs_oracle(toks)
        nf = reduce(Pi1Word(g, tuple(toks)))
        if not o:
            assert nf.is_identity()
            agree += 1
        elif all(a[0] == "t" for a in o):
            assert not nf.pairs and nf.last == (0, o[0][1])
            agree += 1
    assert agree > 50


def psl(tokens):
    """Z/2∗Z/3 ≅ PSL(2,Z): a ↦ S, b ↦ ST (faithful up to sign)."""
    S = np.array([[0, -1], [1, 0]])
    U = np.array([[0, -1], [1, 1]])  # order 3 in PSL
    m = np.eye(2, dtype=int)
    for t in tokens:
        if isinstance(t, VertexElt):
            if t.vertex == "a":
                m = m @ np.linalg.matrix_power(S, t.element)
            else:
                m = m @ np.linalg.matrix_power(U, t.element)
    return m


def is_pm_identity(m):
    return (m == np.eye(2)).all() or (m == -np.eye(2)).all()


def test_free_product_against_matrix_oracle(gogs):
    g = gogs["z2_free_z3"]
    rng = random.Random(11)
    for _ in range(500):
        w = random_word(g, rng, 12)
        nf = reduce(w)
        assert nf.is_identity() == is_pm_identity(psl(w.tokens))
        # the normal form is the same group element
        assert is_pm_identity(psl(w.tokens) @ np.round(np.linalg.inv(psl(nf.tokens()))).astype(int))


def test_membership(gogs):
    g = gogs["bs23"]
    assert membership_in_vertex_group(Pi1Word(g, (x(5),)), "v") == (0, 5)
    assert isinstance(membership_in_vertex_group(Pi1Word(g, (E,)), "v"), NotMember)
    f = gogs["z2_free_z3"]
    aba = Pi1Word(f, (VertexElt("a", 1), VertexElt("b", 1), VertexElt("a", 1)))
    assert len(reduce(aba)) == 2  # three syllables: a | b | a
    assert isinstance(membership_in_vertex_group(aba, "a"), NotMember)
    assert isinstance(membership_in_vertex_group(aba, "b"), NotMember)


@pytest.mark.parametrize("name", ["bs23", "theta", "mixed_torsion", "dinfty_loop", "z2_free_z3"])
def test_vertex_group_injects(gogs, name):
    g = gogs[name]
    rng = random.Random(name)
    for _ in range(200):
        v = rng.choice(g.vertices)
        y = random_element(g.vertex_groups[v], rng, 6)
        assert membership_in_vertex_group(Pi1Word(g, (VertexElt(v, y),)), v) == y


def test_phi(gogs):
    g = gogs["bs23"]
    phi = phi_free(g)
    assert apply_phi(phi, Pi1Word(g, (x(4),))) == ()
    assert apply_phi(phi, Pi1Word(g, (E,))) == (("l", 1),)
    assert apply_phi(phi, Pi1Word(g, (E, x(3), EI))) == ()
    assert phi.in_kernel(reduce(Pi1Word(g, (E, x(3), EI))))


def test_q_on_zxz2_loop(gogs):
    g = gogs["zxz2_loop"]
    r = quotient_by_max_finite_normal(g)
    q = r.q
    assert q(Pi1Word(g, (VertexElt("v", (1, 0)),))).is_identity()
    assert q(Pi1Word(g, (EdgeSym("l", 1),))).text() == "e(l)"
    img = q(Pi1Word(g, (VertexElt("v", (1, 1)),)))
    assert img.text() == "g(v,[0,1])"
    with pytest.raises(ProjectionMismatch):
        q_induced(g, gogs["theta"], r.vertex_projections)


def test_token_type_mismatch(gogs):
    g = gogs["bs23"]
    with pytest.raises(TokenTypeMismatch):
        Pi1Word(g, (VertexElt("w", (0, 1)),))
    with pytest.raises(TokenTypeMismatch):
        Pi1Word(g, (VertexElt("v", 3),))
    with pytest.raises(TokenTypeMismatch):
        Pi1Word(g, (EdgeSym("m", 1),))


@pytest.mark.parametrize("name", ["bs23", "z2_free_z3", "dinfty_loop", "theta", "mixed_torsion",
                                  "zxz2_loop", "dinfty_c_amalgam"])
def test_relations_reduce_to_identity(gogs, name):
    g = gogs[name]
    for label, w in relation_words(g):
        assert reduce(w).is_identity(), label


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(["bs23", "theta", "mixed_torsion", "dinfty_loop", "dinfty_c_amalgam"]),
       st.integers(0, 10**6))
def test_reduction_properties(gogs, name, seed):
    g = gogs[name]
    rng = random.Random(seed)
    u, v = random_word(g, rng, 8), random_word(g, rng, 8)
    nu = reduce(u)
    assert reduce(nu.word()) == nu  # idempotent
    assert reduce(u * v) == reduce(nu.word() * reduce(v).word())
    assert reduce(u * u.inverse()).is_identity()
    assert reduce(u, "leftmost") == nu == reduce(u, "rightmost")
    # φ is constant on the class of a word
    assert apply_phi(phi_free(g), u) == apply_phi(phi_free(g), nu)


def test_parse_word_round_trip(gogs):
    g = gogs["mixed_torsion"]
    rng = random.Random(2)
    for _ in range(50):
        w = random_word(g, rng, 8)
        assert parse_word(g, w.text()).tokens == w.tokens
    assert parse_word(g, "1").tokens == identity_word(g).tokens
    assert re.fullmatch(r"[\w(),\[\];-]*", w.text())


def test_projection_mismatch_same_graph(gogs):
    g = gogs["zxz2_loop"]
    r = quotient_by_max_finite_normal(g)
    # wrong source group at v: the projection starts at G_v of the quotient, not of g
    bad = {"v": r.vertex_projections["v"]}
    with pytest.raises(ProjectionMismatch):
        q_induced(r.gog, r.gog, bad)
