"""Exit criteria.  Each check prints one line: criterion number, PASS/FAIL, detail.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import json
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, FIXTURE_NAMES, fixture_path  # noqa: E402
from ggk.certificate import certify_fjcw, check_certificate, mutate  # noqa: E402
from ggk.cli import main as cli_main  # noqa: E402
from ggk.constructions import (  # noqa: E402
    FiniteEqualTo,
    check_induced_monos,
    check_wreath,
    kernel_vertex_stabilizer_class,
    lemma_tree_check,
    proper_cocompact_check,
    quotient_by_max_finite_normal,
    quotient_by_max_infinite_cyclic,
    verify_edge_kernel_is_max_finite_normal,
    wreath_embed,
)
from ggk.corpus import gog_corpus, vc_corpus  # noqa: E402
from ggk.gog import infinite_edge_reduction  # noqa: E402
from ggk.pi1 import random_word, reduce, relation_words  # noqa: E402
from ggk.serialize import dumps, load, parse_document  # noqa: E402
from ggk.tree import (  # noqa: E402
    ball,
    expected_degree,
    is_tree,
    quotient_ball_by_kernel,
    same_labelled_graph,
    stabilizer_witness,
    universal_cover_ball,
)
from ggk.pi1 import phi_free  # noqa: E402
from ggk.vcgroup import brute_force_max_finite_normal, is_dinfty_model, is_z_model, max_finite_normal  # noqa: E402

pytestmark = pytest.mark.acceptance


def report(n: int, title: str, ok: bool, detail: str, t0: float, limit: float | None = None):
    dt = time.perf_counter() - t0
    if limit is not None and dt >= limit:
        ok = False
        detail += f"; over the {limit:.0f} s budget"
    line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail} ({dt:.1f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def fixtures():
    return {name: load(fixture_path(name)) for name in FIXTURE_NAMES}


def corpus_gogs(fixtures):
    return [(n, g) for n, g in gog_corpus()] + [(f"fixture:{n}", g) for n, g in fixtures.items()]


# 1 ------------------------------------------------------------------------------


def _finite_order(G, x, bound):
    y, k = x, 1
    while y != G.identity:
        if k > bound:
            return False
        y, k = G.mul(y, x), k + 1
    return True


def classify_by_oracle(G):
    """finite / orientable / nonorientable using only multiplication and powering:
    no infinite-order element in the radius-2 ball means finite; otherwise a
    generator inverting it modulo torsion means nonorientable."""
    from ggk.vcgroup import vc_ball
    bound = 4 * G.finite_part.order
    gens = list(G.generator_elements)
    inf = [x for x in vc_ball(G, 2) if not _finite_order(G, x, bound)]
    if not inf:
        return "finite"
    x = inf[0]
    for g in gens:
        if _finite_order(G, G.mul(G.conj(g, x), x), bound):
            return "nonorientable"
    return "orientable"


def test_criterion_1_trichotomy():
    t0 = time.perf_counter()
    corpus = vc_corpus()
    kinds = {G.kind for _, G in corpus}
    bad = []
    for name, G in corpus:
        assert G.finite_part.order <= 16
        o = brute_force_max_finite_normal(G)
        m = max_finite_normal(G)
        if not o.unique_top or o.maximum != m.subgroup.elements:
            bad.append(f"{name}: max finite normal")
        if not (m.cls == G.kind == classify_by_oracle(G)):
            bad.append(f"{name}: class")
    ok = len(corpus) >= 50 and kinds == {"finite", "orientable", "nonorientable"} and not bad
    report(1, "vc trichotomy", ok, f"{len(corpus)} groups, {len(bad)} mismatches {bad[:3]}", t0, 60)


# 2 ------------------------------------------------------------------------------


def test_criterion_2_normal_forms(fixtures):
    t0 = time.perf_counter()
    need = {"bs23", "z2_free_z3", "dinfty_loop", "theta", "mixed_torsion"}
    assert need <= set(fixtures)
    bad, words, rels = [], 0, 0
    for name, g in fixtures.items():
        for label, w in relation_words(g):
            rels += 1
            if not reduce(w).is_identity():
                bad.append(f"{name}: {label}")
        rng = random.Random(f"c2:{name}")
        for _ in range(1000):
            w = random_word(g, rng, 12)
            nf = reduce(w, "leftmost")
            words += 1
            if nf != reduce(w, "rightmost") or reduce(nf.word(), "leftmost") != nf:
                bad.append(f"{name}: {w.text()}")
                break
    report(2, "normal forms", not bad,
           f"{len(fixtures)} fixtures, {rels} relation instances, {words} random words, failures {bad[:3]}",
           t0, 120)


# 3 ------------------------------------------------------------------------------


def test_criterion_3_bass_serre_balls(fixtures):
    t0 = time.perf_counter()
    bad = []
    d = fixtures["dinfty_amalgam"]
    for r in range(6):
        g = ball(d, r=r).graph()
        if g.number_of_nodes() != 2 * r + 1 or not is_tree(g) or max(
                (k for _, k in g.degree()), default=0) > 2:
            bad.append(f"D∞ r={r}")
    f = fixtures["z2_free_z3"]
    checked = 0
    for v0 in f.vertices:
        tb = ball(f, v0, 4)
        for x in tb.vertices:
            if tb.depth[x] < tb.radius and not tb.truncated[x]:
                checked += 1
                if tb.degree(x) != expected_degree(f, x.label):
                    bad.append(f"degree at {x.text(f)}")
    stabs = 0
    for name in ("dinfty_amalgam", "z2_free_z3"):
        tb = ball(fixtures[name], r=3)
        for x in tb.vertices:
            try:
                stabilizer_witness(tb, x, samples=20, seed=stabs)
                stabs += 1
            except AssertionError as exc:
                bad.append(str(exc))
    report(3, "Bass-Serre balls", not bad,
           f"paths r=0..5, {checked} degrees, {stabs} stabilizer witnesses, failures {bad[:3]}", t0)


# 4 ------------------------------------------------------------------------------


def test_criterion_4_tree_lemma(fixtures):
    t0 = time.perf_counter()
    bad = []
    for name, g in fixtures.items():
        qb = quotient_ball_by_kernel(ball(g, r=4), phi_free(g)).truncated(4)
        if not is_tree(qb) or not same_labelled_graph(qb, universal_cover_ball(g, r=4)):
            bad.append(name)
    report(4, "quotient ball is the universal cover", not bad,
           f"{len(fixtures)} fixtures at r=4, failures {bad}", t0, 60)


# 5 ------------------------------------------------------------------------------


def infinite_leaves(fixtures):
    out = []
    for name, g in corpus_gogs(fixtures):
        for k, L in enumerate(infinite_edge_reduction(g)[0]):
            if L.graph.edge_ids or any(G.is_infinite for G in L.vertex_groups.values()):
                out.append((f"{name}#{k}", L))
    return out


def test_criterion_5_finite_normal_construction(fixtures):
    t0 = time.perf_counter()
    bad, edges, verts = [], 0, 0
    leaves = infinite_leaves(fixtures)
    for name, L in leaves:
        r = quotient_by_max_finite_normal(L)
        for v, G in r.gog.vertex_groups.items():
            verts += 1
            if not (is_z_model(G) or is_dinfty_model(G)):
                bad.append(f"{name}: {v} is {G.describe()}")
            c = kernel_vertex_stabilizer_class(r.q, v)
            if not (isinstance(c, FiniteEqualTo) and c.matches_max_finite):
                bad.append(f"{name}: stabilizer class at {v}")
        for e in L.graph.oriented_edges:
            edges += 1
            try:
                verify_edge_kernel_is_max_finite_normal(L, e)
            except Exception as exc:  # ClaimViolated
                bad.append(f"{name}: {exc}")
        rep = check_induced_monos(r, radius=8)
        if not rep.ok:
            bad.append(f"{name}: {rep.codes()}")
    report(5, "max finite normal quotient", not bad,
           f"{len(leaves)} graphs, {verts} vertices, {edges} oriented edges, failures {bad[:3]}", t0)


# 6 ------------------------------------------------------------------------------


def test_criterion_6_cyclic_construction(fixtures):
    t0 = time.perf_counter()
    inputs = [(n, quotient_by_max_finite_normal(L).gog) for n, L in infinite_leaves(fixtures)]
    inputs += [(n, fixtures[n]) for n in ("bs23", "dinfty_loop", "single_z")]
    bad = []
    for name, g in inputs:
        r = quotient_by_max_infinite_cyclic(g)
        for v, G in r.gog.vertex_groups.items():
            if G.is_infinite or G.finite_part.order > 2:
                bad.append(f"{name}: {v}")
        rep = proper_cocompact_check(r.gog, radius=3)
        if not rep.ok:
            bad.append(f"{name}: {rep.codes()}")
        if not check_induced_monos(r).ok:
            bad.append(f"{name}: induced monos")
    report(6, "max infinite cyclic quotient", not bad,
           f"{len(inputs)} Z/D∞-vertex graphs, proper and cocompact at r=3, failures {bad[:3]}", t0)


# 7 ------------------------------------------------------------------------------


def test_criterion_7_wreath():
    t0 = time.perf_counter()
    groups = [(n, G) for n, G in vc_corpus() if G.is_infinite][::3]
    bad = []
    for k, (name, G) in enumerate(groups):
        rep = check_wreath(wreath_embed(G), pairs=200, radius=6, seed=k)
        if not rep.ok:
            bad.append(f"{name}: {rep.codes()}")
    report(7, "wreath embedding", len(groups) >= 10 and not bad,
           f"{len(groups)} groups x 200 pairs, injective on radius-6 balls, failures {bad[:3]}", t0)


# 8 ------------------------------------------------------------------------------


def test_criterion_8_certificates(fixtures):
    t0 = time.perf_counter()
    bad, certs, rejected = [], 0, 0
    rng = random.Random(8)
    for name, g in corpus_gogs(fixtures):
        cert = certify_fjcw(g)
        certs += 1
        if not check_certificate(cert).ok:
            bad.append(f"{name}: rejected")
            continue
        for _ in range(20):
            m, desc = mutate(cert, rng)
            if check_certificate(m).ok:
                bad.append(f"{name}: accepted {desc}")
            else:
                rejected += 1
    report(8, "certificates", not bad,
           f"{certs} certificates accepted, {rejected}/{20 * certs} mutations rejected, failures {bad[:3]}",
           t0, 30)


# 9 ------------------------------------------------------------------------------


def test_criterion_9_cli(tmp_path, capsys):
    t0 = time.perf_counter()
    bad = []
    for name in FIXTURE_NAMES:
        g = load(fixture_path(name))
        text = dumps(g)
        if dumps(parse_document(json.loads(text))) != text:
            bad.append(f"round trip {name}")
    code = cli_main(["reduce", fixture_path("bs23"), "--word", "e(l);g(v,[0,3]);E(l)"])
    out = capsys.readouterr().out
    if code != 0 or out != "g(v,[0,2])\n":
        bad.append(f"reduce printed {out!r} with exit {code}")
    if cli_main(["validate", fixture_path("bs23")]) != 0:
        bad.append("validate exit")
    broken = tmp_path / "broken.json"
    broken.write_text('{"vertices": []}')
    if cli_main(["validate", str(broken)]) != 1:
        bad.append("input error exit")
    cert = tmp_path / "c.json"
    cli_main(["certify", fixture_path("bs23"), "--out", str(cert)])
    data = json.loads(cert.read_text())
    data["nodes"][-1]["side_conditions"] = []
    cert.write_text(json.dumps(data))
    if cli_main(["check-cert", str(cert)]) != 2:
        bad.append("check failure exit")
    capsys.readouterr()
    report(9, "CLI", not bad, f"{len(FIXTURE_NAMES)} round trips, reduce example, exits 0/1/2, failures {bad}", t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
