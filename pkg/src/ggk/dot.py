"""DOT export for underlying graphs, tree balls and quotient balls."""

from __future__ import annotations

from .gog import GraphOfGroups
from .tree import QuotientBall, TreeBall


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def gog_to_dot(gog: GraphOfGroups) -> str:
    lines = ["digraph gog {"]
    for v in gog.vertices:
        lines.append(f"  {_q(v)} [label={_q(v + ': ' + gog.vertex_groups[v].describe())}];")
    for i, (o, t) in gog.graph.ends.items():
        lines.append(f"  {_q(o)} -> {_q(t)} [label={_q(i + ': ' + gog.edge_group(i).describe())}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ball_to_dot(tb: TreeBall) -> str:
    gog = tb.gog
    ids = {x: f"x{k}" for k, x in enumerate(tb.vertices)}
    lines = ["graph ball {"]
    for x in tb.vertices:
        attrs = [f"label={_q(x.text(gog))}"]
        if tb.truncated.get(x):
            attrs.append("style=dashed")
            attrs.append('xlabel="truncated"')
        if x == tb.base:
            attrs.append("shape=box")
        lines.append(f"  {ids[x]} [{', '.join(attrs)}];")
    for x, y, e, _ in tb.edges:
        lines.append(f"  {ids[x]} -- {ids[y]} [label={_q(e[0])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def quotient_to_dot(qb: QuotientBall) -> str:
    nodes = list(qb.graph.nodes)
    ids = {n: f"y{k}" for k, n in enumerate(nodes)}
    lines = ["graph quotient {"]
    for n in nodes:
        shape = ", shape=box" if n == qb.base else ""
        lines.append(f"  {ids[n]} [label={_q(repr(n))}{shape}];")
    for a, b, data in qb.graph.edges(data=True):
        lines.append(f"  {ids[a]} -- {ids[b]} [label={_q(data['edge'])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
