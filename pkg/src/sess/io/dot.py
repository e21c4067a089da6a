"""DOT export of a final matching, as a two-column bipartite graph."""

from __future__ import annotations

from ..model import SceneGraph, ScoreReport


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def matching_to_dot(g1: SceneGraph, g2: SceneGraph, report: ScoreReport) -> str:
    """Render the matched node pairs; edge labels carry (weight, similarity).

    Output is deterministic: nodes sorted by id, pairs by reference node
    id, fixed float formatting.
    """
    lines = [
        "graph matching {",
        "  rankdir=LR;",
        "  node [shape=box];",
        "  subgraph cluster_ref {",
        "    label=" + _quote(f"reference: {g1.image.source_id}") + ";",
    ]
    for node in sorted(g1.nodes, key=lambda n: n.id):
        lines.append(f"    r{node.id} [label={_quote(f'{node.label} ({node.id})')}];")
    lines.append("  }")
    lines.append("  subgraph cluster_cand {")
    lines.append("    label=" + _quote(f"candidate: {g2.image.source_id}") + ";")
    for node in sorted(g2.nodes, key=lambda n: n.id):
        lines.append(f"    c{node.id} [label={_quote(f'{node.label} ({node.id})')}];")
    lines.append("  }")
    for pair in sorted(report.matching, key=lambda p: (p.node1, p.node2)):
        label = _quote(f"({pair.weight:.4f}, {pair.similarity:.4f})")
        lines.append(f"  r{pair.node1} -- c{pair.node2} [label={label}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
