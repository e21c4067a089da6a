"""Geometric relation proposals between segments.

Six spatial predicates are scored from bounding-box geometry, each with
a confidence in [0, 1]: "in" (subject mostly inside a larger object),
"enclosing" (subject surrounds a smaller object), "on" (subject resting
directly above, touching or nearly touching), "over" (subject above with
clearance), "beside" (horizontal neighbors), and "attached to" (partial
overlap without containment either way). For every ordered pair the
single best-scoring predicate is proposed; the exporter keeps proposals
whose confidence reaches the configured threshold. All six labels belong
to the PSG relation vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .segmentation import Segment

# Lower index wins a confidence tie.
_PRIORITY = ("in", "enclosing", "on", "beside", "over", "attached to")


@dataclass(frozen=True, slots=True)
class RelationProposal:
    """One scored directed relation between segment indices."""

    subject: int
    object: int
    relation: str
    confidence: float


def _pair_candidates(
    a: tuple[int, int, int, int], b: tuple[int, int, int, int], width: int, height: int
) -> list[tuple[str, float]]:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    overlap_x = max(0, min(ax + aw, bx + bw) - max(ax, bx))
    overlap_y = max(0, min(ay + ah, by + bh) - max(ay, by))
    inter = overlap_x * overlap_y
    area_a = aw * ah
    area_b = bw * bh

    candidates: list[tuple[str, float]] = []

    inside = inter / area_a
    surrounds = inter / area_b
    if inside >= 0.7 and area_a < area_b:
        candidates.append(("in", inside))
    elif surrounds >= 0.7 and area_b < area_a:
        candidates.append(("enclosing", surrounds))
    elif inter > 0:
        candidates.append(("attached to", inter / min(area_a, area_b)))

    touch = max(2.0, 0.03 * height)
    gap_below = by - (ay + ah)
    if overlap_x > 0 and -2.0 <= gap_below <= touch:
        candidates.append(("on", overlap_x / min(aw, bw)))
    if overlap_x > 0 and gap_below > touch:
        clearance = max(0.0, 1.0 - gap_below / (0.5 * height))
        candidates.append(("over", (overlap_x / min(aw, bw)) * clearance))

    reach = max(2.0, 0.08 * width)
    gap_side = max(ax, bx) - min(ax + aw, bx + bw)
    if overlap_y > 0 and 0.0 <= gap_side <= reach:
        closeness = 1.0 - gap_side / (reach + 1.0)
        candidates.append(("beside", (overlap_y / min(ah, bh)) * closeness))

    return candidates


def propose_relations(
    segments: Sequence[Segment], width: int, height: int
) -> list[RelationProposal]:
    """Best-scoring predicate for every ordered segment pair, if any."""
    proposals = []
    for i, a in enumerate(segments):
        for j, b in enumerate(segments):
            if i == j:
                continue
            candidates = _pair_candidates(a.bbox, b.bbox, width, height)
            if not candidates:
                continue
            relation, confidence = min(
                candidates, key=lambda c: (-c[1], _PRIORITY.index(c[0]))
            )
            if confidence > 0.0:
                proposals.append(
                    RelationProposal(
                        subject=i, object=j, relation=relation, confidence=confidence
                    )
                )
    return proposals


def filter_proposals(
    proposals: Sequence[RelationProposal], threshold: float
) -> list[RelationProposal]:
    """Keep proposals whose confidence reaches the threshold."""
    return [p for p in proposals if p.confidence >= threshold]
