"""Expert-set reconstruction from estimated neighborhoods.

A node s is a knot when it is the only common member of all of its
neighbors' neighborhoods. Knots are ranked by neighborhood size (descending,
ties broken by ascending node id) and node s is kept as an expert when its
neighborhood size is at least its 1-based rank minus one. Nodes with empty
neighborhoods are never knots.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ExpertReport, NeighborhoodMap

__all__ = ["KnotRecord", "KnotEntry", "KnotTable", "knot_set", "reconstruct_expert_set"]


@dataclass(frozen=True)
class KnotRecord:
    """Intersection result for one node: A_s and whether it makes s a knot."""

    node: int
    a_set: frozenset[int] | None
    is_knot: bool
    empty_neighborhood: bool = False


@dataclass(frozen=True)
class KnotEntry:
    node: int
    size: int
    rank: int
    selected: bool


@dataclass(frozen=True)
class KnotTable:
    """Ranked knots plus the selected expert subset."""

    knots: tuple[KnotEntry, ...]
    selected: tuple[int, ...]
    flags: tuple[str, ...] = ()


def knot_set(nbhd: NeighborhoodMap) -> list[KnotRecord]:
    """Compute A_s (the intersection of all neighbors' neighborhoods) per node.

    Returns one record per node 1..p; nodes with empty neighborhoods carry
    ``a_set=None`` and are flagged rather than treated as vacuous-intersection
    knots.
    """
    records: list[KnotRecord] = []
    for s in range(1, nbhd.p + 1):
        ns = nbhd.neighborhood(s)
        if not ns:
            records.append(KnotRecord(node=s, a_set=None, is_knot=False, empty_neighborhood=True))
            continue
        a: frozenset[int] | None = None
        for r in sorted(ns):
            nr = nbhd.neighborhood(r)
            a = nr if a is None else a & nr
            if not a:
                break
        a = a or frozenset()
        records.append(KnotRecord(node=s, a_set=a, is_knot=a == frozenset((s,))))
    return records


def reconstruct_expert_set(nbhd: NeighborhoodMap) -> tuple[ExpertReport, KnotTable]:
    """Select the expert set from the knots via the ordered-size rule.

    Knots are sorted by neighborhood size descending with ties broken by
    ascending node id (deterministic); knot s with 1-based rank i is kept
    when ``|N_s| >= i - 1``. An empty knot set yields an empty, flagged
    expert set.
    """
    records = knot_set(nbhd)
    knots = [r.node for r in records if r.is_knot]
    flags: list[str] = []
    if any(r.empty_neighborhood for r in records):
        flags.append("nodes_with_empty_neighborhood")
    if not knots:
        flags.append("empty_knot_set")
        table = KnotTable(knots=(), selected=(), flags=tuple(flags))
        return ExpertReport(expert_set_hat=(), flags=tuple(flags)), table

    ordered = sorted(knots, key=lambda s: (-nbhd.size(s), s))
    entries = []
    selected = []
    for rank, s in enumerate(ordered, start=1):
        keep = nbhd.size(s) >= rank - 1
        entries.append(KnotEntry(node=s, size=nbhd.size(s), rank=rank, selected=keep))
        if keep:
            selected.append(s)
    table = KnotTable(knots=tuple(entries), selected=tuple(sorted(selected)), flags=tuple(flags))
    report = ExpertReport(expert_set_hat=tuple(sorted(selected)), flags=tuple(flags))
    return report, table
