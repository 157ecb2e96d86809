"""Optimal super-stable matchings through a prescribed edge, and the
containment order on the resulting irreducible family."""

from __future__ import annotations

from dataclasses import dataclass

from .instance import Instance, MEN
from .stability import (
    NoSuperStableMatching,
    blocking_edges,
    optimal_super_stable,
    partner_maps,
    validate_matching,
    SUPER,
)


def reduce_for_edge(inst: Instance, edge) -> Instance:
    """The instance left after committing to ``edge``.

    Both endpoints disappear with their edges.  Additionally, any man the
    woman weakly prefers to her fixed partner loses every pair he does not
    strictly prefer to her, and symmetrically for women the man weakly
    prefers.  Surviving lists keep their tier order, with emptied tiers
    dropped.
    """
    m0, w0 = edge
    if not inst.is_edge(m0, w0):
        raise ValueError(f"({m0!r}, {w0!r}) is not an edge")
    removed: set[tuple[str, str]] = set()
    pivot = inst.woman_rank(w0, m0)
    for m1 in inst.neighbors(w0):
        if inst.woman_rank(w0, m1) <= pivot:
            cut = inst.man_rank(m1, w0)
            for w1 in inst.neighbors(m1):
                if inst.man_rank(m1, w1) >= cut:
                    removed.add((m1, w1))
    pivot = inst.man_rank(m0, w0)
    for w1 in inst.neighbors(m0):
        if inst.man_rank(m0, w1) <= pivot:
            cut = inst.woman_rank(w1, m0)
            for m1 in inst.neighbors(w1):
                if inst.woman_rank(w1, m1) >= cut:
                    removed.add((m1, w1))

    def gone(man: str, woman: str) -> bool:
        return man == m0 or woman == w0 or (man, woman) in removed

    men = [m for m in inst.men if m != m0]
    women = [w for w in inst.women if w != w0]
    prefs: dict[str, list[list[str]]] = {}
    for m in men:
        prefs[m] = [
            kept
            for tier in inst.prefs[m]
            if (kept := [w for w in tier if not gone(m, w)])
        ]
    for w in women:
        prefs[w] = [
            kept
            for tier in inst.prefs[w]
            if (kept := [m for m in tier if not gone(m, w)])
        ]
    return Instance(men, women, prefs)


def optimal_with_edge(inst: Instance, edge):
    """Man-optimal super-stable matching containing ``edge``, or None.

    Solves the reduced instance and re-attaches the edge; if the combined
    matching is blocked in the original instance, no super-stable matching
    contains the edge at all.
    """
    m0, w0 = edge
    if not inst.is_edge(m0, w0):
        raise ValueError(f"({m0!r}, {w0!r}) is not an edge")
    inner = optimal_super_stable(reduce_for_edge(inst, edge), MEN)
    if inner is None:
        return None
    candidate = inner | {(m0, w0)}
    if blocking_edges(inst, candidate, SUPER):
        return None
    return candidate


def p_set(inst: Instance, matching) -> frozenset:
    """All pairs (m, w) with w weakly preferred by m to his partner.

    Unmatched men contribute nothing.  Requires a super-stable matching.
    """
    matching = validate_matching(inst, matching)
    if blocking_edges(inst, matching, SUPER):
        raise ValueError("p_set is defined for super-stable matchings only")
    by_man, _ = partner_maps(matching)
    pairs = []
    for m, held in by_man.items():
        cutoff = inst.man_rank(m, held)
        for w in inst.neighbors(m):
            if inst.man_rank(m, w) <= cutoff:
                pairs.append((m, w))
    return frozenset(pairs)


@dataclass(frozen=True)
class IrreducibleElement:
    matching: frozenset
    witnesses: tuple
    pairs: frozenset  # the P-set


@dataclass(frozen=True)
class IrreduciblePoset:
    """Distinct edge-minimal matchings ordered by strict P-set containment."""

    elements: tuple[IrreducibleElement, ...]
    order: frozenset  # (i, j) with elements[i].pairs a proper subset of elements[j].pairs

    def covers(self) -> list[tuple[int, int]]:
        """The Hasse diagram of the containment order."""
        below: dict[int, set[int]] = {}
        for i, j in self.order:
            below.setdefault(j, set()).add(i)
        out = []
        for i, j in sorted(self.order):
            if not any((i, k) in self.order for k in below.get(j, ())):
                out.append((i, j))
        return out


def irreducible_poset(inst: Instance) -> IrreduciblePoset:
    """One element per distinct optimal_with_edge matching, all witnesses kept.

    Raises NoSuperStableMatching when the instance is infeasible.
    """
    if optimal_super_stable(inst, MEN) is None:
        raise NoSuperStableMatching("instance admits no super-stable matching")
    index_of: dict[frozenset, int] = {}
    matchings: list[frozenset] = []
    witnesses: list[list[tuple[str, str]]] = []
    for edge in inst.edges:
        found = optimal_with_edge(inst, edge)
        if found is None:
            continue
        at = index_of.get(found)
        if at is None:
            at = len(matchings)
            index_of[found] = at
            matchings.append(found)
            witnesses.append([])
        witnesses[at].append(edge)
    elements = tuple(
        IrreducibleElement(matching, tuple(wit), p_set(inst, matching))
        for matching, wit in zip(matchings, witnesses)
    )
    order = frozenset(
        (i, j)
        for i, a in enumerate(elements)
        for j, b in enumerate(elements)
        if i != j and a.pairs < b.pairs
    )
    return IrreduciblePoset(elements, order)
