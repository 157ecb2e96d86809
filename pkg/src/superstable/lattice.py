"""Enumeration of all super-stable matchings through closed rotation subsets,
lattice join/meet, and maximum-weight optimization."""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import lcm
from typing import Iterator

from .instance import Instance
from .rotations import RotationPoset, maximal_sequence, precedence_digraph, rotations_of
from .stability import SUPER, blocking_edges, partner_maps, validate_matching


def matching_of(first, rotations, subset) -> frozenset:
    """Eliminate the chosen rotations starting from the top matching.

    Discovery order is a linear extension of precedence, so eliminating in
    index order works for every closed subset; the result does not depend on
    the elimination order.  A rotation whose removed pairs are not all
    present signals a non-closed subset or a corrupted poset.
    """
    current = set(first)
    chosen = set(subset)
    for rot in rotations:
        if rot.index not in chosen:
            continue
        if not rot.removed <= current:
            raise ValueError(
                f"rotation {rot.index} is not exposed; the subset is not closed"
            )
        current -= rot.removed
        current |= rot.added
    return frozenset(current)


def closed_subsets(poset: RotationPoset) -> Iterator[frozenset]:
    """All down-closed rotation sets, depth-first with ascending indices."""
    preds = poset.predecessors()
    n = len(poset.rotations)
    chosen: set[int] = set()

    def extend(start: int) -> Iterator[frozenset]:
        yield frozenset(chosen)
        for i in range(start, n):
            if preds[i] <= chosen:
                chosen.add(i)
                yield from extend(i + 1)
                chosen.discard(i)

    return extend(0)


def build_poset(inst: Instance):
    """(man-optimal matching, rotation poset), or None when infeasible."""
    sequence = maximal_sequence(inst)
    if not sequence:
        return None
    rotations = rotations_of(sequence)
    return sequence[0], precedence_digraph(inst, sequence[0], rotations)


def enumerate_all(inst: Instance, limit: int | None = None) -> Iterator[frozenset]:
    """Stream every super-stable matching, one per closed subset.

    Deterministic order starting at the man-optimal matching; empty stream
    when the instance is infeasible.
    """
    built = build_poset(inst)
    if built is None:
        return
    first, poset = built
    count = 0
    for subset in closed_subsets(poset):
        if limit is not None and count >= limit:
            return
        yield matching_of(first, poset.rotations, subset)
        count += 1


def join_meet(inst: Instance, a, b) -> tuple[frozenset, frozenset]:
    """(join, meet): each man takes the better resp. worse of his two partners.

    Defined on super-stable inputs only; ties between distinct partners
    cannot occur there, and both outputs are again super-stable.
    """
    a = validate_matching(inst, a)
    b = validate_matching(inst, b)
    for matching in (a, b):
        if blocking_edges(inst, matching, SUPER):
            raise ValueError("join/meet are defined on super-stable matchings only")
    by_man_a, _ = partner_maps(a)
    by_man_b, _ = partner_maps(b)
    if set(by_man_a) != set(by_man_b):
        raise RuntimeError("super-stable matchings must match the same men")
    join, meet = set(), set()
    for m, wa in by_man_a.items():
        wb = by_man_b[m]
        ra, rb = inst.man_rank(m, wa), inst.man_rank(m, wb)
        if ra == rb and wa != wb:
            raise RuntimeError("tied distinct partners contradict super-stability")
        better, worse = (wa, wb) if ra <= rb else (wb, wa)
        join.add((m, better))
        meet.add((m, worse))
    return validate_matching(inst, join), validate_matching(inst, meet)


def max_weight(inst: Instance, weights):
    """A maximum-weight super-stable matching with its exact weight, or None.

    The weight of a matching is the sum of its edge weights (absent edges
    weigh 0).  Each rotation is valued by added-minus-removed weight and the
    best closed subset is found as a minimum-cut closure over the precedence
    digraph; among optima the inclusion-minimal subset wins, so the answer
    is deterministic.
    """
    weights = _check_weights(inst, weights)
    built = build_poset(inst)
    if built is None:
        return None
    first, poset = built
    values = [
        sum((weights.get(e, Fraction(0)) for e in rot.added), Fraction(0))
        - sum((weights.get(e, Fraction(0)) for e in rot.removed), Fraction(0))
        for rot in poset.rotations
    ]
    chosen = _best_closure(values, poset.arcs)
    best = matching_of(first, poset.rotations, chosen)
    total = sum((weights.get(e, Fraction(0)) for e in best), Fraction(0))
    return best, total


def _check_weights(inst: Instance, weights) -> dict:
    checked = {}
    for edge, value in weights.items():
        m, w = edge
        if not inst.is_edge(m, w):
            raise ValueError(f"weight given for non-edge ({m!r}, {w!r})")
        checked[(m, w)] = Fraction(value)
    return checked


def _best_closure(values: list[Fraction], arcs) -> set[int]:
    """Inclusion-minimal down-closed subset of maximum total value.

    Project-selection reduction: positive rotations hang off the source,
    negative ones feed the sink, precedence arcs get infinite capacity; the
    source side of the canonical minimum cut is the answer.  Weights are
    scaled to integers so the cut is exact.
    """
    n = len(values)
    if n == 0:
        return set()
    denom = lcm(*(v.denominator for v in values))
    scaled = [int(v * denom) for v in values]
    infinite = sum(abs(v) for v in scaled) + 1
    source, sink = n, n + 1
    flow = _Dinic(n + 2)
    for i, v in enumerate(scaled):
        if v > 0:
            flow.add(source, i, v)
        elif v < 0:
            flow.add(i, sink, -v)
    for i, j in sorted(arcs):
        flow.add(j, i, infinite)  # picking j forces its predecessor i
    flow.max_flow(source, sink)
    return flow.reachable(source) - {source}


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[list[int]]] = [[] for _ in range(n)]  # [to, cap, rev]

    def add(self, u: int, v: int, cap: int) -> None:
        self.adj[u].append([v, cap, len(self.adj[v])])
        self.adj[v].append([u, 0, len(self.adj[u]) - 1])

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while True:
            level = self._levels(s)
            if level[t] < 0:
                return total
            cursor = [0] * self.n
            while True:
                pushed = self._push(s, t, None, level, cursor)
                if not pushed:
                    break
                total += pushed

    def _levels(self, s: int) -> list[int]:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.adj[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level

    def _push(self, u, t, limit, level, cursor):
        if u == t:
            return limit
        while cursor[u] < len(self.adj[u]):
            v, cap, rev = self.adj[u][cursor[u]]
            if cap > 0 and level[v] == level[u] + 1:
                pushed = self._push(v, t, cap if limit is None else min(limit, cap), level, cursor)
                if pushed:
                    self.adj[u][cursor[u]][1] -= pushed
                    self.adj[v][rev][1] += pushed
                    return pushed
            cursor[u] += 1
        return 0

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.adj[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen
