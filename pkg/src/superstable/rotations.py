"""Maximal chains of super-stable matchings, their rotations, and the
precedence digraph whose closed subsets index every super-stable matching."""

from __future__ import annotations

from dataclasses import dataclass

from .instance import Instance, MEN, WOMEN
from .stability import optimal_super_stable, validate_matching


@dataclass(frozen=True)
class Rotation:
    """Difference between two consecutive matchings of a maximal chain.

    ``removed`` and ``added`` cover the same agents; every man moves strictly
    down his list and every woman strictly up hers.  A single rotation may
    consist of several disjoint cycles.
    """

    index: int
    removed: frozenset
    added: frozenset


@dataclass(frozen=True)
class RotationPoset:
    """Rotations plus the precedence arcs; (i, j) means i must happen first."""

    rotations: tuple[Rotation, ...]
    arcs: frozenset

    def predecessors(self) -> list[frozenset]:
        """Direct predecessors per rotation index."""
        direct: list[set[int]] = [set() for _ in self.rotations]
        for i, j in self.arcs:
            direct[j].add(i)
        return [frozenset(s) for s in direct]

    def is_closed(self, subset) -> bool:
        chosen = set(subset)
        preds = self.predecessors()
        return all(preds[i] <= chosen for i in chosen)


def maximal_sequence(inst: Instance) -> list[frozenset]:
    """A maximal chain of super-stable matchings, best-for-men first.

    Empty when the instance is infeasible.  Consecutive entries are strict
    successors: no super-stable matching fits strictly between them.  The
    first entry is the man-optimal matching and the last the woman-optimal
    one.
    """
    first = optimal_super_stable(inst, MEN)
    if first is None:
        return []
    last = optimal_super_stable(inst, WOMEN)
    assert last is not None
    if first == last:
        return [first]
    return [first] + _Chain(inst, first, last).run()


def rotations_of(sequence) -> list[Rotation]:
    """Rotations along a maximal chain: consecutive set differences."""
    rotations = []
    for i in range(1, len(sequence)):
        prev = frozenset(sequence[i - 1])
        cur = frozenset(sequence[i])
        removed = prev - cur
        added = cur - prev
        if not removed and not added:
            raise ValueError(f"consecutive matchings {i - 1} and {i} are equal")
        if {a for p in removed for a in p} != {a for p in added for a in p}:
            raise ValueError("rotation does not preserve the matched agents")
        rotations.append(Rotation(len(rotations), removed, added))
    return rotations


def precedence_digraph(inst: Instance, first, rotations) -> RotationPoset:
    """Precedence arcs between rotations via preference-list labeling.

    Each removed pair marks the position where its rotation takes the woman
    away from the man ("handoff").  Each man a woman climbs strictly past
    marks her position on his list with a "crossing" of that rotation.  A
    top-down scan of every man's list then emits: handoff after handoff in
    list order, and for each crossing an arc from the crossing rotation to
    the rotation that moves the man below that woman.  The transitive
    closure of the arcs is the full precedence order.
    """
    first = validate_matching(inst, first)
    current = set(first)
    for rot in rotations:
        if not rot.removed <= current:
            raise ValueError(f"rotation {rot.index} is not exposed at its turn")
        current -= rot.removed
        current |= rot.added

    midx, widx = inst._midx, inst._widx
    man_rank, woman_rank = inst._man_rank, inst._woman_rank
    handoff: dict[tuple[int, int], tuple[int, int]] = {}  # (rotation, rank he lands on)
    crossing: dict[tuple[int, int], list[int]] = {}
    try:
        for rot in rotations:
            old_w = {midx[m]: widx[w] for m, w in rot.removed}
            new_w = {midx[m]: widx[w] for m, w in rot.added}
            for mi, wi in old_w.items():
                landing = man_rank[mi][new_w[mi]]
                if landing <= man_rank[mi][wi]:
                    raise ValueError(f"rotation {rot.index}: a man does not move strictly down")
                if (mi, wi) in handoff:
                    raise ValueError(f"two rotations remove the same pair")
                handoff[(mi, wi)] = (rot.index, landing)
            old_m = {widx[w]: midx[m] for m, w in rot.removed}
            new_m = {widx[w]: midx[m] for m, w in rot.added}
            for wi, mi_old in old_m.items():
                lo = woman_rank[wi][new_m[wi]]
                hi = woman_rank[wi][mi_old]
                if lo >= hi:
                    raise ValueError(f"rotation {rot.index}: a woman does not move strictly up")
                # the climb makes her safe against every man she passes,
                # including those tied with the partner she leaves behind
                for x, r in woman_rank[wi].items():
                    if lo < r <= hi and x != mi_old:
                        crossing.setdefault((x, wi), []).append(rot.index)
    except KeyError:
        raise ValueError("rotation references a pair missing from the lists") from None

    arcs: set[tuple[int, int]] = set()
    for mi in range(len(inst.men)):
        # the held rotation is the last handoff from a STRICTLY better tier;
        # it endangers the pairs of the current tier exactly when it lands
        # the man at this tier or below (a tied landing already hurts)
        hold: int | None = None
        hold_landing = 0
        for rank0, tier in enumerate(inst._man_tiers[mi]):
            tier_handoff = None
            for wi in tier:
                got = handoff.get((mi, wi))
                if got is None:
                    continue
                rho, landing = got
                if hold is not None:
                    arcs.add((hold, rho))
                tier_handoff = (rho, landing)  # at most one per tier
            if hold is not None and hold_landing >= rank0 + 1:
                for wi in tier:
                    for rho in crossing.get((mi, wi), ()):
                        if hold != rho:
                            arcs.add((rho, hold))
            if tier_handoff is not None:
                hold, hold_landing = tier_handoff
    for i, j in arcs:
        if i >= j:
            raise RuntimeError("precedence arc contradicts discovery order")
    return RotationPoset(tuple(rotations), frozenset(arcs))


# -- successor search --------------------------------------------------------


class _Chain(object):
    """Walks from the man-optimal matching down to the woman-optimal one.

    The search keeps three disjoint edge pools per the following scheme: a
    directed graph of traversed edges (matched pairs point woman-to-man,
    everything else man-to-woman), a candidate set holding each man's best
    viable next partner(s), and the untried remainder of every man's list.
    A man may only extend his reach while the strongly connected component
    he sits in has no arc leaving it; once a component with no outgoing arc
    carries a perfect candidate matching, swapping it in yields the next
    matching of the chain.
    """

    def __init__(self, inst: Instance, first, last):
        self.inst = inst
        nm, nw = len(inst.men), len(inst.women)
        self.nm, self.nw = nm, nw
        midx, widx = inst._midx, inst._widx
        self.mrank = inst._man_rank
        self.wrank = inst._woman_rank
        self.match_m: list[int | None] = [None] * nm
        self.match_w: list[int | None] = [None] * nw
        for m, w in first:
            self.match_m[midx[m]] = widx[w]
            self.match_w[widx[w]] = midx[m]
        self.last_m: list[int | None] = [None] * nm
        self.last_w: list[int | None] = [None] * nw
        for m, w in last:
            self.last_m[midx[m]] = widx[w]
            self.last_w[widx[w]] = midx[m]
        self.cand_m: list[set[int]] = [set() for _ in range(nm)]
        self.cand_w: list[set[int]] = [set() for _ in range(nw)]
        for m in range(nm):
            w = self.match_m[m]
            if w is not None and w == self.last_m[m]:
                self.cand_m[m].add(w)
                self.cand_w[w].add(m)
        self.trav: set[tuple[int, int]] = set()
        # the untried pool: the woman strictly below the man's current
        # partner, the man weakly above hers.  Ties with the woman's partner
        # stay in: they never become candidates, but traversing them welds
        # their components together until the woman climbs strictly higher.
        # Rotations re-prune so these bounds track the current matching.
        self.pool_m: list[list[set[int]]] = [
            [set() for _ in tiers] for tiers in inst._man_tiers
        ]
        self.pool_ptr = [0] * nm
        self.pool_w: list[set[int]] = [set() for _ in range(nw)]
        for m in range(nm):
            w0 = self.match_m[m]
            if w0 is None:
                continue
            own = self.mrank[m][w0]
            for w, r in self.mrank[m].items():
                if r <= own:
                    continue
                held = self.match_w[w]
                if held is None or self.wrank[w][m] > self.wrank[w][held]:
                    continue
                self.pool_m[m][r - 1].add(w)
                self.pool_w[w].add(m)
        self._dirty = True
        self._comp: list[int] = []
        self._outdeg: dict[int, int] = {}

    # -- component bookkeeping

    def _vert(self, w: int) -> int:
        return self.nm + w

    def _refresh(self) -> None:
        if not self._dirty:
            return
        nv = self.nm + self.nw
        adj: list[list[int]] = [[] for _ in range(nv)]
        for m, w in sorted(self.trav):
            adj[m].append(self._vert(w))
        for w, m in enumerate(self.match_w):
            if m is not None:
                adj[self._vert(w)].append(m)
        self._comp = _strongly_connected(nv, adj)
        outdeg: dict[int, int] = {}
        for m, w in self.trav:
            a, b = self._comp[m], self._comp[self._vert(w)]
            if a != b:
                outdeg[a] = outdeg.get(a, 0) + 1
        self._outdeg = outdeg
        self._dirty = False

    def _open(self, v: int) -> bool:
        """True when v's component has no arc leaving it."""
        self._refresh()
        return self._outdeg.get(self._comp[v], 0) == 0

    # -- pools

    def _pool_top(self, m: int):
        tiers = self.pool_m[m]
        i = self.pool_ptr[m]
        while i < len(tiers) and not tiers[i]:
            i += 1
        self.pool_ptr[m] = i
        return tiers[i] if i < len(tiers) else None

    def _pool_discard(self, m: int, w: int) -> None:
        self.pool_m[m][self.mrank[m][w] - 1].discard(w)
        self.pool_w[w].discard(m)

    def _trav_discard(self, m: int, w: int) -> None:
        if (m, w) in self.trav:
            self.trav.discard((m, w))
            self._dirty = True

    def _cand_discard(self, m: int, w: int) -> None:
        # the traversed arc stays: dropped candidates still tie their
        # components together until a rotation sweeps the edge away
        self.cand_m[m].discard(w)
        self.cand_w[w].discard(m)

    # -- search

    def _advance(self, m: int) -> bool:
        """One tier step for man m; True if any state changed."""
        tier = self._pool_top(m)
        if tier is None:
            return False
        women = sorted(tier)
        for w in women:
            held = self.match_w[w]
            if held is None or self.wrank[w][m] > self.wrank[w][held]:
                raise RuntimeError("untried pool lost its improvement invariant")
        acted = False
        for w in women:
            if (m, w) not in self.trav:
                self.trav.add((m, w))
                self._dirty = True
                acted = True
        if self._open(m):
            eligible = [
                w for w in women if self.wrank[w][m] < self.wrank[w][self.match_w[w]]
            ]
            for w in women:
                self._pool_discard(m, w)
            for w in eligible:
                self.cand_m[m].add(w)
                self.cand_w[w].add(m)
            self._prune_dominated(eligible)
            acted = True
        return acted

    def _prune_dominated(self, women) -> None:
        """Keep only each woman's best-ranked candidates."""
        for w in women:
            if len(self.cand_w[w]) < 2:
                continue
            best = min(self.wrank[w][m] for m in self.cand_w[w])
            for m in [m for m in self.cand_w[w] if self.wrank[w][m] > best]:
                if self.match_w[w] == m:
                    raise RuntimeError("candidate would evict a matched pair")
                self._cand_discard(m, w)

    def _search_sweep(self) -> bool:
        acted = False
        for m in range(self.nm):
            if self.match_m[m] == self.last_m[m]:
                continue
            if self.cand_m[m]:
                continue
            if not self._open(m):
                continue
            if self._advance(m):
                acted = True
        return acted

    def _drop_tied_candidates(self) -> bool:
        """A woman holding tied candidates in a closed component loses that
        whole rank, candidates and untried edges alike."""
        self._refresh()
        for w in range(self.nw):
            if len(self.cand_w[w]) < 2:
                continue
            if self._outdeg.get(self._comp[self._vert(w)], 0) != 0:
                continue
            ranks = {self.wrank[w][m] for m in self.cand_w[w]}
            assert len(ranks) == 1, "surviving candidates of one woman must be tied"
            rank = ranks.pop()
            for m in sorted(self.cand_w[w]):
                self._cand_discard(m, w)
            for m in [m for m in sorted(self.pool_w[w]) if self.wrank[w][m] == rank]:
                self._pool_discard(m, w)
            return True
        return False

    # -- rotation firing

    def _rotation_plan(self, cid: int, group: list[int]):
        comp = self._comp
        added = set()
        for v in group:
            if v < self.nm:
                m = v
                if len(self.cand_m[m]) != 1:
                    return None
                w = next(iter(self.cand_m[m]))
                if comp[self._vert(w)] != cid:
                    return None
                added.add((m, w))
            else:
                w = v - self.nm
                if len(self.cand_w[w]) != 1:
                    return None
                if comp[next(iter(self.cand_w[w]))] != cid:
                    return None
        removed = set()
        for v in group:
            if v >= self.nm:
                continue
            held = self.match_m[v]
            if held is None or comp[self._vert(held)] != cid:
                return None
            removed.add((v, held))
        if removed & added:
            return None
        return removed, added

    def _rotate_once(self, outputs: list) -> bool:
        self._refresh()
        members: dict[int, list[int]] = {}
        for v in range(self.nm + self.nw):
            members.setdefault(self._comp[v], []).append(v)
        for cid in sorted(members, key=lambda c: min(members[c])):
            group = members[cid]
            if len(group) < 2 or self._outdeg.get(cid, 0) != 0:
                continue
            plan = self._rotation_plan(cid, group)
            if plan is None:
                continue
            removed, added = plan
            for m, w in removed:
                self.match_m[m] = None
                self.match_w[w] = None
            for m, w in added:
                self.match_m[m] = w
                self.match_w[w] = m
            outputs.append(self._snapshot())
            group_men = {v for v in group if v < self.nm}
            group_women = {v - self.nm for v in group if v >= self.nm}
            stale = set()
            for m in group_men:
                stale.update((m, w) for w in self.cand_m[m])
            for w in group_women:
                stale.update((m, w) for m in self.cand_w[w])
            for m, w in stale:
                self._cand_discard(m, w)
            for m, w in [
                e for e in self.trav if e[0] in group_men or e[1] in group_women
            ]:
                self._trav_discard(m, w)
            # keep the untried pool aligned with the new partners: drop what
            # the man weakly prefers to his partner and every man the woman
            # now strictly prefers her partner to
            for m in group_men:
                landed = self.mrank[m][self.match_m[m]]
                for i in range(landed):
                    for w in list(self.pool_m[m][i]):
                        self._pool_discard(m, w)
            for w in group_women:
                landed = self.wrank[w][self.match_w[w]]
                for m in [x for x in self.pool_w[w] if self.wrank[w][x] > landed]:
                    self._pool_discard(m, w)
            for m in sorted(group_men):
                w = self.match_m[m]
                if w is not None and w == self.last_m[m]:
                    self.cand_m[m].add(w)
                    self.cand_w[w].add(m)
            self._dirty = True
            return True
        return False

    def _snapshot(self) -> frozenset:
        men, women = self.inst.men, self.inst.women
        return frozenset(
            (men[m], women[w]) for m, w in enumerate(self.match_m) if w is not None
        )

    def run(self) -> list[frozenset]:
        outputs: list[frozenset] = []
        while True:
            acted = False
            while self._search_sweep():
                acted = True
            while self._drop_tied_candidates():
                acted = True
            while self._rotate_once(outputs):
                acted = True
            if all(self.match_m[m] == self.last_m[m] for m in range(self.nm)):
                return outputs
            if not acted:
                raise RuntimeError("successor search stalled (internal error)")


def _strongly_connected(nv: int, adj: list[list[int]]) -> list[int]:
    """Tarjan, iterative; returns the component id of every vertex."""
    comp = [-1] * nv
    index = [-1] * nv
    low = [0] * nv
    on_stack = [False] * nv
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(nv):
        if index[root] != -1:
            continue
        work: list[list[int]] = [[root, 0]]
        while work:
            v, pos = work[-1]
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            descended = False
            while pos < len(adj[v]):
                u = adj[v][pos]
                pos += 1
                if index[u] == -1:
                    work[-1][1] = pos
                    work.append([u, 0])
                    descended = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], index[u])
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp[u] = ncomp
                    if u == v:
                        break
                ncomp += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comp
