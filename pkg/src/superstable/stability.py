"""Blocking-edge tests, the side-optimal super-stable solver, and dominance."""

from __future__ import annotations

from collections import deque

from .instance import Instance, MEN, WOMEN, swap_sides, transpose_pairs

SUPER = "super"
STRONG = "strong"


class NoSuperStableMatching(ValueError):
    """Raised by operations that require the instance to admit a super-stable matching."""


def validate_matching(inst: Instance, pairs) -> frozenset:
    """Normalize ``pairs`` to a frozenset and check it is a matching of ``inst``."""
    matching = frozenset((m, w) for m, w in pairs)
    seen: set[str] = set()
    for m, w in matching:
        if not inst.is_edge(m, w):
            raise ValueError(f"({m!r}, {w!r}) is not an edge of the instance")
        if m in seen:
            raise ValueError(f"agent {m!r} appears in two pairs")
        if w in seen:
            raise ValueError(f"agent {w!r} appears in two pairs")
        seen.add(m)
        seen.add(w)
    return matching


def partner_maps(matching) -> tuple[dict, dict]:
    by_man = {}
    by_woman = {}
    for m, w in matching:
        by_man[m] = w
        by_woman[w] = m
    return by_man, by_woman


def blocking_edges(inst: Instance, matching, criterion: str = SUPER) -> frozenset:
    """Edges outside ``matching`` that block it under ``criterion``.

    Super: neither endpoint would become worse off by matching together.
    Strong: one endpoint becomes strictly better off and the other not worse.
    An unmatched agent counts any listed partner as a strict improvement.
    The matching is super-stable (resp. strongly stable) iff the result is
    empty.
    """
    if criterion not in (SUPER, STRONG):
        raise ValueError(f"unknown criterion {criterion!r}")
    matching = validate_matching(inst, matching)
    by_man, by_woman = partner_maps(matching)
    blockers = []
    for m, w in inst.edges:
        if by_man.get(m) == w:
            continue
        held_m = by_man.get(m)
        held_w = by_woman.get(w)
        if held_m is None:
            m_better = m_not_worse = True
        else:
            r_new, r_old = inst.man_rank(m, w), inst.man_rank(m, held_m)
            m_better, m_not_worse = r_new < r_old, r_new <= r_old
        if held_w is None:
            w_better = w_not_worse = True
        else:
            r_new, r_old = inst.woman_rank(w, m), inst.woman_rank(w, held_w)
            w_better, w_not_worse = r_new < r_old, r_new <= r_old
        if criterion == SUPER:
            if m_not_worse and w_not_worse:
                blockers.append((m, w))
        else:
            if (m_better and w_not_worse) or (w_better and m_not_worse):
                blockers.append((m, w))
    return frozenset(blockers)


def is_super_stable(inst: Instance, matching) -> bool:
    return not blocking_edges(inst, matching, SUPER)


def optimal_super_stable(inst: Instance, side: str = MEN):
    """The side-optimal super-stable matching, or None if there is none.

    For ``side="men"`` the result weakly improves on every super-stable
    matching from the men's viewpoint; the woman side is handled by swapping
    the roles of the two sides.  None is a valid answer, not an error.
    """
    if side == WOMEN:
        result = optimal_super_stable(swap_sides(inst), MEN)
        return None if result is None else transpose_pairs(result)
    if side != MEN:
        raise ValueError(f"unknown side {side!r}")
    candidate = _propose_and_delete(inst)
    if candidate is None:
        return None
    # belt and braces: re-verify against the original instance
    if blocking_edges(inst, candidate, SUPER):
        return None
    return candidate


def _propose_and_delete(inst: Instance):
    """Extended proposal/deletion rounds; returns the engagement matching or None.

    Men propose to their entire head tier.  A proposed-to woman deletes all
    pairs strictly worse than the proposer; a woman left holding proposals
    from tied men has that whole tie tier deleted.  Runs until proposals
    stabilize, then the engagements must form a matching.
    """
    n_men, n_women = len(inst.men), len(inst.women)
    man_tiers = inst._man_tiers
    woman_tiers = inst._woman_tiers
    woman_rank = inst._woman_rank
    alive_m = [set(r) for r in inst._man_rank]
    alive_w = [set(r) for r in woman_rank]
    head = [0] * n_men
    bottom = [len(t) - 1 for t in woman_tiers]
    eng_m: list[set[int]] = [set() for _ in range(n_men)]
    eng_w: list[set[int]] = [set() for _ in range(n_women)]
    queue = deque(range(n_men))

    def delete_pair(m: int, w: int) -> None:
        alive_m[m].discard(w)
        alive_w[w].discard(m)
        if w in eng_m[m]:
            eng_m[m].discard(w)
            eng_w[w].discard(m)
            if not eng_m[m]:
                queue.append(m)

    def delete_tier(w: int, tier_index: int) -> None:
        for m in list(woman_tiers[w][tier_index]):
            if m in alive_w[w]:
                delete_pair(m, w)

    while True:
        while queue:
            m = queue.popleft()
            if eng_m[m]:
                continue
            while head[m] < len(man_tiers[m]):
                if any(w in alive_m[m] for w in man_tiers[m][head[m]]):
                    break
                head[m] += 1
            else:
                continue
            for w in man_tiers[m][head[m]]:
                if w not in alive_m[m]:
                    continue
                eng_m[m].add(w)
                eng_w[w].add(m)
                rank = woman_rank[w][m]
                # drop everything w likes strictly less than m
                # (0-based tier index >= rank means 1-based rank > rank)
                while bottom[w] >= rank:
                    delete_tier(w, bottom[w])
                    bottom[w] -= 1
                while bottom[w] >= 0 and not any(
                    x in alive_w[w] for x in woman_tiers[w][bottom[w]]
                ):
                    bottom[w] -= 1
        resolved = True
        for w in range(n_women):
            if len(eng_w[w]) < 2:
                continue
            resolved = False
            ranks = {woman_rank[w][m] for m in eng_w[w]}
            assert len(ranks) == 1, "engagements of one woman must be tied"
            delete_tier(w, ranks.pop() - 1)
            while bottom[w] >= 0 and not any(
                x in alive_w[w] for x in woman_tiers[w][bottom[w]]
            ):
                bottom[w] -= 1
        if resolved:
            break

    pairs = []
    for m in range(n_men):
        if len(eng_m[m]) > 1:
            return None
        if eng_m[m]:
            pairs.append((inst.men[m], inst.women[next(iter(eng_m[m]))]))
    return frozenset(pairs)


def dominates(inst: Instance, first, second) -> bool:
    """True iff every man weakly prefers his partner in ``first`` to ``second``.

    Both inputs must be super-stable; they then match the same agents, so the
    comparison is total on matched men.
    """
    first = validate_matching(inst, first)
    second = validate_matching(inst, second)
    for matching in (first, second):
        if blocking_edges(inst, matching, SUPER):
            raise ValueError("dominance is defined on super-stable matchings only")
    by_man_1, _ = partner_maps(first)
    by_man_2, _ = partner_maps(second)
    if set(by_man_1) != set(by_man_2):
        raise RuntimeError("super-stable matchings must match the same set of men")
    return all(
        inst.man_rank(m, by_man_1[m]) <= inst.man_rank(m, by_man_2[m]) for m in by_man_1
    )


def matching_to_json(inst: Instance, matching) -> dict:
    """JSON form: {"pairs": [...], "matched": n}; None renders as {"pairs": null}."""
    if matching is None:
        return {"pairs": None}
    matching = validate_matching(inst, matching)
    order = {m: i for i, m in enumerate(inst.men)}
    pairs = sorted(matching, key=lambda p: order[p[0]])
    return {"pairs": [[m, w] for m, w in pairs], "matched": len(pairs)}
