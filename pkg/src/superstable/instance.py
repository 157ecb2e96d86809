"""Bipartite preference instances with ties: data model, text format, generation."""

from __future__ import annotations

import random
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

MEN = "men"
WOMEN = "women"

_NAME = re.compile(r"[A-Za-z0-9_]+\Z")
_TOKEN = re.compile(r"\s*(?:([A-Za-z0-9_]+)|(\()|(\))|(\S))")


class ParseError(ValueError):
    """Raised when an input file does not follow the documented format."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}: " if column is None else f"line {line}, col {column}: "
        super().__init__(where + message)


class Instance:
    """A two-sided preference system with tied, possibly incomplete lists.

    ``prefs`` maps each agent name to its preference tiers, most preferred
    first; members of one tier are equally preferred.  A pair (m, w) is an
    edge exactly when each side lists the other; one-sided listings are
    rejected at construction.  Instances are immutable once built and safe
    to share between threads.
    """

    __slots__ = (
        "men",
        "women",
        "prefs",
        "edges",
        "_edge_set",
        "_midx",
        "_widx",
        "_man_tiers",
        "_woman_tiers",
        "_man_rank",
        "_woman_rank",
        "_key",
    )

    def __init__(
        self,
        men: Sequence[str],
        women: Sequence[str],
        prefs: Mapping[str, Iterable[Iterable[str]]],
    ):
        self.men = tuple(men)
        self.women = tuple(women)
        for name in self.men + self.women:
            if not _NAME.match(name):
                raise ValueError(f"bad agent name {name!r}")
        if len(set(self.men)) != len(self.men):
            raise ValueError("duplicate name on the men side")
        if len(set(self.women)) != len(self.women):
            raise ValueError("duplicate name on the women side")
        overlap = set(self.men) & set(self.women)
        if overlap:
            raise ValueError(f"name declared on both sides: {sorted(overlap)[0]}")

        known = set(self.men) | set(self.women)
        for name in prefs:
            if name not in known:
                raise ValueError(f"preferences given for unknown agent {name!r}")

        normalized: dict[str, tuple[tuple[str, ...], ...]] = {}
        mset, wset = set(self.men), set(self.women)
        for name in self.men + self.women:
            opposite = wset if name in mset else mset
            tiers = []
            seen: set[str] = set()
            for tier in prefs.get(name, ()):
                tier = tuple(tier)
                if not tier:
                    raise ValueError(f"empty tier in {name!r}'s list")
                for member in tier:
                    if member not in opposite:
                        raise ValueError(
                            f"{name!r} lists {member!r}, which is not on the opposite side"
                        )
                    if member in seen:
                        raise ValueError(f"duplicate entry {member!r} in {name!r}'s list")
                    seen.add(member)
                tiers.append(tier)
            normalized[name] = tuple(tiers)
        self.prefs = normalized

        # mutual acceptability defines the edge set
        listed = {
            (m, w) for m in self.men for tier in normalized[m] for w in tier
        }
        listed_back = {
            (m, w) for w in self.women for tier in normalized[w] for m in tier
        }
        for m, w in listed - listed_back:
            raise ValueError(f"non-mutual listing: {m!r} lists {w!r} but not vice versa")
        for m, w in listed_back - listed:
            raise ValueError(f"non-mutual listing: {w!r} lists {m!r} but not vice versa")

        self._midx = {m: i for i, m in enumerate(self.men)}
        self._widx = {w: j for j, w in enumerate(self.women)}
        self._man_tiers = [
            [[self._widx[w] for w in tier] for tier in normalized[m]] for m in self.men
        ]
        self._woman_tiers = [
            [[self._midx[m] for m in tier] for tier in normalized[w]] for w in self.women
        ]
        self._man_rank = [
            {w: t + 1 for t, tier in enumerate(tiers) for w in tier}
            for tiers in self._man_tiers
        ]
        self._woman_rank = [
            {m: t + 1 for t, tier in enumerate(tiers) for m in tier}
            for tiers in self._woman_tiers
        ]
        self.edges = tuple(
            (m, w) for m in self.men for tier in normalized[m] for w in tier
        )
        self._edge_set = frozenset(self.edges)
        self._key = (self.men, self.women, tuple(sorted(normalized.items())))

    # -- basic queries ----------------------------------------------------

    def side(self, name: str) -> str:
        if name in self._midx:
            return MEN
        if name in self._widx:
            return WOMEN
        raise ValueError(f"unknown agent {name!r}")

    def is_edge(self, man: str, woman: str) -> bool:
        return (man, woman) in self._edge_set

    def neighbors(self, name: str) -> tuple[str, ...]:
        """Acceptable partners of ``name`` in preference order (ties flattened)."""
        return tuple(p for tier in self.prefs[name] for p in tier)

    def man_rank(self, man: str, woman: str) -> int:
        """1-based tier index of ``woman`` in ``man``'s list."""
        try:
            return self._man_rank[self._midx[man]][self._widx[woman]]
        except KeyError:
            raise ValueError(f"({man!r}, {woman!r}) is not an edge") from None

    def woman_rank(self, woman: str, man: str) -> int:
        """1-based tier index of ``man`` in ``woman``'s list."""
        try:
            return self._woman_rank[self._widx[woman]][self._midx[man]]
        except KeyError:
            raise ValueError(f"({man!r}, {woman!r}) is not an edge") from None

    def __eq__(self, other):
        return isinstance(other, Instance) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Instance({len(self.men)} men, {len(self.women)} women, {len(self.edges)} edges)"


def rank_of(inst: Instance, agent: str, partner: str) -> int:
    """Rank (1-based tier index) of ``partner`` on ``agent``'s list.

    Equal ranks mean the agent is indifferent; a smaller rank means strict
    preference.
    """
    if agent in inst._midx:
        return inst.man_rank(agent, partner)
    if agent in inst._widx:
        return inst.woman_rank(agent, partner)
    raise ValueError(f"unknown agent {agent!r}")


def swap_sides(inst: Instance) -> Instance:
    """The same instance with the two sides exchanged."""
    return Instance(inst.women, inst.men, inst.prefs)


def transpose_pairs(pairs):
    """Flip (man, woman) pairs into the swapped-sides orientation."""
    return frozenset((b, a) for a, b in pairs)


# -- text format -----------------------------------------------------------


def parse_instance(text: str) -> Instance:
    """Parse the instance text format.

    ``#`` starts a comment, blank lines are skipped.  The first two
    meaningful lines must be ``men: <names>`` and ``women: <names>``, then one
    preference line per agent: ``name: entry entry ...`` where an entry is a
    bare name or a tie group ``(a b c)``.  Agents without a preference line
    have an empty list.
    """
    men: list[str] | None = None
    women: list[str] | None = None
    pref_lines: list[tuple[int, str, str]] = []
    last_line = 0
    for ln, raw in enumerate(text.splitlines(), start=1):
        last_line = ln
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError("expected '<name>: ...'", ln)
        label, _, rest = line.partition(":")
        label = label.strip()
        if not _NAME.match(label):
            raise ParseError(f"bad name {label!r}", ln)
        if men is None:
            if label != "men":
                raise ParseError("first line must be the 'men:' header", ln)
            men = rest.split()
            if not men:
                raise ParseError("empty side: no men declared", ln)
            continue
        if women is None:
            if label != "women":
                raise ParseError("second line must be the 'women:' header", ln)
            women = rest.split()
            if not women:
                raise ParseError("empty side: no women declared", ln)
            continue
        pref_lines.append((ln, label, rest))
    if men is None or women is None:
        raise ParseError("missing men:/women: headers", last_line or 1)

    prefs: dict[str, list[list[str]]] = {}
    for ln, agent, rest in pref_lines:
        if agent in prefs:
            raise ParseError(f"duplicate preference line for {agent!r}", ln)
        tiers: list[list[str]] = []
        group: list[str] | None = None
        pos = 0
        while pos < len(rest):
            match = _TOKEN.match(rest, pos)
            if match is None:
                break
            pos = match.end()
            name, opener, closer, junk = match.groups()
            col = match.start(match.lastindex) + 1 + len(agent) + 1
            if junk is not None:
                raise ParseError(f"unexpected character {junk!r}", ln, col)
            if opener is not None:
                if group is not None:
                    raise ParseError("nested '(' in tie group", ln, col)
                group = []
            elif closer is not None:
                if group is None:
                    raise ParseError("')' without matching '('", ln, col)
                if not group:
                    raise ParseError("empty tie group", ln, col)
                tiers.append(group)
                group = None
            else:
                if group is None:
                    tiers.append([name])
                else:
                    group.append(name)
        if group is not None:
            raise ParseError("unclosed '(' in tie group", ln)
        prefs[agent] = tiers

    known = set(men) | set(women)
    for ln, agent, _ in pref_lines:
        if agent not in known:
            raise ParseError(f"unknown agent name {agent!r}", ln)
    try:
        return Instance(men, women, prefs)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; preserves declared order so round-trips are exact."""
    lines = ["men: " + " ".join(inst.men), "women: " + " ".join(inst.women)]
    for name in inst.men + inst.women:
        tiers = inst.prefs[name]
        if not tiers:
            continue
        entries = [
            tier[0] if len(tier) == 1 else "(" + " ".join(tier) + ")" for tier in tiers
        ]
        lines.append(f"{name}: {' '.join(entries)}")
    return "\n".join(lines) + "\n"


# -- random generation -------------------------------------------------------


def random_instance(
    n_men: int, n_women: int, density: float, tie_prob: float, seed: int
) -> Instance:
    """Random instance: each pair is an edge with probability ``density``.

    Each agent's list is a uniformly random permutation of its neighbors,
    with each adjacent pair merged into one tier independently with
    probability ``tie_prob``.  Deterministic for fixed arguments.
    """
    if n_men < 1 or n_women < 1:
        raise ValueError("both sides need at least one agent")
    if not (0.0 <= density <= 1.0 and 0.0 <= tie_prob <= 1.0):
        raise ValueError("density and tie_prob must lie in [0, 1]")
    rng = random.Random(seed)
    men = [f"m{i}" for i in range(1, n_men + 1)]
    women = [f"w{j}" for j in range(1, n_women + 1)]
    adj: dict[str, list[str]] = {m: [] for m in men}
    radj: dict[str, list[str]] = {w: [] for w in women}
    for m in men:
        for w in women:
            if rng.random() < density:
                adj[m].append(w)
                radj[w].append(m)
    prefs: dict[str, list[list[str]]] = {}
    for name, neighbors in [(m, adj[m]) for m in men] + [(w, radj[w]) for w in women]:
        order = list(neighbors)
        rng.shuffle(order)
        tiers: list[list[str]] = []
        for i, partner in enumerate(order):
            if i > 0 and rng.random() < tie_prob:
                tiers[-1].append(partner)
            else:
                tiers.append([partner])
        prefs[name] = tiers
    return Instance(men, women, prefs)


# -- edge-value files (weights, fractional points) ---------------------------


def parse_edge_values(inst: Instance, text: str) -> dict[tuple[str, str], Fraction]:
    """Parse ``man woman rational`` lines; rationals are ``p`` or ``p/q`` with q > 0."""
    values: dict[tuple[str, str], Fraction] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected '<man> <woman> <rational>'", ln)
        m, w, value = parts
        if not inst.is_edge(m, w):
            raise ParseError(f"({m}, {w}) is not an edge of the instance", ln)
        if (m, w) in values:
            raise ParseError(f"duplicate line for edge ({m}, {w})", ln)
        values[(m, w)] = _parse_fraction(value, ln)
    return values


def load_weights(inst: Instance, text: str) -> dict[tuple[str, str], Fraction]:
    """Parse a weights file; edges absent from the file weigh 0."""
    return parse_edge_values(inst, text)


def _parse_fraction(token: str, ln: int) -> Fraction:
    num, slash, den = token.partition("/")
    try:
        p = int(num)
        if not slash:
            return Fraction(p)
        q = int(den)
    except ValueError:
        raise ParseError(f"bad rational {token!r}", ln) from None
    if q <= 0:
        raise ParseError(f"bad rational {token!r}: denominator must be positive", ln)
    return Fraction(p, q)
