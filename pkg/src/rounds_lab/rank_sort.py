"""Round-limited sorting with three-way rank probes, plus an adaptive
answering opponent that withholds order information as long as it can.

The sorter probes every unresolved item at thresholds shared by its block:
with m candidate ranks and j rounds left a block uses ceil(m**(1/j)) - 1
thresholds (all m - 1 inner ranks on the last round), so blocks shrink
fast enough to finish inside the budget with at most 2*k*n**(1+1/k)
queries.

The opponent answers batches without fixing a permutation up front. Inside
each undetermined stretch it finds the largest x such that x items carry
no probes among the x lowest ranks, silently packs those items at the
bottom, names the item just above them, and repeats on the rest within the
same round. Everything it says stays consistent with at least one total
order, which forces any correct sorter to pay for the separations it
needs.
"""

from dataclasses import dataclass, field
from math import e

from .oracle import (EQUAL, GREATER, LESS, MalformedQuery, RankQuery,
                     RoundLimitExceeded, build_transcript, compare)
from .util import ceil_div, ceil_kth_root


class InconsistentQuery(Exception):
    pass


class AlgorithmIncorrect(Exception):
    pass


def block_thresholds(lo, hi, rounds_left):
    """Shared probe thresholds for a block of candidate ranks [lo, hi]."""
    m = hi - lo + 1
    z = m if rounds_left <= 1 else ceil_kth_root(m, rounds_left)
    return [lo - 1 + ceil_div(m * j, z) for j in range(1, z)]


def sort_rank(session, n, k):
    """Rank of every item, as a tuple indexed by item - 1."""
    if k < 1:
        raise ValueError("k must be at least 1")
    resolved = {}
    blocks = {}
    if n == 1:
        resolved[1] = 1
    elif n > 1:
        blocks[(1, n)] = list(range(1, n + 1))
    rounds_left = k
    while blocks and rounds_left >= 1:
        queries = []
        spans = []  # (item, lo, hi, probe count) in submission order
        for (lo, hi), items in sorted(blocks.items()):
            assert len(items) == hi - lo + 1, "block size must match its span"
            ts = block_thresholds(lo, hi, rounds_left)
            for item in items:
                spans.append((item, lo, hi, len(ts)))
                queries.extend(RankQuery(item, t) for t in ts)
        answers = session.submit_round(queries)
        rounds_left -= 1
        pending = {}
        pos = 0
        for item, lo, hi, width in spans:
            hit = None
            for off in range(width):
                a = answers[pos + off]
                t = queries[pos + off].threshold
                if a == EQUAL:
                    hit = t
                    break
                if a == LESS:
                    hi = min(hi, t - 1)
                else:
                    lo = max(lo, t + 1)
            pos += width
            if hit is not None:
                resolved[item] = hit
            elif lo == hi:
                resolved[item] = lo
            else:
                pending.setdefault((lo, hi), []).append(item)
        blocks = pending
    assert not blocks, "the round budget always suffices"
    return tuple(resolved[i] for i in range(1, n + 1))


@dataclass
class Segment:
    """Items whose relative order is still free, holding ranks [lo, hi]."""

    items: tuple
    lo: int
    hi: int


@dataclass
class AdversaryState:
    """Order commitments made so far; always realizable by a permutation."""

    n: int
    resolved: dict = field(default_factory=dict)   # item -> committed rank
    segments: list = field(default_factory=list)   # open Segments, disjoint
    round_log: list = field(default_factory=list)  # queries seen per round


def new_adversary(n):
    state = AdversaryState(n=n)
    if n == 1:
        state.resolved[1] = 1
    elif n > 1:
        state.segments.append(Segment(items=tuple(range(1, n + 1)), lo=1, hi=n))
    return state


def _commit(state, items, lo, hi):
    items = tuple(sorted(items))
    if not items:
        return
    assert len(items) == hi - lo + 1
    if len(items) == 1:
        state.resolved[items[0]] = lo
    else:
        state.segments.append(Segment(items=items, lo=lo, hi=hi))


def _carve(state, items, lo, hi, local, answers):
    # local: (answer position, item, threshold) with thresholds in [lo, hi]
    if not local:
        _commit(state, items, lo, hi)
        return
    m = hi - lo + 1
    probed = {}
    for _, item, t in local:
        probed.setdefault(item, set()).add(t - lo + 1)

    def untouched_below(x):
        return [i for i in items
                if not any(tau <= x for tau in probed.get(i, ()))]

    x = 0
    for cand in range(m - 1, 0, -1):
        if len(untouched_below(cand)) >= cand:
            x = cand
            break
    low = untouched_below(x)[:x]  # smallest item ids that qualify
    low_set = set(low)
    rest = [i for i in items if i not in low_set]
    mid = rest[0]
    state.resolved[mid] = lo + x
    _commit(state, low, lo, lo + x - 1)
    deeper = []
    for pos, item, t in local:
        if item in low_set:
            answers[pos] = LESS  # its rank is at most lo + x - 1 < t
        elif item == mid:
            answers[pos] = compare(lo + x, t)
        elif t <= lo + x:
            answers[pos] = GREATER
        else:
            deeper.append((pos, item, t))
    high = rest[1:]
    if high:
        _carve(state, tuple(high), lo + x + 1, hi, deeper, answers)
    else:
        assert not deeper


def adversary_round(state, queries):
    """Answer one batch while committing as little order as possible."""
    queries = list(queries)
    state.round_log.append(list(queries))
    answers = [None] * len(queries)
    by_segment = {}
    for pos, q in enumerate(queries):
        if q.__class__ is not RankQuery:
            raise MalformedQuery("the opponent only serves rank queries")
        item, t = q.item, q.threshold
        if not (item.__class__ is int and 1 <= item <= state.n):
            raise MalformedQuery("item index out of range: %r" % (item,))
        if not (t.__class__ is int and 1 <= t <= state.n):
            raise MalformedQuery("threshold out of range: %r" % (t,))
        if item in state.resolved:
            answers[pos] = compare(state.resolved[item], t)
            continue
        seg = next((s for s in state.segments if item in s.items), None)
        if seg is None:
            raise InconsistentQuery("item %d belongs nowhere" % (item,))
        if t < seg.lo:
            answers[pos] = GREATER
        elif t > seg.hi:
            answers[pos] = LESS
        else:
            by_segment.setdefault(id(seg), (seg, []))[1].append((pos, item, t))
    for seg, local in by_segment.values():
        state.segments.remove(seg)
        _carve(state, seg.items, seg.lo, seg.hi, local, answers)
    return answers


def consistent_witness(state):
    """One total order (tuple of ranks by item) agreeing with everything
    the opponent has said; open segments default to item-id order."""
    ranks = dict(state.resolved)
    for seg in state.segments:
        for offset, item in enumerate(seg.items):
            ranks[item] = seg.lo + offset
    assert sorted(ranks) == list(range(1, state.n + 1))
    assert sorted(ranks.values()) == list(range(1, state.n + 1))
    return tuple(ranks[i] for i in range(1, state.n + 1))


class AdversarySession:
    """Session facade whose answers come from the opponent, so sorting
    algorithms run against it unchanged."""

    def __init__(self, n, k_limit):
        if k_limit < 1:
            raise ValueError("k_limit must be at least 1")
        self.n = n
        self.k_limit = k_limit
        self.state = new_adversary(n)
        self._batches = []
        self._total = 0

    @property
    def rounds_used(self):
        return len(self._batches)

    def submit_round(self, queries):
        if len(self._batches) >= self.k_limit:
            raise RoundLimitExceeded(
                "already used %d of %d rounds" % (len(self._batches), self.k_limit))
        queries = tuple(queries)
        answers = tuple(adversary_round(self.state, queries))
        self._batches.append((queries, answers))
        self._total += len(queries)
        return list(answers)

    def transcript(self):
        return build_transcript(self._batches, self.k_limit, self._total)


def forced_query_count(algorithm, n, k):
    """Queries `algorithm` spends against the opponent before naming the
    one order consistent with everything said. Raises AlgorithmIncorrect
    when several orders (or a different order) remain possible."""
    session = AdversarySession(n, k)
    claimed = tuple(algorithm(session, n, k))
    state = session.state
    for seg in state.segments:
        if len(seg.items) >= 2:
            # at least two orders remain; one of them defeats the claim
            raise AlgorithmIncorrect(
                "items %r were never separated" % (seg.items,))
    witness = consistent_witness(state)
    if claimed != witness:
        raise AlgorithmIncorrect(
            "claimed %r but the committed order is %r" % (claimed, witness))
    return session.transcript().total_queries


def sorting_lower_bound(k, n):
    """Query floor (k / 2e) * n**(1 + 1/k) - k*n; may be negative, in which
    case the floor is vacuous."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    return (k / (2 * e)) * n ** (1 + 1 / k) - k * n
