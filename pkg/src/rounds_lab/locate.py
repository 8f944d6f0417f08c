"""Round-limited search for the rank of a promised element.

Each round splits the live candidates into nearly equal blocks and probes
the block boundaries; the three-way answers either finish the search or
name the block to recurse into. With s candidates and j rounds left a
round uses ceil(s**(1/j)) - 1 probes, except that the last round probes
every candidate outright. The total stays within k * ceil(n**(1/k)).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .oracle import EQUAL, LESS, TARGET, RankQuery
from .util import bernoulli, ceil_kth_root, ceil_log2, normalized_weights


@dataclass(frozen=True)
class BlockPlan:
    """Probe thresholds for one round over the rank interval [lo, hi]."""

    lo: int
    hi: int
    probes: tuple


@dataclass(frozen=True)
class RankDistribution:
    """Probability that the promised element holds each rank 1..n."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", normalized_weights(self.weights))


def probe_positions(count, rounds_left):
    """0-based probe positions among `count` sorted candidates.

    With one round left every candidate is probed. Otherwise the probes
    leave ceil(count**(1/rounds_left)) gaps whose sizes differ by at most
    one, larger gaps first.
    """
    if count <= 1:
        return []
    if rounds_left <= 1:
        return list(range(count))
    z = ceil_kth_root(count, rounds_left)
    base, extra = divmod(count - (z - 1), z)
    sizes = [base + 1] * extra + [base] * (z - extra)
    positions = []
    at = 0
    for size in sizes[:-1]:
        at += size
        positions.append(at)
        at += 1
    return positions


def block_plan(lo, hi, rounds_left):
    """Probe plan for the contiguous rank interval [lo, hi]."""
    offs = probe_positions(hi - lo + 1, rounds_left)
    return BlockPlan(lo=lo, hi=hi, probes=tuple(lo + i for i in offs))


def locate_det_subset(session, n, k, ranks):
    """Search only the candidate ranks in `ranks`.

    Returns the target's rank when it lies in the candidate set and None
    otherwise, spending at most k * ceil(len(ranks)**(1/k)) queries either
    way. Unused rounds are simply not submitted.
    """
    if ranks.__class__ is range and ranks.step == 1:
        cands = ranks  # already sorted and duplicate-free
    else:
        cands = sorted(set(ranks))
    if not cands or cands[0] < 1 or cands[-1] > n:
        raise ValueError("candidate ranks must be a nonempty subset of 1..n")
    if k < 1:
        raise ValueError("k must be at least 1")
    lo, hi = 1, n  # the promise pins the rank to [1, n]
    rounds_left = min(k, max(1, ceil_log2(len(cands))))
    narrowed = lo > cands[0] or hi < cands[-1]
    while True:
        if narrowed:
            cands = [c for c in cands if lo <= c <= hi]
        if not cands:
            return None
        if lo == hi:
            # earlier answers pinned the rank exactly, no query needed
            return lo
        if len(cands) == 1:
            t = cands[0]
            answer = session.submit_round([RankQuery(TARGET, t)])[0]
            return t if answer == EQUAL else None
        assert rounds_left > 0, "plan must resolve within the round budget"
        probes = [cands[i] for i in probe_positions(len(cands), rounds_left)]
        answers = session.submit_round([RankQuery(TARGET, t) for t in probes])
        rounds_left -= 1
        for t, a in zip(probes, answers):
            if a == EQUAL:
                return t
            if a == LESS:
                hi = min(hi, t - 1)
            else:
                lo = max(lo, t + 1)
        narrowed = True


def locate_det(session, n, k):
    """Rank of the promised element; correct on every input.

    Queries stay within k * ceil(n**(1/k)), rounds within min(k, ceil(log2 n)).
    """
    found = locate_det_subset(session, n, k, range(1, n + 1))
    assert found is not None
    return found


def locate_rand(session, n, k, p, rng):
    """Run the always-correct search with probability p, else do nothing."""
    if not bernoulli(p, rng):
        return None
    return locate_det(session, n, k)


def locate_det_dist(session, n, k, p, dist):
    """Search the ceil(p*n) most probable ranks under dist (ties broken
    toward the smaller rank); succeeds at least with probability p."""
    p = Fraction(p)
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    size = ceil(p * n)
    order = sorted(range(1, n + 1), key=lambda r: (-dist.weights[r - 1], r))
    return locate_det_subset(session, n, k, order[:size])
