"""Round-limited search for the item holding a promised rank.

Fresh indices are probed each round along a fixed budget curve: after
round j the number of probed items is ceil((n*p - 1) * j / k). The budget
stops one short of n*p because whatever stays unprobed after the last
round is covered by a single closing guess.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .oracle import EQUAL, RankQuery
from .util import bernoulli, normalized_weights


@dataclass(frozen=True)
class SelectSchedule:
    """Per-round probe counts for a given (n, k, p)."""

    n: int
    k: int
    p: Fraction
    round_sizes: tuple


@dataclass(frozen=True)
class ItemDistribution:
    """Probability that each index holds the promised rank."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", normalized_weights(self.weights))


def build_schedule(n, k, p):
    """Probe counts ceil(q*j/k) - ceil(q*(j-1)/k) with q = n*p - 1.

    A negative budget (p below 1/n) clamps to an all-zero schedule: the
    closing guess alone already succeeds with probability 1/n >= p.
    """
    p = Fraction(p)
    if n < 1:
        raise ValueError("n must be positive")
    if not 1 <= k <= n:
        raise ValueError("k must be in 1..n")
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    q = n * p - 1
    if q < 0:
        sizes = (0,) * k
    else:
        marks = [ceil(q * j / k) for j in range(k + 1)]
        sizes = tuple(marks[j] - marks[j - 1] for j in range(1, k + 1))
    return SelectSchedule(n=n, k=k, p=p, round_sizes=sizes)


def select_det(session, schedule, probe_order):
    """Probe along probe_order per the schedule; if the rank never surfaces,
    guess the first unprobed index. A batch is charged in full even when
    the hit lands mid-batch; empty batches are not submitted."""
    n = schedule.n
    if sorted(probe_order) != list(range(1, n + 1)):
        raise ValueError("probe_order must be a permutation of 1..n")
    r = session.promised_rank
    at = 0
    for size in schedule.round_sizes:
        if size == 0:
            continue
        batch = probe_order[at:at + size]
        answers = session.submit_round([RankQuery(i, r) for i in batch])
        at += size
        for i, a in zip(batch, answers):
            if a == EQUAL:
                return i
    return probe_order[at]  # at <= n - 1 since the budget tops out at n*p - 1


def select_det_dist(session, n, k, p, dist):
    """Probe in order of decreasing weight, ties toward the smaller index."""
    order = sorted(range(1, n + 1), key=lambda i: (-dist.weights[i - 1], i))
    return select_det(session, build_schedule(n, k, p), order)


def select_rand(session, n, k, p, rng):
    """With probability p run the full-coverage schedule over a uniformly
    shuffled probe order, else answer nothing.

    The shuffle makes the expected cost on every fixed input equal to p
    times the uniform-input expectation of the deterministic run.
    """
    if not bernoulli(p, rng):
        return None
    order = list(range(1, n + 1))
    rng.shuffle(order)
    return select_det(session, build_schedule(n, k, Fraction(1)), order)


def exact_expected_queries(schedule):
    """Expected query count of select_det over a uniform target, exactly.

    Landing on a probe in round j costs the full prefix through round j;
    never landing costs every scheduled probe.
    """
    n = schedule.n
    total = Fraction(0)
    prefix = 0
    issued = sum(schedule.round_sizes)
    for size in schedule.round_sizes:
        prefix += size
        total += Fraction(size, n) * prefix
    total += Fraction(n - issued, n) * issued
    return total
