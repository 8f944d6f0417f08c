"""Round-disciplined oracle over a hidden permutation.

Queries are submitted in batches and a batch is answered as a whole, so a
query can only depend on answers from strictly earlier batches. Submitting
a batch consumes one round even when the batch is empty, and a repeated
query is charged every time it appears.
"""

from collections import namedtuple
from dataclasses import dataclass

LESS = "<"
EQUAL = "="
GREATER = ">"

# Placeholder reference to the promised element, so algorithms can query it
# without knowing where it sits.
TARGET = "z"


class RoundLimitExceeded(Exception):
    pass


class MalformedQuery(Exception):
    pass


RankQuery = namedtuple("RankQuery", ["item", "threshold"])
ComparisonQuery = namedtuple("ComparisonQuery", ["left", "right"])


def compare(a, b):
    if a < b:
        return LESS
    if a == b:
        return EQUAL
    return GREATER


def flip(answer):
    """Swap the roles of the two sides of a comparison answer."""
    if answer == LESS:
        return GREATER
    if answer == GREATER:
        return LESS
    return EQUAL


@dataclass(frozen=True)
class HiddenInstance:
    """A permutation of 1..n plus an optional promised element.

    ranks[i-1] is the rank of item i. target_index, when set, names the
    item the search tasks ask about; which half of that pair (the index or
    the rank) is public depends on the task.
    """

    ranks: tuple
    target_index: int = None

    def __post_init__(self):
        n = len(self.ranks)
        if sorted(self.ranks) != list(range(1, n + 1)):
            raise ValueError("ranks must be a permutation of 1..n")
        if self.target_index is not None and not 1 <= self.target_index <= n:
            raise ValueError("target_index out of range")

    @property
    def n(self):
        return len(self.ranks)

    def rank_of(self, item):
        return self.ranks[item - 1]

    @property
    def target_rank(self):
        """Rank of the promised element (public input for select tasks)."""
        if self.target_index is None:
            raise ValueError("instance has no promised element")
        return self.ranks[self.target_index - 1]


@dataclass(frozen=True)
class RoundTranscript:
    rounds: tuple  # one entry per batch: tuple of (query, answer) pairs
    k_limit: int
    total_queries: int

    @property
    def round_sizes(self):
        return tuple(len(batch) for batch in self.rounds)


def build_transcript(batches, k_limit, total):
    rounds = tuple(tuple(zip(qs, ans)) for qs, ans in batches)
    return RoundTranscript(rounds=rounds, k_limit=k_limit, total_queries=total)


class OracleSession:
    """Answers query batches about one hidden instance, up to k_limit rounds.

    Single-owner: a session must not be shared by concurrently running
    algorithms. Independent sessions are fully isolated.
    """

    def __init__(self, instance, k_limit):
        if k_limit < 1:
            raise ValueError("k_limit must be at least 1")
        self.instance = instance
        self.k_limit = k_limit
        self._batches = []  # (queries tuple, answers tuple) per round
        self._total = 0

    @property
    def rounds_used(self):
        return len(self._batches)

    @property
    def total_queries(self):
        return self._total

    @property
    def promised_rank(self):
        return self.instance.target_rank

    def _resolve(self, ref):
        if ref.__class__ is int:
            if not 1 <= ref <= self.instance.n:
                raise MalformedQuery("item index out of range: %r" % (ref,))
            return ref
        if ref == TARGET:
            ti = self.instance.target_index
            if ti is None:
                raise MalformedQuery("no promised element to refer to")
            return ti
        raise MalformedQuery("bad item reference: %r" % (ref,))

    def submit_round(self, queries):
        """Answer one batch; every answer is a function of the instance only."""
        if len(self._batches) >= self.k_limit:
            raise RoundLimitExceeded(
                "already used %d of %d rounds" % (len(self._batches), self.k_limit))
        queries = tuple(queries)
        inst = self.instance
        ranks = inst.ranks
        n = len(ranks)
        ti = inst.target_index
        answers = []
        append = answers.append
        for q in queries:
            if q.__class__ is RankQuery:
                item = q.item
                t = q.threshold
                if not (t.__class__ is int and 1 <= t <= n):
                    raise MalformedQuery("threshold out of range: %r" % (t,))
                if item.__class__ is int and 1 <= item <= n:
                    r = ranks[item - 1]
                elif item == TARGET and ti is not None:
                    r = ranks[ti - 1]
                else:
                    r = ranks[self._resolve(item) - 1]
                append(LESS if r < t else EQUAL if r == t else GREATER)
            elif q.__class__ is ComparisonQuery:
                if q.left == q.right:
                    raise MalformedQuery("comparison needs two distinct references")
                a = ranks[self._resolve(q.left) - 1]
                b = ranks[self._resolve(q.right) - 1]
                append(LESS if a < b else EQUAL if a == b else GREATER)
            else:
                raise MalformedQuery("unknown query type: %r" % (q,))
        answers = tuple(answers)
        self._batches.append((queries, answers))
        self._total += len(queries)
        return list(answers)

    def transcript(self):
        return build_transcript(self._batches, self.k_limit, self._total)


def open_session(instance, k_limit):
    """Start a fresh session over the instance; k_limit must be positive."""
    return OracleSession(instance, k_limit)


def binary_rank_le(instance, item, threshold):
    """The weaker query form: is rank(item) <= threshold?"""
    return instance.rank_of(item) <= threshold


def three_way_via_binary(instance, item, threshold):
    """Answer a three-way rank query from two binary probes (at threshold
    and threshold - 1)."""
    if binary_rank_le(instance, item, threshold - 1):
        return LESS
    if binary_rank_le(instance, item, threshold):
        return EQUAL
    return GREATER


def answers_consistent(transcript, instance):
    """Replay a transcript against an instance, checking every answer."""
    for batch in transcript.rounds:
        for q, a in batch:
            if q.__class__ is RankQuery:
                idx = instance.target_index if q.item == TARGET else q.item
                want = compare(instance.rank_of(idx), q.threshold)
            else:
                li = instance.target_index if q.left == TARGET else q.left
                ri = instance.target_index if q.right == TARGET else q.right
                want = compare(instance.rank_of(li), instance.rank_of(ri))
            if a != want:
                return False
    return True


def random_instance(n, rng, with_target=True):
    ranks = list(range(1, n + 1))
    rng.shuffle(ranks)
    target = rng.randrange(1, n + 1) if with_target else None
    return HiddenInstance(ranks=tuple(ranks), target_index=target)
