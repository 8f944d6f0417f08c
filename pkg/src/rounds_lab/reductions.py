"""Query translations between the search, sorting, and division models.

The two adapter views replay rank probes as single element comparisons, so
the search routines run against comparison oracles without touching their
logic or their query counts.

The valuation family behind sorting-by-division concentrates each agent's
mass in n + 1 narrow spikes whose positions are decided lazily, one rank
probe per new mark. Any division protocol that only ever cuts at multiples
of 1/n and ends proportional is thereby forced to reveal the hidden
ordering of the agents.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .cake import (Allocation, CakeSession, CutQuery, EvalQuery,
                   MalformedAllocation, PiecewiseDensity, verify_proportional)
from .oracle import (EQUAL, LESS, GREATER, ComparisonQuery, MalformedQuery,
                     RankQuery, TARGET, compare, flip)


class ProtocolNotPrimitive(Exception):
    pass


class NotProportional(Exception):
    pass


class SlotExhausted(Exception):
    pass


class LocateComparisonView:
    """Serves rank probes about the promised element via one comparison
    each; valid when the underlying array is sorted, where the element at
    position t is exactly the element of rank t."""

    def __init__(self, comparison_session):
        inst = comparison_session.instance
        if inst.ranks != tuple(range(1, inst.n + 1)):
            raise ValueError("the underlying array must be sorted")
        self.inner = comparison_session

    @property
    def k_limit(self):
        return self.inner.k_limit

    def submit_round(self, queries):
        batch = []
        for q in queries:
            if q.__class__ is not RankQuery or q.item != TARGET:
                raise MalformedQuery(
                    "this view only serves rank probes on the promised element")
            batch.append(ComparisonQuery(TARGET, q.threshold))
        return self.inner.submit_round(batch)

    def transcript(self):
        return self.inner.transcript()


def ordered_to_locate_adapter(comparison_session):
    """Rank-probe facade over a comparison oracle for a sorted array."""
    return LocateComparisonView(comparison_session)


class SelectComparisonView:
    """Serves rank probes at the promised rank by comparing each probed
    item against the promised element (answers arrive flipped, since the
    comparison reads the other way around)."""

    def __init__(self, comparison_session):
        self.inner = comparison_session

    @property
    def k_limit(self):
        return self.inner.k_limit

    @property
    def promised_rank(self):
        return self.inner.promised_rank

    def submit_round(self, queries):
        r = self.inner.promised_rank
        batch = []
        for q in queries:
            if q.__class__ is not RankQuery or q.threshold != r:
                raise MalformedQuery(
                    "this view only serves rank probes at the promised rank")
            batch.append(ComparisonQuery(TARGET, q.item))
        return [flip(a) for a in self.inner.submit_round(batch)]

    def transcript(self):
        return self.inner.transcript()


def unordered_to_select_adapter(comparison_session):
    """Rank-probe facade over a comparison oracle with a promised element."""
    return SelectComparisonView(comparison_session)


@dataclass
class AdversaryCakeInstance:
    """Spiky valuations pinned to fixed grids, revealed one mark at a time.

    Grid i holds the n points i/(n+1) + c*eps for c = 1..n. Agent p's i/n
    mark lands on a grid-i point chosen by her hidden position: strictly
    below i takes the lowest free point, strictly above takes the highest
    free point, and position i itself keeps the i-th point, which the other
    two rules can never consume first.
    """

    n: int
    pi: tuple = None  # hidden ranks by agent; optional until finalization
    epsilon: Fraction = None
    slots: dict = field(default_factory=dict)   # (agent, i) -> c
    used: dict = field(default_factory=dict)    # i -> set of taken c
    points: dict = field(default_factory=dict)  # grid point -> (agent, i)

    def __post_init__(self):
        if self.epsilon is None:
            self.epsilon = Fraction(1, self.n ** 4 + 1)
        if self.pi is not None:
            self.pi = tuple(self.pi)
            if sorted(self.pi) != list(range(1, self.n + 1)):
                raise ValueError("pi must be a permutation of 1..n")

    def grid_point(self, i, c):
        return Fraction(i, self.n + 1) + c * self.epsilon

    def grid(self, i):
        return [self.grid_point(i, c) for c in range(1, self.n + 1)]

    def take_slot(self, agent, i, relation):
        """Pin agent's i/n mark; relation says how her hidden position
        compares to i. Returns the grid point (idempotent per pair)."""
        key = (agent, i)
        if key in self.slots:
            return self.grid_point(i, self.slots[key])
        taken = self.used.setdefault(i, set())
        free = [c for c in range(1, self.n + 1) if c not in taken]
        if not free:
            raise SlotExhausted("grid %d has no free point" % (i,))
        if relation == EQUAL:
            c = i
            if c in taken:
                raise SlotExhausted(
                    "reserved point %d of grid %d already taken" % (c, i))
        elif relation == LESS:
            c = free[0]
        elif relation == GREATER:
            c = free[-1]
        else:
            raise ValueError("bad relation: %r" % (relation,))
        self.slots[key] = c
        taken.add(c)
        self.points[self.grid_point(i, c)] = key
        return self.grid_point(i, c)


def build_adversary_cake(n, pi):
    """Instance with a known hidden permutation, for direct simulation."""
    return AdversaryCakeInstance(n=n, pi=tuple(pi))


def instance_cut(inst, agent, i):
    """The mark revealed for a cut request at value i/n (needs pi)."""
    assert inst.pi is not None
    return inst.take_slot(agent, i, compare(inst.pi[agent - 1], i))


def materialize_all(inst):
    """Pin every remaining mark, grids in order, agents in id order."""
    for i in range(1, inst.n + 1):
        for agent in range(1, inst.n + 1):
            instance_cut(inst, agent, i)


def realized_density(inst, agent):
    """The exact step density matching every answer given to this agent.

    Mass i/(n*(n+1)) sits immediately left of her i/n mark and
    (n-i)/(n*(n+1)) immediately right, in strips of width eps/2; the value
    of [0, mark_i] is then exactly i/n.
    """
    assert inst.pi is not None
    n = inst.n
    half = inst.epsilon / 2
    unit = Fraction(1, n * (n + 1))
    marks = [Fraction(0)] + [instance_cut(inst, agent, i)
                             for i in range(1, n + 1)]
    bps = [Fraction(0)]
    hs = []
    for i, y in enumerate(marks):
        for lo, hi, mass in ((y - half, y, i * unit),
                             (y, y + half, (n - i) * unit)):
            if mass == 0:
                continue
            assert lo >= bps[-1]
            if lo > bps[-1]:
                bps.append(lo)
                hs.append(Fraction(0))
            bps.append(hi)
            hs.append(mass / half)
    if bps[-1] < 1:
        bps.append(Fraction(1))
        hs.append(Fraction(0))
    return PiecewiseDensity(breakpoints=tuple(bps), heights=tuple(hs))


class AdversaryCakeBackend:
    """Answers division queries by pinning spikes on demand, spending at
    most one rank probe per new mark. Each division batch turns into
    exactly one batch against the rank session, preserving the rounds."""

    def __init__(self, n, rank_session):
        self.inst = AdversaryCakeInstance(n=n)
        self.rank_session = rank_session

    def _grid_index(self, alpha):
        n = self.inst.n
        i = Fraction(alpha) * n
        if i.denominator != 1:
            raise ProtocolNotPrimitive(
                "cut argument %s is not a multiple of 1/%d" % (alpha, n))
        i = int(i)
        if not 0 <= i <= n:
            raise MalformedQuery("cut argument outside [0, 1]")
        return i

    def answer_batch(self, queries):
        inst = self.inst
        wanted = []  # (agent, i) pairs needing a probe, first appearance
        seen = set()
        infos = []
        for q in queries:
            if q.__class__ is CutQuery:
                i = self._grid_index(q.alpha)
                infos.append(("cut", q.agent, i, None))
                key = (q.agent, i)
                if i >= 1 and key not in inst.slots and key not in seen:
                    seen.add(key)
                    wanted.append(key)
            elif q.__class__ is EvalQuery:
                y = Fraction(q.y)
                if y == 0 or y == 1:
                    infos.append(("edge", q.agent, None, y))
                    continue
                ref = inst.points.get(y)
                if ref is None:
                    raise MalformedQuery(
                        "eval at a point that is not a previous cut: %s" % (y,))
                _, i = ref
                infos.append(("eval", q.agent, i, y))
                key = (q.agent, i)
                if key not in inst.slots and key not in seen:
                    seen.add(key)
                    wanted.append(key)
            else:
                raise MalformedQuery("unknown division query: %r" % (q,))
        probe_answers = self.rank_session.submit_round(
            [RankQuery(agent, i) for agent, i in wanted])
        relations = dict(zip(wanted, probe_answers))
        out = []
        for kind, agent, i, y in infos:
            if kind == "edge":
                out.append(Fraction(0) if y == 0 else Fraction(1))
            elif kind == "cut":
                if i == 0:
                    out.append(Fraction(0))
                else:
                    out.append(self._point(agent, i, relations))
            else:
                own = self._point(agent, i, relations)
                if own == y:
                    out.append(Fraction(i, inst.n))
                elif own > y:
                    out.append(Fraction(i, inst.n + 1))
                else:
                    out.append(Fraction(i + 1, inst.n + 1))
        return out

    def _point(self, agent, i, relations):
        key = (agent, i)
        if key in self.inst.slots:
            return self.inst.grid_point(i, self.inst.slots[key])
        return self.inst.take_slot(agent, i, relations[key])


def recover_permutation(allocation, instance):
    """Ranks implied by slice order: the agent holding the i-th slice sits
    at hidden position i. Boundary i must land on grid i."""
    n = instance.n
    if len(allocation.pieces) != n:
        raise MalformedAllocation("expected %d slices" % (n,))
    for i in range(1, n):
        y = allocation.pieces[i - 1][1]
        c = (y - Fraction(i, n + 1)) / instance.epsilon
        if c.denominator != 1 or not 1 <= c <= n:
            raise NotProportional("slice boundary %s sits off grid %d" % (y, i))
    ranks = [None] * n
    for position, agent in enumerate(allocation.owners, start=1):
        ranks[agent - 1] = position
    if sorted(ranks) != list(range(1, n + 1)):
        raise MalformedAllocation("owners are not a permutation")
    return tuple(ranks)


def run_reduction(cake_protocol, n, rank_session):
    """Drive a division protocol against the lazy spiky valuations.

    cake_protocol is a callable (session, n) -> Allocation. Returns the
    recovered ranks plus the division transcript and allocation so callers
    can audit the costs. Raises ProtocolNotPrimitive for off-grid cuts and
    NotProportional when some agent ends up short of 1/n."""
    backend = AdversaryCakeBackend(n, rank_session)
    session = CakeSession(backend, rank_session.k_limit)
    allocation = cake_protocol(session, n)
    inst = backend.inst
    inst.pi = tuple(rank_session.instance.ranks)  # fill the rest consistently
    agents = [realized_density(inst, p) for p in range(1, n + 1)]
    ok, _ = verify_proportional(allocation, agents)
    if not ok:
        raise NotProportional("the allocation undervalues some agent")
    return recover_permutation(allocation, inst), session.transcript(), allocation


def sort_via_cake(cake_protocol, n, rank_session):
    """Sort the hidden permutation by running a division protocol against
    the lazy spiky valuations; returns the recovered ranks by agent."""
    ranks, _, _ = run_reduction(cake_protocol, n, rank_session)
    return ranks
