import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rounds_lab.cake import (Allocation, MalformedAllocation, PiecewiseDensity,
                             assign_subcakes, cut_query, eval_query,
                             format_cake_file, group_sizes, parse_cake_file,
                             proportional_protocol, random_density,
                             verify_proportional)

UNIFORM = PiecewiseDensity((0, 1), (1,))


def F(x):
    return Fraction(x)


def test_density_validation():
    with pytest.raises(ValueError):
        PiecewiseDensity((0, F("1/2")), (2,))  # does not span [0, 1]
    with pytest.raises(ValueError):
        PiecewiseDensity((0, F("1/2"), 1), (3, -1))  # negative height
    with pytest.raises(ValueError):
        PiecewiseDensity((0, 1), (2,))  # mass 2
    with pytest.raises(ValueError):
        PiecewiseDensity((0, F("1/2"), F("1/2"), 1), (1, 0, 1))


def test_eval_and_cut():
    d = PiecewiseDensity((0, F("1/4"), F("3/4"), 1), (2, 0, 2))
    assert eval_query(d, F("1/8")) == F("1/4")
    assert eval_query(d, F("1/2")) == F("1/2")
    assert cut_query(d, 0) == 0
    assert cut_query(d, F("1/2")) == F("1/4")  # leftmost point over the plateau
    assert cut_query(d, F("3/4")) == F("7/8")
    assert cut_query(d, 1) == 1


@given(st.integers(min_value=0, max_value=10 ** 6), st.data())
def test_cut_inverts_eval(seed, data):
    d = random_density(random.Random(seed))
    alpha = data.draw(st.fractions(min_value=0, max_value=1, max_denominator=48))
    y = d.cut(alpha)
    assert 0 <= y <= 1
    assert d.prefix(y) == alpha


def test_group_sizes():
    assert group_sizes(10, 3) == [4, 3, 3]
    assert group_sizes(9, 3) == [3, 3, 3]
    assert group_sizes(5, 5) == [1, 1, 1, 1, 1]


def test_assign_subcakes_order_statistics():
    marks = {1: [F("1/2")], 2: [F("1/4")], 3: [F("3/4")], 4: [F("1/4")]}
    cuts, groups = assign_subcakes(marks, [2, 2])
    assert cuts == [F("1/4")]  # ties break toward the lower agent id
    assert groups == [[2, 4], [1, 3]]


def check_protocol(agents, k):
    allocation, tr = proportional_protocol(agents, k)
    ok, values = verify_proportional(allocation, agents)
    n = len(agents)
    assert ok, values
    assert len(tr.rounds) <= k
    assert tr.total_queries <= k * n ** (1 + 1 / k) + k * n
    return allocation, tr


def test_uniform_agents_get_equal_slices():
    n = 6
    allocation, _ = check_protocol([UNIFORM] * n, 2)
    assert allocation.pieces == tuple(
        (F(i) / n, F(i + 1) / n) for i in range(n))
    assert sorted(allocation.owners) == list(range(1, n + 1))


def test_single_agent_takes_everything():
    allocation, tr = check_protocol([UNIFORM], 3)
    assert allocation.pieces == ((F(0), F(1)),)
    assert tr.total_queries == 0


@settings(deadline=None, max_examples=60)
@given(st.integers(min_value=2, max_value=24), st.integers(min_value=1, max_value=4),
       st.integers(min_value=0, max_value=10 ** 6))
def test_protocol_is_proportional(n, k, seed):
    rng = random.Random(seed)
    check_protocol([random_density(rng) for _ in range(n)], k)


def test_identical_agents_tie_break_by_id():
    """With everyone marking the same points, slices follow agent ids."""
    n = 9
    allocation, tr = check_protocol([UNIFORM] * n, 2)
    assert allocation.owners == tuple(range(1, n + 1))
    first = tr.rounds[0]
    agent_one = [(q.agent, q.alpha) for q, _ in first if q.agent == 1]
    assert [alpha for _, alpha in agent_one] == [F("1/3"), F("2/3")]


def test_round_one_marks_scale():
    n, k = 1000, 3
    agents = [UNIFORM] * n
    allocation, tr = check_protocol(agents, k)
    first_agent = [q.alpha for q, _ in tr.rounds[0] if q.agent == 1]
    assert first_agent == [Fraction(j, 10) for j in range(1, 10)]
    second = [q.alpha for q, _ in tr.rounds[1] if q.agent == 101]
    assert second == [Fraction(j, 100) for j in range(11, 20)]
    assert len(tr.rounds) == k


def test_proportional_verifier_rejects_junk():
    agents = [UNIFORM, UNIFORM]
    with pytest.raises(MalformedAllocation):
        verify_proportional(Allocation(((F(0), F(1)),), (1,)), agents)
    with pytest.raises(MalformedAllocation):
        verify_proportional(
            Allocation(((F(0), F("1/3")), (F("1/2"), F(1))), (1, 2)), agents)
    ok, values = verify_proportional(
        Allocation(((F(0), F("1/4")), (F("1/4"), F(1))), (1, 2)), agents)
    assert not ok and values == [F("1/4"), F("3/4")]


def test_cake_file_round_trip():
    rng = random.Random(11)
    agents = [random_density(rng) for _ in range(7)]
    text = format_cake_file(agents)
    assert parse_cake_file(text) == agents
    assert parse_cake_file("# comment\n\n0 1 1\n") == [UNIFORM]


def test_cake_file_rejects_garbage():
    with pytest.raises(ValueError):
        parse_cake_file("0 1\n")
    with pytest.raises(ValueError):
        parse_cake_file("0 x 1\n")
    with pytest.raises(ValueError):
        parse_cake_file("0 2 1\n")  # mass 2
