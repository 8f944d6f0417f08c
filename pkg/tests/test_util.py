from fractions import Fraction
import math
import random

import pytest
from hypothesis import given, strategies as st

from rounds_lab.util import (bernoulli, ceil_div, ceil_kth_root, ceil_log2,
                             normalized_weights)


@given(st.integers(min_value=0, max_value=10 ** 9),
       st.integers(min_value=1, max_value=10 ** 6))
def test_ceil_div_matches_math(a, b):
    assert ceil_div(a, b) == math.ceil(Fraction(a, b))


@given(st.integers(min_value=1, max_value=10 ** 12),
       st.integers(min_value=1, max_value=40))
def test_ceil_kth_root_is_tight(n, k):
    r = ceil_kth_root(n, k)
    assert r ** k >= n
    assert r == 1 or (r - 1) ** k < n


def test_ceil_kth_root_known():
    assert ceil_kth_root(16, 2) == 4
    assert ceil_kth_root(17, 2) == 5
    assert ceil_kth_root(1000, 3) == 10
    assert ceil_kth_root(1001, 3) == 11
    assert ceil_kth_root(1, 7) == 1


@given(st.integers(min_value=1, max_value=10 ** 9))
def test_ceil_log2(n):
    assert 2 ** ceil_log2(n) >= n
    assert ceil_log2(n) == 0 or 2 ** (ceil_log2(n) - 1) < n


def test_bernoulli_edges():
    rng = random.Random(0)
    assert all(bernoulli(Fraction(1), rng) for _ in range(50))
    assert not any(bernoulli(Fraction(0), rng) for _ in range(50))


def test_bernoulli_rate():
    rng = random.Random(123)
    hits = sum(bernoulli(Fraction(1, 4), rng) for _ in range(40000))
    assert abs(hits / 40000 - 0.25) < 0.01


def test_normalized_weights_rejects_bad():
    with pytest.raises(ValueError):
        normalized_weights([Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(ValueError):
        normalized_weights([Fraction(3, 2), Fraction(-1, 2)])
    ws = normalized_weights(["1/2", "1/2"])
    assert ws == (Fraction(1, 2), Fraction(1, 2))
