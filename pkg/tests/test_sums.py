import itertools
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from postselect_squeeze import UnsupportedOrder
from postselect_squeeze.sums import distinct_product_sum, set_partitions


def naive(factors):
    n = len(factors[0])
    total = 0j
    for idx in itertools.permutations(range(n), len(factors)):
        term = 1 + 0j
        for f, i in zip(factors, idx):
            term *= f[i]
        total += term
    return total


@pytest.mark.parametrize("m, bell", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15)])
def test_partition_counts(m, bell):
    parts = list(set_partitions(range(m)))
    assert len(parts) == bell
    for p in parts:
        assert sorted(x for b in p for x in b) == list(range(m))


def test_ones_count_arrangements():
    for m in range(1, 5):
        assert distinct_product_sum([np.ones(7)] * m) == pytest.approx(factorial(7) / factorial(7 - m))


def test_too_few_indices_is_zero():
    assert distinct_product_sum([np.ones(2)] * 3) == 0


def test_order_limit_and_shapes():
    with pytest.raises(UnsupportedOrder):
        distinct_product_sum([np.ones(6)] * 5)
    with pytest.raises(ValueError):
        distinct_product_sum([np.ones(4), np.ones(5)])


complex_entries = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(4, 7), st.data())
def test_matches_naive(m, n, data):
    factors = [np.array(data.draw(st.lists(complex_entries, min_size=n, max_size=n))) for _ in range(m)]
    ref = naive(factors)
    scale = np.prod([np.abs(f).sum() for f in factors]) + 1.0
    assert abs(distinct_product_sum(factors) - ref) <= 1e-12 * scale
