from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from plisskit.errors import BadOrdering, EmptySequence
from plisskit.pliss import PlissParams, density_bound, pliss, pliss_oracle, pliss_times

int_seqs = st.lists(st.integers(-8, 8), min_size=1, max_size=60)
# dyadic thresholds keep every partial sum exact
dyadic = st.integers(-32, 32).map(lambda k: k / 4)


def test_worked_example():
    assert pliss_times([-1, -1, 1, -1], 0.0).tolist() == [0, 1, 3]
    assert pliss_oracle([-1, -1, 1, -1], 0.0).tolist() == [0, 1, 3]
    assert oracles.pliss_brute([-1, -1, 1, -1], 0.0) == [0, 1, 3]


def test_boundary_is_inclusive():
    assert pliss_times([0.5, 0.5], 0.5).tolist() == [0, 1]
    assert pliss_times([1.0], 0.5).size == 0


def test_errors():
    with pytest.raises(EmptySequence):
        pliss_times([], 0.0)
    with pytest.raises(EmptySequence):
        pliss_oracle(np.zeros((2, 2)), 0.0)
    with pytest.raises(BadOrdering):
        PlissParams(0.0, 0.0, 1.0)
    with pytest.raises(BadOrdering):
        PlissParams(0.0, 2.0, 1.0)
    assert issubclass(EmptySequence, ValueError)


def test_density_bound_and_result():
    prm = PlissParams(-1.0, 0.0, 1.0)
    assert density_bound(prm) == 0.5
    res = pliss([-1, -1, 1, -1], PlissParams(-1.0, -0.5, 0.0))
    assert res.times.tolist() == [0, 1, 3]
    assert res.density == 0.75
    assert res.bound == 0.5


@given(int_seqs, dyadic)
def test_fast_matches_both_oracles_on_exact_data(seq, a3):
    fast = pliss_times(seq, a3).tolist()
    assert fast == pliss_oracle(seq, a3).tolist()
    assert fast == oracles.pliss_brute(seq, a3)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=80), st.floats(-5, 5))
def test_fast_matches_pair_oracle_on_floats(seq, a3):
    assert pliss_times(seq, a3).tolist() == pliss_oracle(seq, a3).tolist()


@given(int_seqs, dyadic, st.integers(-5, 5))
def test_shift_coherence(seq, a3, c):
    shifted = [v + c for v in seq]
    assert pliss_times(shifted, a3 + c).tolist() == pliss_times(seq, a3).tolist()


@given(int_seqs, dyadic, dyadic)
def test_monotone_in_threshold(seq, a, b):
    lo, hi = min(a, b), max(a, b)
    assert set(pliss_times(seq, lo).tolist()) <= set(pliss_times(seq, hi).tolist())


@given(int_seqs, dyadic)
def test_last_index_rule(seq, a3):
    # the last index is a Pliss time exactly when the last term is at most alpha3
    assert ((len(seq) - 1) in pliss_times(seq, a3).tolist()) == (seq[-1] <= a3)


@settings(max_examples=300)
@given(
    st.integers(-4, 0),
    st.integers(1, 4),
    st.integers(1, 4),
    st.lists(st.integers(0, 12), min_size=1, max_size=80),
)
def test_density_exact_on_integer_data(a1, gap2, gap3, raw):
    a2, a3 = a1 + gap2, a1 + gap2 + gap3
    # clip to keep the mean at most a2 while every term stays >= a1
    seq = [a1 + r for r in raw]
    while sum(seq) > a2 * len(seq):
        i = int(np.argmax(seq))
        seq[i] -= 1
    assert min(seq) >= a1
    times = pliss_times(seq, a3)
    # the bound holds without any 1/len slack on exact data
    assert times.size * (a3 - a1) >= (a3 - a2) * len(seq)
