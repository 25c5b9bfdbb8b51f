import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from multistop.asymptotics import iid_from_odds, secretary_sequence
from multistop.errors import BudgetExceededError, InvalidInputError
from multistop.optimizer import optimal, optimal_dp, optimal_exhaustive, optimal_ola
from multistop.oracle import random_sequence
from multistop.strategy import OddsSequence, ThresholdVector, win_probability

HALF = Fraction(1, 2)


def test_exhaustive_examples():
    res = optimal_exhaustive(OddsSequence((HALF, HALF)), 1)
    assert res.value == HALF and res.thresholds == ThresholdVector((2,))
    assert optimal_exhaustive(OddsSequence((HALF,) * 3), 2).value == Fraction(3, 4)
    assert optimal_exhaustive(OddsSequence((HALF,) * 3), 3).value == Fraction(7, 8)


def test_exhaustive_tie_break_is_lexicographically_largest():
    seq = OddsSequence((HALF,) * 3)
    res = optimal_exhaustive(seq, 2)
    best = [
        (a, b) for a in range(1, 4) for b in range(a, 4)
        if win_probability(seq, ThresholdVector((a, b))) == res.value
    ]
    assert res.thresholds == ThresholdVector(max(best))


def test_exhaustive_budget():
    seq = OddsSequence((HALF,) * 30)
    with pytest.raises(BudgetExceededError):
        optimal_exhaustive(seq, 3, budget=100)


def test_dp_examples():
    assert optimal_dp(OddsSequence((HALF,) * 3), 2).value == Fraction(3, 4)
    assert optimal_dp(OddsSequence((Fraction(2, 7),)), 1).value == Fraction(2, 7)
    assert optimal_dp(OddsSequence((HALF,) * 3), 1).value == HALF
    with pytest.raises(InvalidInputError):
        optimal_dp(OddsSequence((HALF,)), 0)


def test_ola_sum_the_odds_example():
    res = optimal_ola(iid_from_odds(1, 2), 1)
    assert res.thresholds == ThresholdVector((2,))


def _odds_threshold(seq):
    # Largest label whose tail odds sum reaches 1, else the first label.
    tail = Fraction(0)
    for i in range(seq.last, seq.first - 1, -1):
        tail += seq.r[i - seq.offset]
        if tail >= 1:
            return i
    return seq.first


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 30))
def test_ola_single_threshold_is_odds_theorem(seed, n):
    seq = random_sequence(random.Random(seed), n)
    assert optimal_ola(seq, 1).thresholds.threshold(1) == _odds_threshold(seq)


def test_three_routes_agree_on_random_instances():
    rng = random.Random(20240917)
    for _ in range(120):
        n, m = rng.randint(1, 12), rng.randint(1, 3)
        seq = random_sequence(rng, n)
        dp = optimal_dp(seq, m).value
        assert optimal_exhaustive(seq, m).value == dp
        assert optimal_ola(seq, m).value == dp


@pytest.mark.parametrize("n", range(1, 9))
def test_three_routes_agree_on_ties(n):
    seq = OddsSequence((HALF,) * n)
    for m in range(1, 4):
        dp = optimal_dp(seq, m).value
        assert optimal_exhaustive(seq, m).value == dp == optimal_ola(seq, m).value


def test_ola_matches_dp_for_more_stoppings():
    rng = random.Random(7)
    for _ in range(25):
        seq = random_sequence(rng, rng.randint(4, 10))
        for m in (4, 5):
            assert optimal_ola(seq, m).value == optimal_dp(seq, m).value


def test_value_nondecreasing_in_m_and_saturates():
    rng = random.Random(3)
    for _ in range(20):
        seq = random_sequence(rng, rng.randint(1, 7))
        values = [optimal_dp(seq, m).value for m in range(1, seq.n + 2)]
        assert all(a <= b for a, b in zip(values, values[1:]))
        everything = 1 - math.prod(seq.q)
        assert values[seq.n - 1] == everything == values[-1]


def _unimodal(values):
    i = 0
    while i + 1 < len(values) and values[i] <= values[i + 1]:
        i += 1
    return all(a >= b for a, b in zip(values[i:], values[i + 1:]))


def test_unimodality_in_outer_threshold():
    rng = random.Random(11)
    for _ in range(40):
        seq = random_sequence(rng, rng.randint(2, 10))
        m = rng.randint(1, 3)
        inner = optimal_ola(seq, m).thresholds.thresholds[1:] if m > 1 else ()
        top = inner[0] if inner else seq.last
        values = [win_probability(seq, ThresholdVector((i,) + inner)) for i in range(1, top + 1)]
        assert _unimodal(values)


def test_secretary_single_threshold_near_one_over_e():
    res = optimal_ola(secretary_sequence(100), 1)
    assert abs(res.thresholds.threshold(1) / 100 - math.exp(-1)) < 0.05


def test_float_path_matches_exact_thresholds():
    for n in (50, 200):
        seq = secretary_sequence(n)
        for m in (1, 2, 3):
            a, b = optimal_ola(seq, m), optimal_ola(seq, m, exact=False)
            assert a.thresholds == b.thresholds
            assert abs(float(a.value) - b.value) < 1e-12


def test_dispatch():
    seq = OddsSequence((HALF,) * 3)
    for method in ("exhaustive", "dp", "ola"):
        assert optimal(seq, 2, method).value == Fraction(3, 4)
    with pytest.raises(InvalidInputError):
        optimal(seq, 2, "magic")
