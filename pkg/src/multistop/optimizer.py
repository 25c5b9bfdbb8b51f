"""Optimal multiple-stopping strategies.

Three routes to the optimum: exhaustive search over monotone threshold
vectors, backward induction over the full strategy space, and a one-stage
look-ahead scan that places each threshold in a single pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional

from .errors import BudgetExceededError, InvalidInputError
from .patterns import enumerate_xi
from .strategy import OddsSequence, ThresholdVector, elementary_symmetric, win_probability

#: Default cap on the number of threshold vectors tried by exhaustive search.
EXHAUSTIVE_BUDGET = 20_000

METHODS = ("exhaustive", "dp", "ola")


@dataclass(frozen=True)
class OptimalResult:
    value: object  # Fraction, or float on the fast path
    thresholds: Optional[ThresholdVector]
    method: str

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise AssertionError(f"win probability {self.value} outside [0, 1]")


def _check_m(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise InvalidInputError(f"m must be a positive integer, got {m!r}")


def optimal_exhaustive(
    seq: OddsSequence, m: int, budget: int = EXHAUSTIVE_BUDGET
) -> OptimalResult:
    """Best monotone threshold vector by trying all of them.

    Among maximizers the lexicographically largest vector is returned.
    """
    _check_m(m)
    count = math.comb(seq.n + m - 1, m)
    if count > budget:
        raise BudgetExceededError(
            f"exhaustive search over {count} threshold vectors exceeds budget {budget}"
        )
    best_value = None
    best = None
    # Vectors arrive in increasing lexicographic order, so ">=" keeps the largest maximizer.
    for t in combinations_with_replacement(seq.labels(), m):
        tv = ThresholdVector(t)
        value = win_probability(seq, tv)
        if best_value is None or value >= best_value:
            best_value, best = value, tv
    return OptimalResult(best_value, best, "exhaustive")


def optimal_dp(seq: OddsSequence, m: int) -> OptimalResult:
    """Optimal value over all stopping strategies by backward induction.

    State ``(s, h)``: ``s`` selections left, ``h = 1`` when the latest
    selection is still the last success seen.  Value only.
    """
    _check_m(m)
    # v[s][h] at position i+1; terminal value is h.
    v = [[Fraction(0), Fraction(1)] for _ in range(m + 1)]
    for p, q in zip(reversed(seq.p), reversed(seq.q)):
        nxt = []
        for s in range(m + 1):
            take = v[s - 1][1] if s > 0 else Fraction(0)
            on_success = max(v[s][0], take)
            nxt.append([q * v[s][0] + p * on_success, q * v[s][1] + p * on_success])
        v = nxt
    return OptimalResult(v[m][0], None, "dp")


def _tail_pattern_sum(k: int, esp: list):
    """Sum over non-unit minimal patterns of length ``k`` of the inner-block products.

    ``esp[j-1]`` holds the elementary symmetric values of block ``B_j``.
    """
    total = 0
    unit = (1,) + (0,) * (k - 1)
    for b in enumerate_xi(k).vectors:
        if b == unit:
            continue
        term = 1
        # b[0] = b_k is zero here; b[pos] is b_{k-pos}.
        for pos in range(1, k):
            count = b[pos]
            if count:
                term *= esp[k - pos - 1][count]
                if not term:
                    break
        total += term
    return total


def optimal_ola(seq: OddsSequence, m: int, exact: bool = True) -> OptimalResult:
    """Thresholds by one-stage look-ahead, innermost first.

    With inner thresholds ``i^(1), ..., i^(k-1)`` fixed, lowering ``i^(k)``
    from ``i`` to ``i-1`` changes the win probability by a positive multiple
    of

        D(i) = 1 - S_k - (r_i + ... + r_{i^(k-1) - 1}),

    where ``S_k`` sums the inner-block products over the non-unit minimal
    patterns of length ``k``.  ``D`` increases with ``i``, so the best
    ``i^(k)`` is the largest ``i`` with ``D(i) <= 0`` (or the first label if
    there is none).  Taking the largest such ``i`` breaks ties toward later
    thresholds.
    """
    _check_m(m)
    off = seq.offset
    if exact:
        r = seq.r
        one = Fraction(1)
    else:
        r = seq.r_float
        one = 1.0
    thresholds: list = []  # innermost first: i^(1), i^(2), ...
    esp: list = []  # esp[j-1] for block B_j of the inner thresholds
    upper = seq.last + 1  # i^(0)
    for k in range(1, m + 1):
        s_k = _tail_pattern_sum(k, esp) if k > 1 else 0
        start = min(upper, seq.last)
        # D(start): the odds between start and i^(k-1) - 1.
        d = one - s_k - _fsum(r[start - off:upper - off], exact)
        i = start
        comp = 0.0
        while d > 0 and i > seq.first:
            i -= 1
            if exact:
                d -= r[i - off]
            else:
                # Kahan step keeps long odds runs accurate.
                y = -r[i - off] - comp
                tmp = d + y
                comp = (tmp - d) - y
                d = tmp
        thresholds.append(i)
        if k < m:
            block = r[i - off:upper - off]
            # Block B_k is fixed now; patterns of length up to m need degree m.
            esp.append(elementary_symmetric(block, m))
        upper = i
    tv = ThresholdVector(tuple(reversed(thresholds)))
    return OptimalResult(win_probability(seq, tv, exact=exact), tv, "ola")


def _fsum(values, exact: bool):
    if exact:
        return sum(values, Fraction(0))
    return math.fsum(values)


def optimal(seq: OddsSequence, m: int, method: str = "ola", **kwargs) -> OptimalResult:
    if method == "exhaustive":
        return optimal_exhaustive(seq, m, **kwargs)
    if method == "dp":
        return optimal_dp(seq, m)
    if method == "ola":
        return optimal_ola(seq, m, **kwargs)
    raise InvalidInputError(f"unknown method {method!r}; expected one of {METHODS}")
