"""The constants lambda_1..lambda_m and the asymptotic lower bound they define.

``lambda`` is the unique positive solution of the equality system

    sum over minimal winning patterns b of length k of
        prod_j lambda_j^{b_j} / b_j!  = 1,              k = 1..m.

Two solvers are provided.  :func:`solve_lambda_dp` sums weighted lattice
paths and never lists a pattern; :func:`solve_lambda_naive` solves each
equality directly over the enumerated pattern set and exists as a
cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import factorial
from typing import Optional

from .errors import BudgetExceededError, InvalidInputError
from .numerics import GUARD_DIGITS, decimal_to_string, exp_neg
from .patterns import MAX_K, _check_k, enumerate_xi

#: Largest m solved in exact rational arithmetic without an explicit precision.
EXACT_MAX_M = 20


@dataclass(frozen=True)
class LambdaSolution:
    m: int
    lam: tuple  # Fractions, or Decimals when solved at finite precision
    cumsum: tuple
    # gamma[k][c] for 0 <= k <= c <= m; entries with c < k are None.
    gamma: tuple = ()
    operations: int = 0

    def __post_init__(self):
        if len(self.lam) != self.m or len(self.cumsum) != self.m:
            raise InvalidInputError("lambda and cumsum must both have m entries")

    def gamma_at(self, k: int, c: int) -> Fraction:
        if not self.gamma:
            raise InvalidInputError("this solution carries no gamma table")
        if not 0 <= k <= c <= self.m:
            raise InvalidInputError(f"gamma({k},{c}) is not a vertex of the path graph")
        return self.gamma[k][c]


def _cumsum(values, zero=Fraction(0)) -> tuple:
    out = []
    s = zero
    for v in values:
        s += v
        out.append(s)
    return tuple(out)


def solve_lambda_dp(m: int, precision: Optional[int] = None) -> LambdaSolution:
    """Lambdas by the lattice-path recurrence in O(m^3) arithmetic operations.

    ``gamma(k, c)`` is the total weight of paths from ``(k, c)`` to ``(0, 0)``
    where a step ``(k, c) -> (k-1, c')`` weighs ``lambda_k^(c-c') / (c-c')!``.
    With ``gamma(0, 0) = 1`` and ``gamma(0, c) = 0`` otherwise,

        gamma(k, c) = sum_{c' = k-1}^{c} lambda_k^(c-c') / (c-c')! * gamma(k-1, c'),

    and ``gamma(k, k) = 1`` forces ``lambda_k = 1 - gamma(k-1, k)``.  The
    step weights ``lambda^d / d!`` are built incrementally from ``d - 1``.

    By default the arithmetic is exact.  The bit length of exact lambdas
    roughly doubles with every step of ``m``, so beyond ``EXACT_MAX_M`` a
    ``precision`` (significant decimal digits) must be given; the same
    recurrence then runs in :class:`decimal.Decimal` arithmetic.
    """
    if not isinstance(m, int) or m < 1:
        raise InvalidInputError(f"m must be a positive integer, got {m!r}")
    if precision is None:
        if m > EXACT_MAX_M:
            raise BudgetExceededError(
                f"exact lambdas for m={m} exceed the budget m <= {EXACT_MAX_M}; "
                "pass a decimal precision instead"
            )
        return _solve_dp(m, Fraction)
    if precision < 10:
        raise InvalidInputError(f"precision must be at least 10 digits, got {precision}")
    with localcontext() as ctx:
        ctx.prec = precision
        return _solve_dp(m, Decimal)


def _solve_dp(m: int, num) -> LambdaSolution:
    one, zero = num(1), num(0)
    ops = 0
    gamma = [[None] * (m + 1) for _ in range(m + 1)]
    gamma[0][0] = one
    for c in range(1, m + 1):
        gamma[0][c] = zero
    lam = []
    for k in range(1, m + 1):
        lam_k = one - gamma[k - 1][k] if k > 1 else one
        ops += 1
        lam.append(lam_k)
        weights = [one]
        for d in range(1, m - k + 2):
            weights.append(weights[-1] * lam_k / d)
            ops += 2
        for c in range(k, m + 1):
            acc = zero
            for c_prev in range(k - 1, c + 1):
                acc += weights[c - c_prev] * gamma[k - 1][c_prev]
                ops += 2
            gamma[k][c] = acc
        if num is Fraction and gamma[k][k] != 1:
            raise AssertionError(f"gamma({k},{k}) = {gamma[k][k]} instead of 1")
    return LambdaSolution(
        m,
        tuple(lam),
        _cumsum(lam, zero),
        tuple(tuple(row) for row in gamma),
        ops,
    )


def pattern_weight(b, lam) -> Fraction:
    """``prod_j lambda_j^{b_j} / b_j!`` for ``b = (b_k, ..., b_1)``."""
    k = len(b)
    w = Fraction(1)
    for pos, count in enumerate(b):
        if count:
            w *= lam[k - pos - 1] ** count / factorial(count)
    return w


def equality_residuals(lam) -> list:
    """Left-hand side of each equality ``k = 1..len(lam)``; all equal 1 at the solution."""
    return [
        sum((pattern_weight(b, lam) for b in enumerate_xi(k).vectors), Fraction(0))
        for k in range(1, len(lam) + 1)
    ]


def solve_lambda_naive(m: int) -> LambdaSolution:
    """Solve the equalities one at a time over enumerated pattern sets.

    The unit vector ``(1, 0, ..., 0)`` is the only member of the length-``k``
    set with ``b_k > 0``, so the ``k``-th equality reads
    ``lambda_k + (terms in lambda_1..lambda_{k-1}) = 1``.
    """
    if not isinstance(m, int) or m < 1:
        raise InvalidInputError(f"m must be a positive integer, got {m!r}")
    _check_k(m, MAX_K)
    lam: list = []
    for k in range(1, m + 1):
        unit = (1,) + (0,) * (k - 1)
        rest = Fraction(0)
        for b in enumerate_xi(k).vectors:
            if b == unit:
                continue
            if b[0] != 0:
                raise AssertionError(f"pattern {b} breaks linearity in lambda_{k}")
            # b_k = 0, so lambda_k does not enter.
            rest += pattern_weight(b[1:], lam)
        lam.append(1 - rest)
    return LambdaSolution(m, tuple(lam), _cumsum(lam))


def cumulative_lambda(sol: LambdaSolution, k: int) -> Fraction:
    if not 1 <= k <= sol.m:
        raise InvalidInputError(f"index k={k} outside 1..{sol.m}")
    return sol.cumsum[k - 1]


@dataclass(frozen=True)
class LowerBound:
    digits: int
    terms: tuple  # Decimal values carrying guard digits
    total: Decimal

    @property
    def term_strings(self) -> list:
        return [decimal_to_string(t, self.digits, "floor") for t in self.terms]

    @property
    def total_string(self) -> str:
        return decimal_to_string(self.total, self.digits, "floor")


def lower_bound(sol: LambdaSolution, digits: int = 10) -> LowerBound:
    """``sum_k exp(-(lambda_1 + ... + lambda_k))`` and its individual terms.

    Terms are evaluated with guard digits and summed before any rounding.
    Rendered values round toward zero, so a printed bound never exceeds the
    true one.
    """
    if digits < 1:
        raise InvalidInputError(f"digits must be >= 1, got {digits}")
    # Each term needs headroom for the m-fold accumulation of its error.
    work = digits + len(str(sol.m))
    terms = tuple(exp_neg(Fraction(c), work) for c in sol.cumsum)
    with localcontext() as ctx:
        ctx.prec = work + GUARD_DIGITS + len(str(sol.m)) + 5
        total = sum(terms, Decimal(0))
    return LowerBound(digits, terms, total)
