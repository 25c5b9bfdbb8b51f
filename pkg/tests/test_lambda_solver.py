from decimal import Decimal
from fractions import Fraction

import pytest

from multistop.errors import BudgetExceededError, InvalidInputError
from multistop.lambda_solver import (
    EXACT_MAX_M,
    cumulative_lambda,
    equality_residuals,
    lower_bound,
    pattern_weight,
    solve_lambda_dp,
    solve_lambda_naive,
)
from multistop.numerics import rat_to_decimal
from reference_values import (
    CUMSUM_DECIMAL6,
    CUMSUM_EXACT,
    LAMBDA_DECIMAL6,
    LAMBDA_EXACT,
    LOWER_BOUND10,
)


@pytest.fixture(scope="module")
def sol10():
    return solve_lambda_dp(10)


def test_table_lambda_exact(sol10):
    for k, value in LAMBDA_EXACT.items():
        assert sol10.lam[k - 1] == value


def test_table_lambda_decimal(sol10):
    for k, text in LAMBDA_DECIMAL6.items():
        assert rat_to_decimal(sol10.lam[k - 1], 6) == text


def test_table_cumsum(sol10):
    for k, value in CUMSUM_EXACT.items():
        assert cumulative_lambda(sol10, k) == value
        assert rat_to_decimal(value, 6) == CUMSUM_DECIMAL6[k]


def test_cumulative_lambda_range(sol10):
    with pytest.raises(InvalidInputError):
        cumulative_lambda(sol10, 0)
    with pytest.raises(InvalidInputError):
        cumulative_lambda(sol10, 11)


@pytest.mark.parametrize("m", range(1, 11))
def test_lower_bound_table(m):
    lb = lower_bound(solve_lambda_dp(m), 10)
    assert lb.total_string == LOWER_BOUND10[m]
    assert len(lb.terms) == m


def test_lower_bound_terms_m3():
    lb = lower_bound(solve_lambda_dp(3), 10)
    assert lb.term_strings == ["0.3678794411", "0.2231301601", "0.1410933807"]


def test_prefix_solutions_agree(sol10):
    # Solving for fewer constants reproduces the leading entries.
    for m in (1, 4, 7):
        assert solve_lambda_dp(m).lam == sol10.lam[:m]


@pytest.mark.parametrize("m", range(1, 9))
def test_naive_equals_dp(m):
    assert solve_lambda_naive(m).lam == solve_lambda_dp(m).lam


def test_naive_small_cases():
    assert solve_lambda_naive(2).lam == (1, Fraction(1, 2))
    assert solve_lambda_naive(3).lam[2] == Fraction(11, 24)


def test_equalities_hold_exactly():
    lam = solve_lambda_dp(8).lam
    assert equality_residuals(lam) == [1] * 8


def test_pattern_weight():
    lam = (Fraction(1), Fraction(1, 2))
    # (b_2, b_1) = (0, 2): lambda_1^2 / 2!
    assert pattern_weight((0, 2), lam) == Fraction(1, 2)
    assert pattern_weight((1, 0), lam) == Fraction(1, 2)


def test_gamma_first_row_and_diagonal():
    sol = solve_lambda_dp(8)
    factorial = 1
    for c in range(1, 9):
        factorial *= c
        assert sol.gamma_at(1, c) == Fraction(1, factorial)
    for k in range(9):
        assert sol.gamma_at(k, k) == 1
    with pytest.raises(InvalidInputError):
        sol.gamma_at(3, 2)


def _rows_strictly_decreasing(sol):
    for k in range(1, sol.m + 1):
        row = [sol.gamma_at(k, c) for c in range(k, sol.m + 1)]
        assert row[0] == 1
        assert all(a > b for a, b in zip(row, row[1:])), f"row {k}"


def test_gamma_monotone_exact():
    sol = solve_lambda_dp(14)
    assert all(x > 0 for x in sol.lam)
    _rows_strictly_decreasing(sol)


@pytest.mark.parametrize("m", [15, 20, 25, 30])
def test_gamma_monotone_high_precision(m):
    sol = solve_lambda_dp(m, precision=80)
    assert all(x > 0 for x in sol.lam)
    for k in range(1, m + 1):
        row = [sol.gamma_at(k, c) for c in range(k, m + 1)]
        assert abs(row[0] - 1) < Decimal("1e-70")
        # Each gap must dwarf the accumulated rounding error.
        gaps = [a - b for a, b in zip(row, row[1:])]
        assert all(g > Decimal("1e-60") * max(abs(a), Decimal("1e-40")) for g, a in zip(gaps, row))


def test_high_precision_agrees_with_exact():
    exact = solve_lambda_dp(12)
    approx = solve_lambda_dp(12, precision=60)
    for a, b in zip(exact.lam, approx.lam):
        assert abs(Fraction(b) - a) < Fraction(1, 10**55)


def test_lower_bound_from_high_precision():
    assert lower_bound(solve_lambda_dp(10, precision=50), 10).total_string == LOWER_BOUND10[10]


@pytest.mark.parametrize("m", [5, 10, 20, 30])
def test_operation_count_is_cubic(m):
    sol = solve_lambda_dp(m, precision=30) if m > 10 else solve_lambda_dp(m)
    assert sol.operations <= 2 * m**3


def test_exact_budget_and_validation():
    with pytest.raises(BudgetExceededError):
        solve_lambda_dp(EXACT_MAX_M + 1)
    with pytest.raises(InvalidInputError):
        solve_lambda_dp(0)
    with pytest.raises(InvalidInputError):
        solve_lambda_dp(5, precision=3)
    with pytest.raises(InvalidInputError):
        lower_bound(solve_lambda_dp(2), 0)


def test_lower_bound_is_floor_of_true_sum():
    # The rendered bound never exceeds the true value; compare with more digits.
    sol = solve_lambda_dp(7)
    coarse = Decimal(lower_bound(sol, 10).total_string)
    fine = Decimal(lower_bound(sol, 30).total_string)
    assert coarse <= fine < coarse + Decimal("1e-10")
