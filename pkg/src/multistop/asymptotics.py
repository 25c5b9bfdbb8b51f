"""Special sequences and convergence toward the asymptotic bound.

Two families attain the bound ``sum_k exp(-(lambda_1 + ... + lambda_k))`` in
the limit: the secretary sequence ``p_i = 1/i`` as ``n`` grows, and IID
sequences of common odds ``r`` as ``r -> 0`` with total odds ``L*r`` held
above ``lambda_1 + ... + lambda_m``.

The IID surrogate is described directly by its length ``L`` and odds ``r``.
Its thresholds put ``j^(k)`` at the first label where the remaining odds
``(L - j) * r`` drop below ``lambda_1 + ... + lambda_k``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvalidInputError
from .lambda_solver import LambdaSolution, lower_bound, solve_lambda_dp
from .numerics import as_rational, decimal_to_string, exp_neg, rat_to_string
from .optimizer import optimal_ola
from .strategy import OddsSequence, ThresholdVector, win_probability

#: Significant digits used for deviations.
REPORT_DIGITS = 20
#: Largest m whose lambdas are solved exactly for report targets.
EXACT_TARGET_M = 12


def secretary_sequence(n: int) -> OddsSequence:
    """``p_i = 1/i`` for labels ``i = 2..n``."""
    if not isinstance(n, int) or n < 2:
        raise InvalidInputError(f"secretary sequence needs n >= 2, got {n!r}")
    return OddsSequence(tuple(Fraction(1, i) for i in range(2, n + 1)), offset=2)


def iid_sequence(q, n: int) -> OddsSequence:
    """``n`` trials with common failure probability ``q``; odds ``(1-q)/q``."""
    q = as_rational(q)
    if not 0 < q < 1:
        raise InvalidInputError(f"failure probability q must lie in (0,1), got {q}")
    if not isinstance(n, int) or n < 1:
        raise InvalidInputError(f"sequence length must be a positive integer, got {n!r}")
    return OddsSequence((1 - q,) * n)


def iid_from_odds(r, n: int) -> OddsSequence:
    r = as_rational(r)
    if r <= 0:
        raise InvalidInputError(f"common odds must be positive, got {r}")
    return iid_sequence(1 / (1 + r), n)


def solve_targets(m: int) -> LambdaSolution:
    if m <= EXACT_TARGET_M:
        return solve_lambda_dp(m)
    return solve_lambda_dp(m, precision=60)


def surrogate_lb_thresholds(sol: LambdaSolution, L: int, r) -> ThresholdVector:
    """``j^(k) = min{j in 1..L : cumsum_k > (L - j) * r}``, listed outer-first.

    Requires ``L * r > cumsum_m`` so that no threshold has to be clamped to 1.
    """
    r = as_rational(r)
    if not isinstance(L, int) or L < 1:
        raise InvalidInputError(f"L must be a positive integer, got {L!r}")
    if r <= 0:
        raise InvalidInputError(f"common odds must be positive, got {r}")
    total = Fraction(sol.cumsum[-1])
    if L * r <= total:
        raise InvalidInputError(
            f"total odds L*r = {rat_to_string(L * r)} must exceed the lambda sum {float(total):.6f}"
        )
    out = []
    for c in sol.cumsum:
        # (L - j) r < c  <=>  j > L - c/r
        out.append(math.floor(L - Fraction(c) / r) + 1)
    return ThresholdVector(tuple(reversed(out)))


def _to_decimal(x) -> Decimal:
    if isinstance(x, Fraction):
        return Decimal(x.numerator) / Decimal(x.denominator)
    return Decimal(x)


def _deviation(observed, target: Decimal) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = REPORT_DIGITS + 10
        return abs(_to_decimal(observed) - target)


@dataclass(frozen=True)
class ConvergenceRow:
    label: dict  # instance size, e.g. {"n": 1000} or {"L": 2000, "r": "1/1000"}
    value: object
    thresholds: ThresholdVector
    deviation: Decimal
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConvergenceReport:
    kind: str
    m: int
    bound: Decimal
    term_targets: tuple  # exp(-cumsum_k) for k = 1..m
    rows: tuple

    def deviations(self, key: Optional[str] = None) -> list:
        if key is None:
            return [row.deviation for row in self.rows]
        return [row.extra[key] for row in self.rows]

    def monotone_after(self, warmup: int = 0, key: Optional[str] = None) -> bool:
        """Deviations never increase from schedule entry ``warmup`` on."""
        devs = self.deviations(key)[warmup:]
        return all(b <= a for a, b in zip(devs, devs[1:]))

    def records(self, digits: int = 10) -> list:
        out = []
        for row in self.rows:
            rec = dict(row.label)
            rec["thresholds"] = str(row.thresholds)
            rec["value"] = _render(row.value, digits)
            rec["deviation"] = decimal_to_string(row.deviation, digits)
            for key, val in row.extra.items():
                rec[key] = _render(val, digits)
            out.append(rec)
        return out

    def to_json(self, digits: int = 10) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "m": self.m,
                "bound": decimal_to_string(self.bound, digits, "floor"),
                "term_targets": [decimal_to_string(t, digits, "floor") for t in self.term_targets],
                "rows": self.records(digits),
            },
            indent=2,
        )

    def to_csv(self, digits: int = 10) -> str:
        records = self.records(digits)
        buf = io.StringIO()
        if records:
            writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(records)
        return buf.getvalue()


def _render(value, digits: int) -> str:
    if isinstance(value, Decimal):
        return decimal_to_string(value, digits)
    if isinstance(value, Fraction):
        return decimal_to_string(_to_decimal(value), digits)
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    if isinstance(value, ThresholdVector):
        return str(value)
    return str(value)


def _targets(m: int):
    sol = solve_targets(m)
    lb = lower_bound(sol, REPORT_DIGITS)
    return sol, lb.total, lb.terms


def bound_convergence(m: int, schedule: Sequence) -> ConvergenceReport:
    """Surrogate and OLA-optimal values on IID sequences along ``(L, r)`` pairs.

    Both values are exact.  ``deviation`` measures the surrogate value
    against the bound; ``optimal_deviation`` the optimal value.
    """
    sol, bound, terms = _targets(m)
    rows = []
    for L, r in schedule:
        r = as_rational(r)
        thresholds = surrogate_lb_thresholds(sol, L, r)
        seq = iid_from_odds(r, L)
        value = win_probability(seq, thresholds)
        best = optimal_ola(seq, m)
        rows.append(
            ConvergenceRow(
                {"L": L, "r": rat_to_string(r)},
                value,
                thresholds,
                _deviation(value, bound),
                {
                    "optimal_value": best.value,
                    "optimal_thresholds": best.thresholds,
                    "optimal_deviation": _deviation(best.value, bound),
                },
            )
        )
    return ConvergenceReport("bound", m, bound, terms, tuple(rows))


def default_bound_schedule(m: int, odds: Sequence = ("1/10", "1/100", "1/1000")) -> list:
    """``(ceil(1.2 * cumsum_m / r), r)`` for each odds value."""
    total = Fraction(solve_targets(m).cumsum[-1])
    out = []
    for r in odds:
        r = as_rational(r)
        out.append((math.ceil(Fraction(6, 5) * total / r), r))
    return out


def secretary_convergence(
    m: int, n_schedule: Sequence[int], exact: bool = False
) -> ConvergenceReport:
    """OLA-optimal secretary strategies against the asymptotic targets.

    ``deviation`` is ``|Pwin_n - bound|``.  Extras record the ratios
    ``i^(k)/n``, their sum, the per-ratio deviations from
    ``exp(-cumsum_k)`` and ``ratio_identity_gap = |sum of ratios - Pwin_n|``.
    The default float path is meant for large ``n``.
    """
    sol, bound, terms = _targets(m)
    rows = []
    for n in n_schedule:
        seq = secretary_sequence(n)
        best = optimal_ola(seq, m, exact=exact)
        # ratios listed innermost first: i^(1)/n, ..., i^(m)/n
        ratios = [Fraction(best.thresholds.threshold(k), n) for k in range(1, m + 1)]
        ratio_sum = sum(ratios, Fraction(0))
        extra = {f"ratio_{k}": ratios[k - 1] for k in range(1, m + 1)}
        extra["ratio_sum"] = ratio_sum
        for k in range(1, m + 1):
            extra[f"ratio_{k}_deviation"] = _deviation(ratios[k - 1], terms[k - 1])
        extra["ratio_identity_gap"] = _deviation(best.value, _to_decimal(ratio_sum))
        rows.append(
            ConvergenceRow({"n": n}, best.value, best.thresholds, _deviation(best.value, bound), extra)
        )
    return ConvergenceReport("secretary", m, bound, terms, tuple(rows))


def exp_ratio_target(sol: LambdaSolution, k: int, digits: int = REPORT_DIGITS) -> Decimal:
    """``exp(-cumsum_k)``, the limit of ``i^(k)/n`` on the secretary sequence."""
    return exp_neg(Fraction(sol.cumsum[k - 1]), digits)
