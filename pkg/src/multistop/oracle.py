"""Independent checks of the win-probability formula.

``enumerate_win_probability`` replays the threshold procedure on every
outcome vector; ``monte_carlo_win_probability`` samples outcomes.  Neither
uses pattern sets, so agreement with :func:`win_probability` is a genuine
cross-check.  ``verify_suite`` runs the cross-checks on random instances.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np

from .errors import BudgetExceededError, InvalidInputError
from .optimizer import optimal_dp, optimal_exhaustive, optimal_ola
from .patterns import is_winning_pattern
from .strategy import (
    OddsSequence,
    ThresholdVector,
    block_partition,
    pattern_vector,
    simulate_threshold_run,
    win_probability,
)

#: Largest sequence length accepted by exhaustive enumeration.
ENUMERATION_MAX_N = 22
#: Trials per Monte Carlo shard.  Fixed, so shard seeds do not depend on workers.
SHARD_TRIALS = 1 << 16
#: Largest denominator of random success probabilities in the verify suite.
MAX_DENOMINATOR = 64


@dataclass(frozen=True)
class OracleResult:
    exact: Optional[Fraction] = None
    estimate: Optional[float] = None
    trials: int = 0
    wins: int = 0
    standard_error: Optional[float] = None
    trace: tuple = ()


def _gray_flips(n: int):
    # Index of the bit that changes between successive reflected Gray codes.
    for g in range(1, 1 << n):
        yield (g & -g).bit_length() - 1


def enumerate_win_probability(
    seq: OddsSequence, t: ThresholdVector, trace: bool = False
) -> OracleResult:
    """Exact win probability by replaying all ``2**N`` outcome vectors.

    Outcomes are visited in Gray-code order so each outcome's mass follows
    from the previous one by a single factor swap.  Masses are integers over
    the common denominator ``prod_i den(p_i)``.
    """
    n = seq.n
    if n > ENUMERATION_MAX_N:
        raise BudgetExceededError(
            f"enumeration over 2^{n} outcomes exceeds the budget N <= {ENUMERATION_MAX_N}"
        )
    t.validate(seq)
    succ = [x.numerator for x in seq.p]
    fail = [x.denominator - x.numerator for x in seq.p]
    denom = math.prod(x.denominator for x in seq.p)

    x = [0] * n
    mass = math.prod(fail)
    won = 0
    log = []

    def visit():
        nonlocal won
        outcome = simulate_threshold_run(x, t, seq.offset)
        if outcome.win:
            won += mass
        if trace:
            log.append((tuple(x), outcome.result))

    visit()
    for bit in _gray_flips(n):
        if x[bit]:
            mass = mass // succ[bit] * fail[bit]
        else:
            mass = mass // fail[bit] * succ[bit]
        x[bit] ^= 1
        visit()
    return OracleResult(exact=Fraction(won, denom), trace=tuple(log))


def _replay_batch(u_columns, p: np.ndarray, opens: np.ndarray) -> int:
    """Wins among a batch of runs; ``u_columns(i)`` yields the uniforms of trial ``i``."""
    slack = None
    win = None
    for i in range(len(p)):
        u = u_columns(i)
        if slack is None:
            slack = np.zeros(u.shape[0], dtype=np.int64)
            win = np.zeros(u.shape[0], dtype=bool)
        if opens[i]:
            slack += opens[i]
        success = u < p[i]
        accept = success & (slack > 0)
        slack -= accept
        # Accepted successes become the answer; rejected ones void it.
        win = np.where(success, accept, win)
    return int(win.sum())


def _shard_wins(seed_seq: np.random.SeedSequence, rows: int, p: np.ndarray, opens) -> int:
    gen = np.random.Generator(np.random.Philox(seed_seq))
    return _replay_batch(lambda i: gen.random(rows), p, opens)


def monte_carlo_win_probability(
    seq: OddsSequence,
    t: ThresholdVector,
    trials: int,
    seed: int,
    workers: int = 1,
) -> OracleResult:
    """Seeded Monte Carlo estimate of the win probability.

    Trials are split into shards of ``SHARD_TRIALS``.  Shard ``j`` draws from
    a Philox generator seeded by child ``j`` of ``SeedSequence(seed)``, so the
    estimate depends only on ``(seed, trials)`` and not on ``workers``.  A
    success is a uniform double below ``p_i`` rounded to double.
    """
    if not isinstance(trials, int) or trials < 1:
        raise InvalidInputError(f"trials must be a positive integer, got {trials!r}")
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise InvalidInputError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    t.validate(seq)
    p = np.array(seq.p_float)
    opens = np.zeros(seq.n, dtype=np.int64)
    for v in t:
        opens[v - seq.offset] += 1
    n_shards = -(-trials // SHARD_TRIALS)
    children = np.random.SeedSequence(seed).spawn(n_shards)
    sizes = [SHARD_TRIALS] * (n_shards - 1) + [trials - SHARD_TRIALS * (n_shards - 1)]
    jobs = list(zip(children, sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _shard_wins(job[0], job[1], p, opens), jobs))
    else:
        counts = [_shard_wins(c, s, p, opens) for c, s in jobs]
    wins = sum(counts)
    est = wins / trials
    se = math.sqrt(est * (1 - est) / trials)
    return OracleResult(estimate=est, trials=trials, wins=wins, standard_error=se)


def random_sequence(rng: random.Random, n: int, max_den: int = MAX_DENOMINATOR) -> OddsSequence:
    """Random success probabilities ``a/d`` with ``2 <= d <= max_den`` and ``0 < a < d``."""
    p = []
    for _ in range(n):
        d = rng.randint(2, max_den)
        p.append(Fraction(rng.randint(1, d - 1), d))
    return OddsSequence(tuple(p))


def random_thresholds(rng: random.Random, seq: OddsSequence, m: int) -> ThresholdVector:
    return ThresholdVector(tuple(sorted(rng.randint(seq.first, seq.last) for _ in range(m))))


@dataclass
class VerifyReport:
    cases: int = 0
    passed: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    CHECKS = ("formula_vs_enumeration", "winning_patterns", "dp_vs_exhaustive", "ola_vs_dp")

    def record(self, check: str, ok: bool, detail: str = "") -> None:
        bucket = self.passed if ok else self.failed
        bucket[check] = bucket.get(check, 0) + 1
        if not ok:
            self.failures.append(f"{check}: {detail}")

    @property
    def ok(self) -> bool:
        return not self.failures

    def rows(self) -> list:
        return [
            {"check": c, "passed": self.passed.get(c, 0), "failed": self.failed.get(c, 0)}
            for c in self.CHECKS
        ]


#: Sequences up to this length get every outcome vector checked against the pattern rule.
PATTERN_CHECK_MAX_N = 10
#: Exhaustive optimum is only attempted up to this length.
OPTIMUM_CHECK_MAX_N = 12


def _check_patterns(seq: OddsSequence, t: ThresholdVector) -> Optional[str]:
    """Every outcome wins iff its pattern vector has a minimal winning suffix."""
    blocks = block_partition(t, seq.n, seq.offset)
    for mask in range(1 << seq.n):
        x = [(mask >> i) & 1 for i in range(seq.n)]
        sim = simulate_threshold_run(x, t, seq.offset).win
        try:
            formula, _ = is_winning_pattern(pattern_vector(x, blocks, seq.offset))
        except AssertionError as exc:
            return str(exc)
        if sim != formula:
            return f"outcome {x} under {t}: replay says {sim}, pattern rule says {formula}"
    return None


def verify_suite(max_n: int, m_max: int, cases: int, seed: int) -> VerifyReport:
    """Randomized cross-module certification; failures become report entries."""
    if max_n < 1 or m_max < 1 or cases < 0:
        raise InvalidInputError("max_n and m_max must be positive and cases non-negative")
    rng = random.Random(seed)
    report = VerifyReport(cases)
    for case in range(cases):
        n = rng.randint(1, max_n)
        m = rng.randint(1, m_max)
        seq = random_sequence(rng, n)
        t = random_thresholds(rng, seq, m)
        tag = f"case {case} p={[str(x) for x in seq.p]} t={t}"

        if n <= ENUMERATION_MAX_N:
            formula = win_probability(seq, t)
            oracle = enumerate_win_probability(seq, t).exact
            report.record("formula_vs_enumeration", formula == oracle, f"{tag}: {formula} != {oracle}")

        if n <= PATTERN_CHECK_MAX_N:
            problem = _check_patterns(seq, t)
            report.record("winning_patterns", problem is None, f"{tag}: {problem}")

        if n <= OPTIMUM_CHECK_MAX_N:
            dp = optimal_dp(seq, m).value
            try:
                ex = optimal_exhaustive(seq, m).value
            except BudgetExceededError:
                ex = None
            if ex is not None:
                report.record("dp_vs_exhaustive", dp == ex, f"{tag}: dp {dp} != exhaustive {ex}")
            ola = optimal_ola(seq, m).value
            report.record("ola_vs_dp", ola == dp, f"{tag}: ola {ola} != dp {dp}")
    return report


def all_threshold_vectors(seq: OddsSequence, m: int):
    for t in combinations_with_replacement(seq.labels(), m):
        yield ThresholdVector(t)
