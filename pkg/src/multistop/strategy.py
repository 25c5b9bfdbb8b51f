"""Odds sequences, threshold strategies and their exact win probability."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .errors import InvalidInputError
from .numerics import as_rational, rat_to_string
from .patterns import enumerate_xi


@dataclass(frozen=True)
class OddsSequence:
    """Independent Bernoulli trials with success probabilities ``p``.

    Trials carry labels ``offset, offset+1, ...``; threshold values refer to
    these labels.  The secretary sequence uses ``offset=2``.
    """

    p: tuple
    offset: int = 1

    def __post_init__(self):
        p = tuple(as_rational(x) for x in self.p)
        for i, x in enumerate(p):
            if not 0 < x < 1:
                raise InvalidInputError(
                    f"success probability of trial {i + self.offset} must lie in (0,1), got {x}"
                )
        if self.offset < 0:
            raise InvalidInputError(f"index offset must be non-negative, got {self.offset}")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def first(self) -> int:
        return self.offset

    @property
    def last(self) -> int:
        return self.offset + len(self.p) - 1

    @cached_property
    def q(self) -> tuple:
        return tuple(1 - x for x in self.p)

    @cached_property
    def r(self) -> tuple:
        return tuple(x / (1 - x) for x in self.p)

    @cached_property
    def p_float(self) -> tuple:
        return tuple(float(x) for x in self.p)

    @cached_property
    def r_float(self) -> tuple:
        return tuple(float(x) for x in self.r)

    def labels(self) -> range:
        return range(self.first, self.last + 1)

    def to_json(self) -> str:
        return json.dumps({"p": [rat_to_string(x) for x in self.p]})


def sequence_from_dict(data: dict) -> OddsSequence:
    """Build a sequence from the JSON file schema.

    Accepted forms: ``{"p": ["1/2", ...]}``, ``{"iid": {"q": "100/101", "n": 1000}}``
    and ``{"secretary": {"n": 100}}``.
    """
    if not isinstance(data, dict) or len(data) != 1:
        raise InvalidInputError("sequence file must hold exactly one of 'p', 'iid', 'secretary'")
    (kind, body), = data.items()
    if kind == "p":
        if not isinstance(body, list) or not body:
            raise InvalidInputError("'p' must be a non-empty list of rationals")
        return OddsSequence(tuple(as_rational(x) for x in body))
    if kind == "iid":
        from .asymptotics import iid_sequence

        return iid_sequence(as_rational(body["q"]), int(body["n"]))
    if kind == "secretary":
        from .asymptotics import secretary_sequence

        return secretary_sequence(int(body["n"]))
    raise InvalidInputError(f"unknown sequence kind {kind!r}")


def load_sequence(path: str) -> OddsSequence:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"sequence file {path} is not valid JSON: {exc}") from exc
    try:
        return sequence_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"sequence file {path} is malformed: {exc}") from exc


@dataclass(frozen=True)
class ThresholdVector:
    """Thresholds listed outermost first: ``(i^(m), ..., i^(1))``."""

    thresholds: tuple

    def __post_init__(self):
        t = tuple(int(x) for x in self.thresholds)
        if not t:
            raise InvalidInputError("a threshold vector needs at least one threshold")
        if any(a > b for a, b in zip(t, t[1:])):
            raise InvalidInputError(f"thresholds must be non-decreasing outer-first, got {t}")
        object.__setattr__(self, "thresholds", t)

    @property
    def m(self) -> int:
        return len(self.thresholds)

    def __iter__(self):
        return iter(self.thresholds)

    def threshold(self, k: int) -> int:
        """``i^(k)`` for ``k`` in ``1..m``."""
        return self.thresholds[self.m - k]

    def validate(self, seq: OddsSequence) -> None:
        lo, hi = seq.first, seq.last
        if self.thresholds[0] < lo or self.thresholds[-1] > hi:
            raise InvalidInputError(
                f"thresholds {self.thresholds} out of range [{lo}, {hi}]"
            )

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.thresholds)


def parse_thresholds(text: str) -> ThresholdVector:
    try:
        values = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InvalidInputError(f"malformed threshold list {text!r}") from exc
    return ThresholdVector(values)


@dataclass(frozen=True)
class BlockPartition:
    """Blocks ``B_1, ..., B_{m+1}`` as label ranges; ``blocks[0]`` is ``B_1``."""

    blocks: tuple

    @property
    def m(self) -> int:
        return len(self.blocks) - 1

    def block(self, k: int) -> range:
        return self.blocks[k - 1]


def block_partition(t: ThresholdVector, n: int, offset: int = 1) -> BlockPartition:
    last = offset + n - 1
    if t.thresholds[0] < offset or t.thresholds[-1] > last:
        raise InvalidInputError(f"thresholds {t.thresholds} out of range [{offset}, {last}]")
    blocks = [range(t.threshold(1), last + 1)]
    for k in range(2, t.m + 1):
        blocks.append(range(t.threshold(k), t.threshold(k - 1)))
    blocks.append(range(offset, t.threshold(t.m)))
    return BlockPartition(tuple(blocks))


def elementary_symmetric(values: Sequence, degree: int) -> list:
    """``[e_0, ..., e_degree]`` of ``values`` by the incremental product recurrence."""
    e = [1] + [0] * degree
    for count, v in enumerate(values, start=1):
        for d in range(min(count, degree), 0, -1):
            e[d] += v * e[d - 1]
    return e


def sym_f(odds: Sequence, b: int):
    """Sum of products of ``b`` distinct odds; 1 for ``b == 0``, 0 if fewer than ``b``."""
    if b < 0:
        raise InvalidInputError(f"degree must be non-negative, got {b}")
    if b > len(odds):
        return Fraction(0) if all(isinstance(x, (int, Fraction)) for x in odds) else 0.0
    return elementary_symmetric(odds, b)[b]


def win_probability(seq: OddsSequence, t: ThresholdVector, exact: bool = True):
    """Win probability of the threshold strategy ``t`` on ``seq``.

    Sums, over ``k = 1..m``, the failure mass of blocks ``B_k..B_1`` times the
    elementary symmetric products of block odds over the minimal winning
    patterns of length ``k``.  With ``exact=False`` the same sum is evaluated
    in double precision.
    """
    t.validate(seq)
    m = t.m
    parts = block_partition(t, seq.n, seq.offset)
    if exact:
        q, r = seq.q, seq.r
    else:
        q, r = tuple(1.0 - x for x in seq.p_float), seq.r_float
    off = seq.offset

    esp = []
    block_q = []
    for k in range(1, m + 1):
        idx = parts.block(k)
        odds = r[idx.start - off:idx.stop - off]
        # Block B_k can hold up to m successes in a length-m pattern.
        esp.append(elementary_symmetric(odds, m))
        block_q.append(_product(q[idx.start - off:idx.stop - off], exact))

    total = Fraction(0) if exact else 0.0
    fail_mass = Fraction(1) if exact else 1.0
    for k in range(1, m + 1):
        fail_mass *= block_q[k - 1]
        inner = Fraction(0) if exact else 0.0
        for b in enumerate_xi(k).vectors:
            term = Fraction(1) if exact else 1.0
            for pos, count in enumerate(b):
                if count:
                    term *= esp[k - pos - 1][count]
                    if not term:
                        break
            inner += term
        total += fail_mass * inner
    return total


def _product(values, exact: bool):
    if exact:
        out = Fraction(1)
        for v in values:
            out *= v
        return out
    # Sum of logs keeps long products of near-one factors accurate.
    return math.exp(math.fsum(math.log(v) for v in values)) if values else 1.0


def pattern_vector(x: Sequence[int], blocks: BlockPartition, offset: int = 1) -> tuple:
    """Success counts ``(b_m, ..., b_1)`` of the 0/1 outcome ``x`` per block."""
    n = sum(len(b) for b in blocks.blocks)
    if len(x) != n:
        raise InvalidInputError(f"outcome vector has length {len(x)}, blocks cover {n} trials")
    counts = []
    for k in range(blocks.m, 0, -1):
        idx = blocks.block(k)
        counts.append(sum(x[i - offset] for i in idx))
    return tuple(counts)


@dataclass(frozen=True)
class RunOutcome:
    result: str
    last: Optional[int]
    accepted: tuple = field(default=())

    @property
    def win(self) -> bool:
        return self.result == "win"


def simulate_threshold_run(x: Sequence[int], t: ThresholdVector, offset: int = 1) -> RunOutcome:
    """Replay the threshold procedure on a realized outcome vector.

    At label ``i`` the slack grows by the number of thresholds equal to ``i``;
    a success is accepted while slack is positive and otherwise rejected,
    which forfeits any earlier acceptance as the final answer.
    """
    n = len(x)
    if t.thresholds[0] < offset or t.thresholds[-1] > offset + n - 1:
        raise InvalidInputError(
            f"thresholds {t.thresholds} out of range [{offset}, {offset + n - 1}]"
        )
    opens: dict = {}
    for v in t.thresholds:
        opens[v] = opens.get(v, 0) + 1
    slack = 0
    result = "lose"
    last = None
    accepted = []
    for pos, xi in enumerate(x):
        i = pos + offset
        slack += opens.get(i, 0)
        if not xi:
            continue
        if slack > 0:
            slack -= 1
            last = i
            result = "win"
            accepted.append(i)
        else:
            last = None
            result = "lose"
    return RunOutcome(result, last if result == "win" else None, tuple(accepted))
