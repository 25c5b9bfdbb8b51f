"""Winning-pattern sets and their lattice-path picture.

A pattern vector ``(b_k, ..., b_1)`` counts successes per block, listed in
decreasing block subscript.  Three families of length-``k`` vectors are used:

* ``hat``      every vector with ``b_k + ... + b_j + j <= k + 1`` for all ``j``
               and at least one success;
* ``xi``       the minimal members of ``hat``: no proper left truncated
               subvector ``(b_j, ..., b_1)``, ``j < k``, lies in the ``hat`` set
               of length ``j``;
* ``xi_plus``  members of ``hat`` whose entries sum to ``k``.

Vectors are plain tuples, ordered lexicographically descending.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .errors import BudgetExceededError, InvalidInputError

#: Largest pattern length that may be enumerated.
MAX_K = 12
#: Largest pattern length accepted by the counting routine.
COUNT_MAX_K = 40

KINDS = ("hat", "xi", "xi_plus")

PatternVector = tuple


def _check_k(k: int, bound: int = MAX_K) -> None:
    if not isinstance(k, int) or k < 1:
        raise InvalidInputError(f"pattern length k must be a positive integer, got {k!r}")
    if k > bound:
        raise BudgetExceededError(f"pattern length k={k} exceeds enumeration bound {bound}")


@dataclass(frozen=True)
class PatternSet:
    k: int
    kind: str
    vectors: tuple

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __contains__(self, b) -> bool:
        return tuple(b) in self._members

    @property
    def _members(self) -> frozenset:
        members = self.__dict__.get("_member_set")
        if members is None:
            members = frozenset(self.vectors)
            object.__setattr__(self, "_member_set", members)
        return members

    def to_json(self) -> str:
        return json.dumps(
            {"k": self.k, "kind": self.kind, "vectors": [list(v) for v in self.vectors]},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> "PatternSet":
        data = json.loads(text)
        if data.get("kind") not in KINDS:
            raise InvalidInputError(f"unknown pattern set kind {data.get('kind')!r}")
        return cls(int(data["k"]), data["kind"], tuple(tuple(v) for v in data["vectors"]))


def in_xi_hat(b: Sequence[int]) -> bool:
    """Membership test for the ``hat`` family of length ``len(b)``."""
    k = len(b)
    if k == 0 or any(x < 0 for x in b):
        return False
    s = 0
    for pos, value in enumerate(b):
        s += value
        # pos 0 holds b_k, so its subscript j is k - pos.
        if s + (k - pos) > k + 1:
            return False
    return s >= 1


def _hat_vectors(k: int) -> Iterator[tuple]:
    # Depth-first over b_k, ..., b_1 with values tried in descending order,
    # which yields lexicographically descending output.
    prefix = [0] * k

    def rec(pos: int, s: int):
        j = k - pos
        if pos == k:
            if s >= 1:
                yield tuple(prefix)
            return
        for value in range(k + 1 - j - s, -1, -1):
            prefix[pos] = value
            yield from rec(pos + 1, s + value)

    yield from rec(0, 0)


@lru_cache(maxsize=None)
def enumerate_xi_hat(k: int) -> PatternSet:
    _check_k(k)
    return PatternSet(k, "hat", tuple(_hat_vectors(k)))


def has_reducible_suffix(b: Sequence[int]) -> bool:
    """True if some proper left truncated subvector of ``b`` lies in a smaller ``hat`` set."""
    return any(in_xi_hat(b[len(b) - j:]) for j in range(1, len(b)))


def _xi_by_filter(k: int) -> tuple:
    return tuple(b for b in _hat_vectors(k) if not has_reducible_suffix(b))


def apex_candidates(b: Sequence[int]) -> list:
    """Every subscript ``j`` whose prefix constraint is tight: ``b_k+...+b_j + j == k+1``."""
    k = len(b)
    out = []
    s = 0
    for pos, value in enumerate(b):
        s += value
        j = k - pos
        if s + j == k + 1:
            out.append(j)
    return out


def xi_apex(b: Sequence[int]) -> Optional[int]:
    """The unique apex ``k*`` of ``b`` if ``b`` is a minimal winning pattern, else ``None``.

    ``k*`` must be the only tight prefix constraint, every looser subscript
    must satisfy its constraint strictly, and all entries after the apex
    (subscripts below ``k*``) must vanish.
    """
    k = len(b)
    if k == 0 or any(x < 0 for x in b):
        return None
    found = None
    s = 0
    for pos, value in enumerate(b):
        s += value
        j = k - pos
        if s + j > k + 1:
            return None
        if s + j == k + 1:
            if found is not None:
                return None
            found = j
    if found is None:
        return None
    if any(b[k - j] for j in range(1, found)):
        return None
    return found


def _xi_by_apex(k: int) -> tuple:
    out = []
    for apex in range(k, 0, -1):
        # Entries b_k..b_apex; strict constraints above the apex, tight at it.
        head_len = k - apex + 1
        head = [0] * head_len

        def rec(pos: int, s: int):
            j = k - pos
            if j == apex:
                head[pos] = k + 1 - j - s
                out.append(tuple(head) + (0,) * (apex - 1))
                return
            for value in range(k - j - s, -1, -1):
                head[pos] = value
                rec(pos + 1, s + value)

        rec(0, 0)
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_xi(k: int, method: str = "apex") -> PatternSet:
    """Minimal winning patterns of length ``k``.

    ``method="apex"`` builds them directly from the apex characterization;
    ``method="filter"`` filters the ``hat`` set against every shorter ``hat``
    set and serves as the reference path.
    """
    _check_k(k)
    if method == "apex":
        vectors = _xi_by_apex(k)
    elif method == "filter":
        vectors = _xi_by_filter(k)
    else:
        raise InvalidInputError(f"unknown enumeration method {method!r}")
    return PatternSet(k, "xi", vectors)


@lru_cache(maxsize=None)
def enumerate_xi_plus(k: int) -> PatternSet:
    _check_k(k)
    return PatternSet(k, "xi_plus", tuple(b for b in _hat_vectors(k) if sum(b) == k))


def enumerate_patterns(k: int, kind: str) -> PatternSet:
    if kind == "hat":
        return enumerate_xi_hat(k)
    if kind == "xi":
        return enumerate_xi(k)
    if kind == "xi_plus":
        return enumerate_xi_plus(k)
    raise InvalidInputError(f"unknown pattern set kind {kind!r}; expected one of {KINDS}")


@lru_cache(maxsize=None)
def xi_count(k: int) -> int:
    """Number of minimal winning patterns of length ``k``, counted without listing them.

    For each apex ``k*`` a dynamic program over partial sums counts the heads
    ``(b_k, ..., b_{k*})`` that stay strictly below the constraint line and
    touch it exactly at ``k*``.
    """
    _check_k(k, COUNT_MAX_K)
    total = 0
    for apex in range(k, 0, -1):
        # ways[s]: number of partial heads with running sum s.
        ways = {0: 1}
        for j in range(k, apex, -1):
            nxt: dict = {}
            for s, w in ways.items():
                for s2 in range(s, k - j + 1):
                    nxt[s2] = nxt.get(s2, 0) + w
            ways = nxt
        target = k + 1 - apex
        total += sum(w for s, w in ways.items() if s <= target)
    return total


def left_truncated(b: Sequence[int], j: int) -> tuple:
    """The left truncated subvector ``(b_j, ..., b_1)``."""
    return tuple(b[len(b) - j:])


def is_winning_pattern(b: Sequence[int]) -> tuple:
    """Return ``(True, k)`` if exactly the suffix of length ``k`` is a minimal winning pattern.

    Returns ``(False, None)`` when no suffix qualifies.  Uniqueness of the
    witness is checked and a violation raises ``AssertionError``.
    """
    b = tuple(b)
    if any(x < 0 for x in b):
        raise InvalidInputError(f"pattern entries must be non-negative: {b}")
    witnesses = [j for j in range(1, len(b) + 1) if xi_apex(left_truncated(b, j)) is not None]
    if not witnesses:
        return False, None
    if len(witnesses) > 1:
        raise AssertionError(f"pattern {b} has several winning suffixes {witnesses}")
    return True, witnesses[0]


@dataclass(frozen=True)
class LatticePath:
    heights: tuple  # (c_k, c_{k-1}, ..., c_0)
    vector: tuple  # (b_k, ..., b_1)
    apex: int


@dataclass(frozen=True)
class LatticeReport:
    k: int
    paths: tuple
    matches: bool

    def __len__(self) -> int:
        return len(self.paths)


def path_to_vector(heights: Sequence[int]) -> tuple:
    """``b_j = c_j - c_{j-1}`` for heights listed as ``(c_k, ..., c_0)``."""
    return tuple(heights[i] - heights[i + 1] for i in range(len(heights) - 1))


def vector_to_path(b: Sequence[int]) -> tuple:
    """Inverse of :func:`path_to_vector` for a path starting at height ``k``."""
    k = len(b)
    heights = [k]
    for value in b:
        heights.append(heights[-1] - value)
    return tuple(heights)


def first_apex(heights: Sequence[int]) -> Optional[int]:
    """First subscript ``k*`` at which the path returns to the diagonal.

    The path visits ``(k*-1, k*-1)`` and no diagonal vertex strictly between
    ``(k, k)`` and it.
    """
    k = len(heights) - 1
    for j in range(k, 0, -1):
        # heights[k - (j - 1)] is c_{j-1}
        if heights[k - j + 1] == j - 1:
            return j
    return None


def _paths(k: int) -> Iterator[tuple]:
    # Heights c_k = k, then c_{j-1} in [j-1, c_j]; only c_0 = 0 ends at the origin.
    def rec(j: int, heights: list):
        if j == 0:
            if heights[-1] == 0:
                yield tuple(heights)
            return
        for c in range(heights[-1], j - 2, -1):
            heights.append(c)
            yield from rec(j - 1, heights)
            heights.pop()

    yield from rec(k, [k])


def lattice_paths(k: int) -> LatticeReport:
    """Enumerate paths from ``(k, k)`` to ``(0, 0)`` and compare them with ``xi_plus``."""
    _check_k(k)
    paths = []
    for heights in _paths(k):
        paths.append(LatticePath(heights, path_to_vector(heights), first_apex(heights)))
    paths.sort(key=lambda p: p.vector, reverse=True)
    matches = tuple(p.vector for p in paths) == enumerate_xi_plus(k).vectors
    return LatticeReport(k, tuple(paths), matches)
