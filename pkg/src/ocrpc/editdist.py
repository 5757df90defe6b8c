"""Unit-cost Levenshtein distance and bounded dictionary neighborhoods.

Costs are 1 for insertion, deletion, and substitution; transpositions are
not a primitive edit.  Comparison is case-sensitive over Unicode scalar
values.
"""

from __future__ import annotations

from collections.abc import Collection, Iterable
from itertools import combinations


def distance(a: str, b: str) -> int:
    """Exact edit distance between two strings."""
    if a == b:
        return 0
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return len(b)
    previous = list(range(len(a) + 1))
    for i, cb in enumerate(b, start=1):
        current = [i] + [0] * len(a)
        for j, ca in enumerate(a, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            )
        previous = current
    return previous[-1]


def bounded_distance(a: str, b: str, limit: int) -> int | None:
    """Edit distance if it is <= limit, else None.

    Uses a banded row computation so rejects cost O(limit * len) instead of
    a full matrix.
    """
    if limit < 0:
        return None
    if a == b:
        return 0
    if len(a) > len(b):
        a, b = b, a
    if len(b) - len(a) > limit:
        return None
    # band of width 2*limit+1 around the diagonal
    inf = limit + 1
    previous = [j if j <= limit else inf for j in range(len(a) + 1)]
    for i, cb in enumerate(b, start=1):
        lo = max(1, i - limit)
        hi = min(len(a), i + limit)
        current = [inf] * (len(a) + 1)
        if lo == 1:
            current[0] = i if i <= limit else inf
        for j in range(lo, hi + 1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (a[j - 1] != cb),
            )
        if min(current[lo - 1 : hi + 1]) > limit:
            return None
        previous = current
    return previous[-1] if previous[-1] <= limit else None


def within(word: str, lexicon: Iterable[str], k: int) -> set[tuple[str, int]]:
    """All lexicon entries within edit distance ``k`` of ``word``.

    Returns the exact set of (candidate, distance) pairs.  ``k`` must be
    >= 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    found: set[tuple[str, int]] = set()
    for entry in lexicon:
        if abs(len(entry) - len(word)) > k:
            continue
        d = bounded_distance(word, entry, k)
        if d is not None:
            found.add((entry, d))
    return found


def _deletion_variants(word: str, max_deletes: int) -> set[str]:
    variants = {word}
    n = len(word)
    for r in range(1, min(max_deletes, n) + 1):
        for idxs in combinations(range(n), r):
            variants.add("".join(ch for i, ch in enumerate(word) if i not in idxs))
    return variants


class NeighborhoodIndex:
    """Precomputed deletion-variant index for repeated ``within`` queries.

    Maps every word's deletion variants (up to ``max_distance`` removals)
    back to the word, so a lookup only has to verify a small candidate set
    with the real distance function.  Immutable after construction; lookups
    agree exactly with :func:`within`.
    """

    def __init__(self, lexicon: Collection[str], max_distance: int) -> None:
        if max_distance < 0:
            raise ValueError(f"max_distance must be >= 0, got {max_distance}")
        self.max_distance = max_distance
        self._words = frozenset(lexicon)
        index: dict[str, list[str]] = {}
        for word in self._words:
            for variant in _deletion_variants(word, max_distance):
                index.setdefault(variant, []).append(word)
        self._index = index

    def lookup(self, word: str, k: int | None = None) -> set[tuple[str, int]]:
        """Exact ``within(word, lexicon, k)`` for k <= max_distance."""
        if k is None:
            k = self.max_distance
        if k > self.max_distance:
            raise ValueError(f"k={k} exceeds index max_distance={self.max_distance}")
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        candidates: set[str] = set()
        for variant in _deletion_variants(word, k):
            candidates.update(self._index.get(variant, ()))
        found: set[tuple[str, int]] = set()
        for candidate in candidates:
            d = bounded_distance(word, candidate, k)
            if d is not None:
                found.add((candidate, d))
        return found
