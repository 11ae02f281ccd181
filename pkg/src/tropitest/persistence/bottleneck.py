"""Bottleneck distance between barcodes.

A partial bijection between two barcodes pays the sup-norm cost
max(|b1 - b2|, |d1 - d2|) per matched pair (deaths compared, not
persistences) and half the persistence for every unmatched bar; the
bottleneck distance is the minimax penalty over all partial bijections.
Zero-persistence bars can always be matched to the diagonal for free, so
they never affect the value.

The production routine binary-searches the candidate penalty values and
decides feasibility of each threshold with a square assignment problem; the
brute-force oracle enumerates every partial bijection directly and is
limited to 8 bars total.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import RefusalError
from .barcode import Bar, Barcode


@dataclass(frozen=True)
class Matching:
    """A partial bijection between bar indices of two barcodes."""

    pairs: tuple  # (left index, right index)
    unmatched_left: tuple
    unmatched_right: tuple


def _pair_cost(x: Bar, y: Bar) -> float:
    return max(abs(x.birth - y.birth), abs(x.death - y.death))


def bottleneck_distance(first: Barcode, second: Barcode) -> float:
    distance, _ = bottleneck_matching(first, second)
    return distance


def bottleneck_matching(first: Barcode, second: Barcode):
    """Bottleneck distance plus one matching realizing it."""
    left = [b for b in first.bars if b.persistence > 0]
    right = [b for b in second.bars if b.persistence > 0]
    n, m = len(left), len(right)
    if n == 0 and m == 0:
        return 0.0, Matching(pairs=(), unmatched_left=(), unmatched_right=())

    candidates = {0.0}
    candidates.update(b.persistence / 2 for b in left)
    candidates.update(b.persistence / 2 for b in right)
    candidates.update(_pair_cost(x, y) for x in left for y in right)
    ordered = sorted(candidates)

    lo, hi = 0, len(ordered) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(left, right, ordered[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    threshold = ordered[lo]
    assignment = _feasible(left, right, threshold)
    assert assignment is not None
    return threshold, assignment


def _feasible(left: list, right: list, t: float) -> Matching | None:
    """Matching with penalty <= t, or None.

    The square assignment has one row per left bar plus one per right
    diagonal slot, one column per right bar plus one per left diagonal
    slot. Allowed cells cost 0, forbidden cells 1; a zero-cost perfect
    assignment is exactly a feasible partial bijection.
    """
    n, m = len(left), len(right)
    size = n + m
    cost = np.ones((size, size))
    for i, x in enumerate(left):
        for j, y in enumerate(right):
            if _pair_cost(x, y) <= t:
                cost[i, j] = 0.0
    for i, x in enumerate(left):
        if x.persistence / 2 <= t:
            cost[i, m + i] = 0.0
    for j, y in enumerate(right):
        if y.persistence / 2 <= t:
            cost[n + j, j] = 0.0
    cost[n:, m:] = 0.0
    rows, cols = linear_sum_assignment(cost)
    if cost[rows, cols].sum() > 0:
        return None
    pairs = []
    unmatched_left = []
    unmatched_right = []
    for r, c in zip(rows, cols):
        if r < n and c < m:
            pairs.append((int(r), int(c)))
        elif r < n:
            unmatched_left.append(int(r))
        elif c < m:
            unmatched_right.append(int(c))
    return Matching(
        pairs=tuple(pairs),
        unmatched_left=tuple(unmatched_left),
        unmatched_right=tuple(unmatched_right),
    )


def bottleneck_bruteforce(first: Barcode, second: Barcode) -> float:
    """Reference implementation enumerating all partial bijections.

    Refuses inputs with more than 8 bars in total.
    """
    left = list(first.bars)
    right = list(second.bars)
    if len(left) + len(right) > 8:
        raise RefusalError(
            f"brute-force bottleneck limited to 8 bars total, got {len(left) + len(right)}"
        )
    half = [b.persistence / 2 for b in left + right]
    best = max(half, default=0.0)  # empty matching: everything to the diagonal
    n, m = len(left), len(right)
    for k in range(1, min(n, m) + 1):
        for rows in combinations(range(n), k):
            for cols in combinations(range(m), k):
                for perm in permutations(cols):
                    penalty = 0.0
                    for r, c in zip(rows, perm):
                        penalty = max(penalty, _pair_cost(left[r], right[c]))
                    for r in range(n):
                        if r not in rows:
                            penalty = max(penalty, left[r].persistence / 2)
                    for c in range(m):
                        if c not in perm:
                            penalty = max(penalty, right[c].persistence / 2)
                    best = min(best, penalty)
    return best
