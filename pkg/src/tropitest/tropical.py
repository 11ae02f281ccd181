"""Max-plus symmetric-polynomial coordinates for barcodes.

A barcode with at most n bars of positive persistence is encoded by the
family of coordinates indexed by orbit triples (i, j, k): pad the bars to
exactly n slots with (0, 0), write each slot t as

    x_t = min(birth_t, m * persistence_t),   y_t = persistence_t,

and take the maximum over all ways to assign i distinct slots to the role
contributing y_t, j distinct slots to the role contributing x_t + y_t, and
k distinct slots to the role contributing x_t. The truncation by the
regularization parameter m makes every coordinate finite and 1-Lipschitz
bounded in terms of m (see the stability bound tested in the suite).

The embedding proper uses the k = 0 coordinates; sorting the resulting
vector gives a representation invariant under reordering the coordinates,
which is the statistic fed to the two-sample test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

from .errors import (
    CapacityError,
    DegenerateInputError,
    ParameterError,
    RefusalError,
    RegularizationError,
)
from .persistence.barcode import Bar, Barcode

M_UNIVERSAL = 100
M_POLICIES = ("data_driven", "universal")


@dataclass(frozen=True)
class OrbitIndex:
    """Exponent counts (i, j, k) of one coordinate at capacity n.

    i slots contribute persistence, j slots contribute truncated birth plus
    persistence, k slots contribute truncated birth alone. At least one
    count must be positive and i + j + k <= n.
    """

    i: int
    j: int
    k: int
    n: int

    def __post_init__(self):
        for name in ("i", "j", "k", "n"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ParameterError(f"orbit index {name} must be a nonnegative integer")
        if self.n < 1:
            raise ParameterError("orbit index capacity n must be >= 1")
        if self.i + self.j + self.k > self.n:
            raise ParameterError("orbit index needs i + j + k <= n")
        if self.i == self.j == self.k == 0:
            raise ParameterError("orbit index (0, 0, 0) is not a coordinate")


def orbit_indices(n: int) -> tuple:
    """The canonical coordinate order for capacity n (k = 0 throughout).

    Pairs (i, j) with i + j <= n, excluding (0, 0), grouped by j with the
    groups ordered j = 1, 0, 2, 3, ..., n and i descending inside each
    group. The embedding dimension is n + n(n+1)/2.
    """
    if not isinstance(n, int) or n < 1:
        raise ParameterError("capacity n must be an integer >= 1")
    out = []
    for j in [1, 0] + list(range(2, n + 1)):
        for i in range(n - j, -1, -1):
            if i == 0 and j == 0:
                continue
            out.append(OrbitIndex(i=i, j=j, k=0, n=n))
    return tuple(out)


def embedding_dimension(n: int) -> int:
    return n + n * (n + 1) // 2


def _slot_values(barcode: Barcode, n: int, m: int) -> list:
    """(x, y) pairs for all n slots, padded with (0, 0)."""
    bars = barcode.bars
    if len(bars) > n:
        raise CapacityError(f"barcode has {len(bars)} bars, capacity is {n}")
    slots = [(min(b.birth, m * b.persistence), b.persistence) for b in bars]
    slots.extend([(0, 0)] * (n - len(bars)))
    return slots


def _check_nm(n, m) -> None:
    if not isinstance(n, int) or n < 1:
        raise ParameterError("capacity n must be an integer >= 1")
    if not isinstance(m, int) or m < 1:
        raise ParameterError("regularization parameter m must be an integer >= 1")


def gamma_eval(barcode: Barcode, n: int, m: int, idx: OrbitIndex):
    """One coordinate by dynamic programming over the slots.

    Exact for integer inputs: no floating-point operations are introduced
    beyond those already present in the bar values.
    """
    _check_nm(n, m)
    if idx.n != n:
        raise ParameterError(f"orbit index has capacity {idx.n}, expected {n}")
    slots = _slot_values(barcode, n, m)
    i, j, k = idx.i, idx.j, idx.k
    # best[a][b][c] = max value using the slots seen so far with a slots in
    # the persistence role, b in the combined role, c in the birth role
    best = [[[None] * (k + 1) for _ in range(j + 1)] for _ in range(i + 1)]
    best[0][0][0] = 0
    for x, y in slots:
        for a in range(i, -1, -1):
            for b in range(j, -1, -1):
                for c in range(k, -1, -1):
                    candidate = best[a][b][c]
                    if a > 0 and best[a - 1][b][c] is not None:
                        v = best[a - 1][b][c] + y
                        if candidate is None or v > candidate:
                            candidate = v
                    if b > 0 and best[a][b - 1][c] is not None:
                        v = best[a][b - 1][c] + x + y
                        if candidate is None or v > candidate:
                            candidate = v
                    if c > 0 and best[a][b][c - 1] is not None:
                        v = best[a][b][c - 1] + x
                        if candidate is None or v > candidate:
                            candidate = v
                    best[a][b][c] = candidate
    return best[i][j][k]


def gamma_bruteforce(barcode: Barcode, n: int, m: int, idx: OrbitIndex):
    """Reference evaluation enumerating the whole row-permutation orbit.

    Refuses capacities above 7.
    """
    _check_nm(n, m)
    if idx.n != n:
        raise ParameterError(f"orbit index has capacity {idx.n}, expected {n}")
    if n > 7:
        raise RefusalError(f"brute-force coordinate limited to n <= 7, got {n}")
    slots = _slot_values(barcode, n, m)
    rows = (
        [(0, 1)] * idx.i
        + [(1, 1)] * idx.j
        + [(1, 0)] * idx.k
        + [(0, 0)] * (n - idx.i - idx.j - idx.k)
    )
    best = None
    for arrangement in set(permutations(rows)):
        value = 0
        for (ax, ay), (x, y) in zip(arrangement, slots):
            value += ax * x + ay * y
        if best is None or value > best:
            best = value
    return best


def regularization_parameter(barcodes, policy: str = "data_driven") -> int:
    """Smallest integer m >= 1 with birth <= m * persistence across the pool.

    Under the "universal" policy the fixed value 100 is returned without
    looking at the data. Under "data_driven" a pool without any bar of
    positive persistence is refused.
    """
    if policy not in M_POLICIES:
        raise ParameterError(f"m policy must be one of {M_POLICIES}")
    if policy == "universal":
        return M_UNIVERSAL
    positive = [
        bar for bc in barcodes for bar in bc.bars if bar.persistence > 0
    ]
    if not positive:
        raise DegenerateInputError(
            "data-driven regularization needs at least one bar of positive persistence"
        )
    m = max(1, max(math.ceil(bar.birth / bar.persistence) for bar in positive))
    # guard the float division against rounding down across an integer
    while any(bar.birth > m * bar.persistence for bar in positive):
        m += 1
    return m


def check_regularized(barcode: Barcode, m: int) -> bool:
    """True when every positive-persistence bar satisfies birth <= m * persistence."""
    _check_nm(1, m)
    return all(
        bar.birth <= m * bar.persistence
        for bar in barcode.bars
        if bar.persistence > 0
    )


def canonicalize(barcode: Barcode, n: int) -> Barcode:
    """Drop zero-persistence bars and sort by (birth, persistence).

    Zero-persistence bars are identified with empty padding slots, so they
    carry no information; a barcode with more than n positive bars does not
    fit capacity n.
    """
    if not isinstance(n, int) or n < 1:
        raise ParameterError("capacity n must be an integer >= 1")
    positive = sorted(b for b in barcode.bars if b.persistence > 0)
    if len(positive) > n:
        raise CapacityError(
            f"barcode has {len(positive)} positive bars, capacity is {n}"
        )
    return Barcode(bars=tuple(positive), homology_dim=barcode.homology_dim)


@dataclass(frozen=True)
class TropicalEmbedding:
    """Coordinate vector of one barcode in a fixed coordinate order."""

    values: tuple
    n: int
    m: int
    order: tuple  # permutation applied to the canonical coordinate order

    @property
    def dimension(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SortedEmbedding:
    """Coordinates sorted ascending: invariant under coordinate reordering."""

    values: tuple
    n: int
    m: int

    def __post_init__(self):
        values = tuple(self.values)
        if any(a > b for a, b in zip(values, values[1:])):
            raise ParameterError("sorted embedding values must be nondecreasing")
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return len(self.values)


def _coordinate_table(slots: list, n: int) -> list:
    """All k = 0 coordinates at once: table[a][b] for a + b <= n."""
    best = [[None] * (n + 1) for _ in range(n + 1)]
    best[0][0] = 0
    for x, y in slots:
        for a in range(n, -1, -1):
            row = best[a]
            above = best[a - 1] if a > 0 else None
            for b in range(n - a, -1, -1):
                candidate = row[b]
                if above is not None and above[b] is not None:
                    v = above[b] + y
                    if candidate is None or v > candidate:
                        candidate = v
                if b > 0 and row[b - 1] is not None:
                    v = row[b - 1] + x + y
                    if candidate is None or v > candidate:
                        candidate = v
                row[b] = candidate
    return best


def tropical_embedding(
    barcode: Barcode,
    n: int,
    m: int,
    order=None,
) -> TropicalEmbedding:
    """Vector of all k = 0 coordinates, canonical order unless reordered.

    The barcode is canonicalized first (zero-persistence bars dropped), must
    fit capacity n, and must be regularized for m.
    """
    _check_nm(n, m)
    canonical = canonicalize(barcode, n)
    if not check_regularized(canonical, m):
        offenders = [
            (b.birth, b.persistence)
            for b in canonical.bars
            if b.persistence > 0 and b.birth > m * b.persistence
        ]
        raise RegularizationError(
            f"bars {offenders} violate birth <= {m} * persistence; "
            "use a larger m (e.g. the universal policy)"
        )
    indices = orbit_indices(n)
    d = len(indices)
    if order is None:
        order = tuple(range(d))
    else:
        order = tuple(order)
        if sorted(order) != list(range(d)):
            raise ParameterError(f"order must be a permutation of 0..{d - 1}")
    slots = _slot_values(canonical, n, m)
    table = _coordinate_table(slots, n)
    base = [table[idx.i][idx.j] for idx in indices]
    values = tuple(base[order[t]] for t in range(d))
    return TropicalEmbedding(values=values, n=n, m=m, order=order)


def sufficient_statistic(barcode: Barcode, n: int, m: int) -> SortedEmbedding:
    """Sorted coordinate vector; independent of any coordinate reordering."""
    emb = tropical_embedding(barcode, n, m)
    return SortedEmbedding(values=tuple(sorted(emb.values)), n=n, m=m)
