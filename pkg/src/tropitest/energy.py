"""Two-sample energy statistic and its Monte-Carlo permutation test.

The statistic compares two samples of vectors through Euclidean distances:

    E = 2 * mean(cross distances) - mean(within first) - mean(within second)

with the within-sample means taken over all ordered pairs, zero diagonal
included. E is nonnegative and vanishes exactly when the two empirical
distributions coincide, which makes it a natural test statistic for the
hypothesis that both samples come from one distribution.

The permutation test relabels the pooled vectors; each replicate draws its
permutation from an RNG seeded by (seed, replicate index), so results do
not depend on the order in which replicates are computed. When the pooled
size N is at most 8 and at least N! permutations are requested, the full
permutation group is enumerated instead (exact test).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError, ParameterError, ParseError

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Sample:
    """A sample of nondecreasing vectors (points of the ordered cone)."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise InputError("sample must be a nonempty 2-d array")
        if not np.all(np.isfinite(v)):
            raise InputError("sample contains non-finite values")
        if v.shape[1] > 1 and np.any(np.diff(v, axis=1) < 0):
            raise InputError("sample vectors must be nondecreasing")
        object.__setattr__(self, "vectors", v)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class TestResult:
    """Outcome of one two-sample permutation test.

    reject holds exactly when the observed statistic reaches the permutation
    cutoff and the Monte-Carlo p-value is at most alpha; on degenerate
    permutation distributions (all values tied) the p-value condition is the
    binding one.
    """

    statistic: float
    critical_value: float
    p_value: float
    alpha: float
    num_permutations: int
    reject: bool
    seed: int

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "permutations": self.num_permutations,
            "reject": self.reject,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TestResult":
        try:
            return cls(
                statistic=data["statistic"],
                critical_value=data["critical_value"],
                p_value=data["p_value"],
                alpha=data["alpha"],
                num_permutations=data["permutations"],
                reject=data["reject"],
                seed=data["seed"],
            )
        except KeyError as exc:
            raise ParseError(f"test result JSON missing field {exc}") from exc


def _require_comparable(first: Sample, second: Sample) -> None:
    if first.dim != second.dim:
        raise InputError(
            f"samples have different vector dimensions: {first.dim} vs {second.dim}"
        )


def energy_statistic(first: Sample, second: Sample) -> float:
    """The energy distance statistic between two samples."""
    _require_comparable(first, second)
    a, b = first.vectors, second.vectors
    # canonical operand order: swapping the arguments must return the
    # bit-identical value, and float summation order is not commutative
    if (b.shape[0], b.tobytes()) < (a.shape[0], a.tobytes()):
        a, b = b, a
    return float(
        2.0 * cdist(a, b).mean() - cdist(a, a).mean() - cdist(b, b).mean()
    )


def _pooled_distances(first: Sample, second: Sample) -> np.ndarray:
    pooled = np.vstack([first.vectors, second.vectors])
    return cdist(pooled, pooled)


def _stats_from_membership(dist: np.ndarray, member: np.ndarray, n1: int, n2: int):
    """Energy statistics for a batch of group-1 membership indicators.

    member is a (replicates, N) 0/1 array; row sums must equal n1.
    """
    zd = member @ dist
    within1 = np.einsum("ij,ij->i", zd, member)
    row = zd.sum(axis=1)
    cross = row - within1
    within2 = dist.sum() - 2.0 * row + within1
    return 2.0 * cross / (n1 * n2) - within1 / (n1 * n1) - within2 / (n2 * n2)


def _replicate_membership(n1: int, total: int, seed: int, replicate: int) -> np.ndarray:
    """Group-1 indicator of one replicate, by a counter-based RNG stream.

    Seeding by (seed, replicate) makes every replicate reproducible on its
    own, independent of evaluation order.
    """
    rng = np.random.default_rng(np.random.SeedSequence((seed & _SEED_MASK, replicate)))
    perm = rng.permutation(total)
    member = np.zeros(total)
    member[perm[:n1]] = 1.0
    return member


def _exact_applicable(total: int, num_permutations: int) -> bool:
    return total <= 8 and num_permutations >= math.factorial(total)


def _null_values(first: Sample, second: Sample, num_permutations: int, seed: int):
    """Permuted statistics plus the effective permutation count."""
    n1, n2 = len(first), len(second)
    total = n1 + n2
    dist = _pooled_distances(first, second)
    if _exact_applicable(total, num_permutations):
        # every relabeling with the same group-1 index set gives the same
        # value, so enumerate index sets and repeat with that multiplicity
        member = np.zeros((math.comb(total, n1), total))
        for row, chosen in enumerate(combinations(range(total), n1)):
            member[row, chosen] = 1.0
        values = _stats_from_membership(dist, member, n1, n2)
        multiplicity = math.factorial(n1) * math.factorial(n2)
        return np.repeat(values, multiplicity), math.factorial(total)
    member = np.empty((num_permutations, total))
    for r in range(num_permutations):
        member[r] = _replicate_membership(n1, total, seed, r)
    return _stats_from_membership(dist, member, n1, n2), num_permutations


def permutation_null_distribution(
    first: Sample,
    second: Sample,
    num_permutations: int,
    seed: int,
) -> np.ndarray:
    """The permuted-statistic values the test would use, for diagnostics."""
    _validate_test_args(first, second, num_permutations)
    values, _ = _null_values(first, second, num_permutations, seed)
    return values


def _validate_test_args(first, second, num_permutations, alpha=None) -> None:
    _require_comparable(first, second)
    if alpha is not None and not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
        raise ParameterError("alpha must lie strictly between 0 and 1")
    if not isinstance(num_permutations, int) or num_permutations < 1:
        raise ParameterError("num_permutations must be a positive integer")


def permutation_test(
    first: Sample,
    second: Sample,
    alpha: float = 0.05,
    num_permutations: int = 999,
    seed: int = 0,
) -> TestResult:
    """Two-sample energy test by Monte-Carlo permutation.

    The cutoff is the k-th smallest permuted statistic with
    k = ceil((1 - alpha) * B); the p-value is (1 + #{permuted >= observed})
    divided by (B + 1), which is exact-level by exchangeability.
    """
    _validate_test_args(first, second, num_permutations, alpha)
    observed = energy_statistic(first, second)
    values, effective = _null_values(first, second, num_permutations, seed)
    k = math.ceil((1.0 - alpha) * effective)
    critical = float(np.partition(values, k - 1)[k - 1])
    p_value = (1.0 + int(np.count_nonzero(values >= observed))) / (effective + 1.0)
    reject = bool(observed >= critical and p_value <= alpha)
    return TestResult(
        statistic=observed,
        critical_value=critical,
        p_value=p_value,
        alpha=float(alpha),
        num_permutations=effective,
        reject=reject,
        seed=seed,
    )
