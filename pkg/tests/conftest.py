from __future__ import annotations

import numpy as np
import pytest

from tropitest.persistence import Bar, Barcode


def random_integer_barcode(rng, max_bars: int, m: int, *, birth_cap: int = 12) -> Barcode:
    """Barcode with integer (birth, persistence) pairs regularized for m."""
    bars = []
    for _ in range(rng.integers(0, max_bars + 1)):
        pers = int(rng.integers(1, 7))
        birth = int(rng.integers(0, min(birth_cap, m * pers) + 1))
        bars.append(Bar(birth, pers))
    return Barcode(bars, homology_dim=1)


def random_float_barcode(rng, max_bars: int, m: int) -> Barcode:
    bars = []
    for _ in range(rng.integers(0, max_bars + 1)):
        pers = float(rng.uniform(0.05, 4.0))
        birth = float(rng.uniform(0.0, m * pers))
        bars.append(Bar(birth, pers))
    return Barcode(bars, homology_dim=1)


def random_point_cloud(rng, count: int, dim: int = 2) -> np.ndarray:
    return rng.standard_normal((count, dim)) * 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20260821)
