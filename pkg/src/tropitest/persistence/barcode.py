"""Bar and Barcode containers plus their JSON form.

A bar is stored as (birth, persistence); its death is birth + persistence.
Zero persistence is allowed. The JSON form lists [birth, death] rows sorted
by (birth, death), under {"dim": ..., "bars": [...]}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ..errors import InputError, ParseError


@dataclass(frozen=True, order=True)
class Bar:
    """A single persistence interval [birth, birth + persistence)."""

    birth: float
    persistence: float

    def __post_init__(self):
        for name in ("birth", "persistence"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InputError(f"bar {name} must be a real number")
            if not math.isfinite(value):
                raise InputError(f"bar {name} must be finite")
        if self.birth < 0:
            raise InputError("bar birth must be >= 0")
        if self.persistence < 0:
            raise InputError("bar persistence must be >= 0")

    @property
    def death(self):
        return self.birth + self.persistence


@dataclass(frozen=True)
class Barcode:
    """All finite bars of one homology dimension."""

    bars: tuple
    homology_dim: int

    def __post_init__(self):
        bars = tuple(self.bars)
        for bar in bars:
            if not isinstance(bar, Bar):
                raise InputError("barcode entries must be Bar instances")
        if not isinstance(self.homology_dim, int) or self.homology_dim < 0:
            raise InputError("homology_dim must be a nonnegative integer")
        object.__setattr__(self, "bars", bars)

    def __len__(self) -> int:
        return len(self.bars)

    def positive_bars(self) -> tuple:
        return tuple(b for b in self.bars if b.persistence > 0)

    def to_dict(self) -> dict:
        ordered = sorted(self.bars)
        return {
            "dim": self.homology_dim,
            "bars": [[b.birth, b.death] for b in ordered],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Barcode":
        if not isinstance(data, dict) or "dim" not in data or "bars" not in data:
            raise ParseError("barcode JSON must carry 'dim' and 'bars'")
        bars = []
        for row in data["bars"]:
            if not isinstance(row, (list, tuple)) or len(row) != 2:
                raise ParseError("barcode 'bars' rows must be [birth, death] pairs")
            birth, death = row
            if death < birth:
                raise ParseError(f"barcode bar [{birth}, {death}] has death < birth")
            bars.append(Bar(birth=birth, persistence=death - birth))
        return cls(bars=tuple(sorted(bars)), homology_dim=data["dim"])


def save_barcode_json(path, barcode: Barcode) -> None:
    with open(path, "w") as fh:
        json.dump(barcode.to_dict(), fh)
        fh.write("\n")


def load_barcode_json(path) -> Barcode:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read barcode {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return Barcode.from_dict(data)
