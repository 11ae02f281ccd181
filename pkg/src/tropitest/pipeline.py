"""End-to-end orchestration: collections in, deterministic report out.

The pipeline loads two collections (point clouds, distance matrices, or
precomputed barcodes), computes barcodes where needed, pools them to fix
the embedding capacity n and the regularization parameter m, embeds every
barcode as its sorted coordinate vector, and runs the two-sample
permutation test. The report is emitted as deterministic JSON: keys sorted,
floats printed with 17 significant digits, so byte-identical configs give
byte-identical reports.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .energy import Sample, TestResult, permutation_test
from .errors import (
    ConfigError,
    InputError,
    ParameterError,
    ParseError,
    RegularizationError,
)
from .persistence import (
    Bar,
    Barcode,
    build_rips_filtration,
    compute_barcode,
    load_barcode_json,
)
from .persistence.reduction import ESSENTIAL_POLICIES
from .shapes import (
    DistanceMatrix,
    PointCloud,
    load_cloud_csv,
    load_distance_csv,
    pairwise_distances,
)
from .tropical import (
    M_POLICIES,
    canonicalize,
    check_regularized,
    embedding_dimension,
    regularization_parameter,
    sufficient_statistic,
)

COLLECTION_KINDS = ("pointclouds", "distance_matrices", "barcodes")

_MANIFEST_KEYS = {
    "pointclouds": "clouds",
    "distance_matrices": "matrices",
    "barcodes": "barcodes",
}
_FILE_SUFFIX = {
    "pointclouds": ".csv",
    "distance_matrices": ".csv",
    "barcodes": ".json",
}


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one pipeline run depends on."""

    a: str
    b: str
    kind: str = "pointclouds"
    homology_dim: int = 1
    max_dim: int | None = None
    max_scale: float | None = None  # None means the enclosing-radius default
    essential_policy: str = "truncate"
    m_policy: str = "data_driven"
    m: int | None = None
    alpha: float = 0.05
    num_permutations: int = 999
    seed: int = 7
    out: str | None = None
    embedding_dump_a: str | None = None
    embedding_dump_b: str | None = None
    clip: bool = False

    def __post_init__(self):
        if self.kind not in COLLECTION_KINDS:
            raise ConfigError(f"kind must be one of {COLLECTION_KINDS}")
        if self.essential_policy not in ESSENTIAL_POLICIES:
            raise ConfigError(f"essential_policy must be one of {ESSENTIAL_POLICIES}")
        if self.m_policy not in M_POLICIES:
            raise ConfigError(f"m_policy must be one of {M_POLICIES}")
        if not isinstance(self.homology_dim, int) or self.homology_dim < 0:
            raise ConfigError("homology_dim must be a nonnegative integer")
        if self.max_dim is not None and (
            not isinstance(self.max_dim, int) or self.max_dim <= self.homology_dim
        ):
            raise ConfigError("max_dim must be an integer above homology_dim")
        if self.m is not None and (not isinstance(self.m, int) or self.m < 1):
            raise ConfigError("explicit m must be an integer >= 1")

    def resolved_max_dim(self) -> int:
        return self.max_dim if self.max_dim is not None else self.homology_dim + 1

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "kind": self.kind,
            "homology_dim": self.homology_dim,
            "max_dim": self.max_dim,
            "max_scale": self.max_scale,
            "essential_policy": self.essential_policy,
            "m_policy": self.m_policy,
            "m": self.m,
            "alpha": self.alpha,
            "permutations": self.num_permutations,
            "seed": self.seed,
            "out": self.out,
            "embedding_dump_a": self.embedding_dump_a,
            "embedding_dump_b": self.embedding_dump_b,
            "clip": self.clip,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        if not isinstance(data, dict):
            raise ConfigError("pipeline config must be a JSON object")
        known = {
            "a", "b", "kind", "homology_dim", "max_dim", "max_scale",
            "essential_policy", "m_policy", "m", "alpha", "permutations",
            "seed", "out", "embedding_dump_a", "embedding_dump_b", "clip",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s) {sorted(unknown)}")
        if "a" not in data or "b" not in data:
            raise ConfigError("config must name both input collections 'a' and 'b'")
        max_scale = data.get("max_scale")
        if isinstance(max_scale, str):
            if max_scale != "auto":
                raise ConfigError("max_scale must be a number or \"auto\"")
            max_scale = None
        kwargs = dict(data)
        kwargs["max_scale"] = max_scale
        if "permutations" in kwargs:
            kwargs["num_permutations"] = kwargs.pop("permutations")
        return cls(**kwargs)


def load_pipeline_config(path) -> PipelineConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return PipelineConfig.from_dict(data)


def load_collection(path, kind: str) -> list:
    """Items of one collection, as (object, label) pairs in manifest order.

    `path` is either a manifest JSON file or a directory; a directory is
    read as all files with the kind's suffix, sorted by name.
    """
    if kind not in COLLECTION_KINDS:
        raise ConfigError(f"kind must be one of {COLLECTION_KINDS}")
    base = Path(path)
    if not base.exists():
        raise InputError(f"collection path {path} does not exist")
    if base.is_dir():
        files = sorted(base.glob(f"*{_FILE_SUFFIX[kind]}"))
        manifest = base / "manifest.json"
        if manifest.exists():
            return _load_from_manifest(manifest, kind)
        entries = [(p, p.stem) for p in files]
    else:
        return _load_from_manifest(base, kind)
    if not entries:
        raise InputError(f"collection {path} is empty")
    return [(_load_item(p, kind, label), label) for p, label in entries]


def _load_from_manifest(manifest_path: Path, kind: str) -> list:
    try:
        with open(manifest_path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{manifest_path}: invalid JSON: {exc}") from exc
    key = _MANIFEST_KEYS[kind]
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{manifest_path}: manifest must carry a {key!r} list")
    entries = []
    for rank, row in enumerate(data[key]):
        if not isinstance(row, dict) or "path" not in row:
            raise ParseError(f"{manifest_path}: entry {rank} must carry a 'path'")
        rel = Path(row["path"])
        full = rel if rel.is_absolute() else manifest_path.parent / rel
        entries.append((full, row.get("label", full.stem)))
    if not entries:
        raise InputError(f"collection {manifest_path} is empty")
    return [(_load_item(p, kind, label), label) for p, label in entries]


def _load_item(path: Path, kind: str, label: str):
    if not path.exists():
        raise InputError(f"collection item {path} does not exist")
    if kind == "pointclouds":
        return load_cloud_csv(path, label=label)
    if kind == "distance_matrices":
        return load_distance_csv(path)
    return load_barcode_json(path)


def write_manifest(path, entries, kind: str) -> None:
    """Write a manifest JSON listing (relative path, label) rows."""
    key = _MANIFEST_KEYS[kind]
    payload = {key: [{"path": str(p), "label": label} for p, label in entries]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def worker_count() -> int:
    """Parallel workers for per-item fan-out, capped by TROPITEST_THREADS."""
    cap = os.environ.get("TROPITEST_THREADS")
    available = os.cpu_count() or 1
    if cap is None:
        return available
    try:
        cap = int(cap)
    except ValueError:
        raise ConfigError(f"TROPITEST_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(cap, available))


def _barcode_of(task) -> Barcode:
    dm, homology_dim, max_dim, max_scale, essential_policy = task
    filtration = build_rips_filtration(dm, max_dim=max_dim, max_scale=max_scale)
    return compute_barcode(filtration, homology_dim, essential_policy)


def barcodes_of_collection(items: list, config: PipelineConfig) -> list:
    """Barcode per collection item (items are (object, label) pairs)."""
    if config.kind == "barcodes":
        return [obj for obj, _ in items]
    if config.kind == "pointclouds":
        dms = [pairwise_distances(obj) for obj, _ in items]
    else:
        dms = [obj for obj, _ in items]
    tasks = [
        (dm, config.homology_dim, config.resolved_max_dim(), config.max_scale,
         config.essential_policy)
        for dm in dms
    ]
    workers = worker_count()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_barcode_of, tasks))
    return [_barcode_of(t) for t in tasks]


@dataclass(frozen=True)
class Report:
    """Test outcome plus everything needed to audit the run."""

    test_result: TestResult
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "test_result": self.test_result.to_dict(),
            "provenance": self.provenance,
        }


def pooled_capacity(barcodes: list) -> int:
    """Embedding capacity: the largest positive-bar count, floored at 1.

    An all-empty pool still needs a valid capacity; n = 1 embeds every empty
    barcode as the zero vector and the test degenerates gracefully.
    """
    counts = [len(bc.positive_bars()) for bc in barcodes]
    return max(1, max(counts, default=0))


def _clip_barcode(barcode: Barcode, m: int) -> Barcode:
    bars = tuple(
        Bar(birth=min(b.birth, m * b.persistence), persistence=b.persistence)
        for b in barcode.bars
    )
    return Barcode(bars=bars, homology_dim=barcode.homology_dim)


def _collection_summary(barcodes: list) -> dict:
    bar_counts = [len(bc.bars) for bc in barcodes]
    persistences = [b.persistence for bc in barcodes for b in bc.bars]
    return {
        "barcodes": len(barcodes),
        "total_bars": int(sum(bar_counts)),
        "max_bars": int(max(bar_counts, default=0)),
        "mean_bars": float(np.mean(bar_counts)) if bar_counts else 0.0,
        "max_persistence": float(max(persistences, default=0.0)),
        "mean_persistence": float(np.mean(persistences)) if persistences else 0.0,
    }


def run_pipeline(config: PipelineConfig) -> Report:
    """Execute the whole two-sample pipeline described by `config`."""
    items_a = load_collection(config.a, config.kind)
    items_b = load_collection(config.b, config.kind)
    barcodes_a = barcodes_of_collection(items_a, config)
    barcodes_b = barcodes_of_collection(items_b, config)
    pooled = barcodes_a + barcodes_b

    n = pooled_capacity(pooled)
    if config.m is not None:
        m = config.m
    elif config.m_policy == "data_driven":
        m = regularization_parameter(pooled, "data_driven")
    else:
        m = regularization_parameter(pooled, "universal")

    clipped = 0
    prepared_a, prepared_b = [], []
    for source, prepared in ((barcodes_a, prepared_a), (barcodes_b, prepared_b)):
        for rank, bc in enumerate(source):
            canon = canonicalize(bc, n)
            if not check_regularized(canon, m):
                if not config.clip:
                    raise RegularizationError(
                        f"barcode {rank} is not regularized for m = {m}; "
                        "rerun with clip enabled or a larger m"
                    )
                canon = _clip_barcode(canon, m)
                clipped += 1
            prepared.append(canon)

    vectors_a = [sufficient_statistic(bc, n, m).values for bc in prepared_a]
    vectors_b = [sufficient_statistic(bc, n, m).values for bc in prepared_b]
    sample_a = Sample(np.array(vectors_a, dtype=np.float64))
    sample_b = Sample(np.array(vectors_b, dtype=np.float64))

    if config.embedding_dump_a:
        save_embedding_json(config.embedding_dump_a, sample_a.vectors, n, m)
    if config.embedding_dump_b:
        save_embedding_json(config.embedding_dump_b, sample_b.vectors, n, m)

    result = permutation_test(
        sample_a,
        sample_b,
        alpha=config.alpha,
        num_permutations=config.num_permutations,
        seed=config.seed,
    )
    echo = config.to_dict()
    provenance = {
        "n": n,
        "m": m,
        "d": embedding_dimension(n),
        "clipped_barcodes": clipped,
        "collection_a": _collection_summary(barcodes_a),
        "collection_b": _collection_summary(barcodes_b),
        "software_version": __version__,
        "config": echo,
        "config_sha256": hashlib.sha256(
            deterministic_json(echo).encode()
        ).hexdigest(),
    }
    return Report(test_result=result, provenance=provenance)


def deterministic_json(value) -> str:
    """JSON text with sorted keys and 17-significant-digit floats.

    The builtin encoder formats floats by shortest round-trip, which is
    stable only per value; a fixed significant-digit format keeps reports
    byte-reproducible and diffable.
    """
    parts: list = []
    _emit(value, parts)
    return "".join(parts)


def _emit(value, parts: list) -> None:
    if value is None:
        parts.append("null")
    elif isinstance(value, bool) or isinstance(value, np.bool_):
        parts.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        parts.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ParameterError("reports cannot carry non-finite numbers")
        parts.append(format(value, ".17g"))
    elif isinstance(value, str):
        parts.append(json.dumps(value))
    elif isinstance(value, (list, tuple, np.ndarray)):
        parts.append("[")
        for rank, item in enumerate(value):
            if rank:
                parts.append(",")
            _emit(item, parts)
        parts.append("]")
    elif isinstance(value, dict):
        parts.append("{")
        for rank, key in enumerate(sorted(value)):
            if rank:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _emit(value[key], parts)
        parts.append("}")
    else:
        raise ParameterError(f"cannot serialize {type(value).__name__} deterministically")


def emit_report(report: Report, path) -> None:
    """Write the report as deterministic JSON."""
    text = deterministic_json(report.to_dict()) + "\n"
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write report {path}: {exc}") from exc


def save_embedding_json(path, vectors: np.ndarray, n: int, m: int) -> None:
    """Embedding dump: {"n", "m", "d", "vectors"} with rows in input order."""
    payload = {
        "n": n,
        "m": m,
        "d": int(vectors.shape[1]),
        "vectors": vectors,
    }
    try:
        with open(path, "w") as fh:
            fh.write(deterministic_json(payload))
            fh.write("\n")
    except OSError as exc:
        raise InputError(f"cannot write embedding dump {path}: {exc}") from exc


def load_embedding_json(path):
    """Read an embedding dump; returns (vectors, n, m)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read embedding dump {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    for key in ("n", "m", "d", "vectors"):
        if key not in data:
            raise ParseError(f"{path}: embedding dump missing field {key!r}")
    vectors = np.asarray(data["vectors"], dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[1] != data["d"]:
        raise InputError(f"{path}: vectors do not match the declared dimension")
    if data["d"] != embedding_dimension(data["n"]):
        raise InputError(f"{path}: d is inconsistent with n")
    return vectors, data["n"], data["m"]
