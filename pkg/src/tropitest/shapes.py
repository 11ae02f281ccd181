"""Synthetic point clouds sampled from parametric shapes, plus distance matrices.

Shapes are sampled uniformly with respect to the natural measure of the ideal
shape (arc length for curves, surface area for surfaces, area for the annulus
region) and then perturbed by isotropic Gaussian observation noise. Sampling
is deterministic given (spec, count, noise_sd, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InputError, ParameterError, ParseError

TWO_PI = 2.0 * math.pi

# kind -> (required parameter names, minimal ambient dimension)
SHAPE_KINDS = {
    "circle": (("radius",), 2),
    "annulus": (("inner_radius", "outer_radius"), 2),
    "figure_eight": (("radius",), 2),
    "sphere": (("radius",), 3),
    "torus": (("ring_radius", "tube_radius"), 3),
    "cluster_blob": (("spread",), 1),
}


@dataclass(frozen=True)
class ShapeSpec:
    """Description of an ideal shape to sample from.

    kind: one of circle, annulus, figure_eight, sphere, torus, cluster_blob.
    parameters: named positive reals; see SHAPE_KINDS for the required names.
    ambient_dim: dimension of the space the points live in. Planar shapes are
        embedded in the first two coordinates, surfaces in the first three.
    """

    kind: str
    parameters: dict = field(default_factory=dict)
    ambient_dim: int = 2

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ParameterError(
                f"unknown shape kind {self.kind!r}; expected one of {sorted(SHAPE_KINDS)}"
            )
        required, min_dim = SHAPE_KINDS[self.kind]
        missing = [name for name in required if name not in self.parameters]
        if missing:
            raise ParameterError(f"{self.kind}: missing parameter(s) {missing}")
        extra = [name for name in self.parameters if name not in required]
        if extra:
            raise ParameterError(f"{self.kind}: unknown parameter(s) {extra}")
        for name in required:
            value = self.parameters[name]
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{self.kind}: parameter {name!r} must be a positive real")
        if not isinstance(self.ambient_dim, int) or self.ambient_dim < min_dim:
            raise ParameterError(
                f"{self.kind}: ambient_dim must be an integer >= {min_dim}"
            )
        if self.kind == "annulus":
            if not self.parameters["inner_radius"] < self.parameters["outer_radius"]:
                raise ParameterError("annulus: inner_radius must be < outer_radius")
        if self.kind == "torus":
            if not self.parameters["tube_radius"] < self.parameters["ring_radius"]:
                raise ParameterError("torus: tube_radius must be < ring_radius")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": dict(self.parameters),
            "ambient_dim": self.ambient_dim,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ShapeSpec":
        if not isinstance(data, dict):
            raise ParseError("shape spec: expected a JSON object")
        unknown = set(data) - {"kind", "parameters", "ambient_dim"}
        if unknown:
            raise ParseError(f"shape spec: unknown field(s) {sorted(unknown)}")
        try:
            kind = data["kind"]
        except KeyError:
            raise ParseError("shape spec: missing field 'kind'") from None
        params = data.get("parameters", {})
        ambient = data.get("ambient_dim", SHAPE_KINDS.get(kind, ((), 2))[1])
        return cls(kind=kind, parameters=params, ambient_dim=ambient)


def load_shape_spec(path) -> ShapeSpec:
    """Read a ShapeSpec from a JSON file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read shape spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return ShapeSpec.from_dict(data)


@dataclass(frozen=True)
class PointCloud:
    """A finite set of points in Euclidean space, one point per row."""

    points: np.ndarray
    label: str | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InputError("point cloud must be a nonempty 2-d array")
        if not np.all(np.isfinite(pts)):
            raise InputError("point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative matrix of pairwise distances with zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InputError("distance matrix must be square and nonempty")
        if not np.all(np.isfinite(a)):
            raise InputError("distance matrix contains non-finite entries")
        if np.any(a < 0):
            raise InputError("distance matrix contains negative entries")
        if np.any(np.diagonal(a) != 0):
            raise InputError("distance matrix diagonal must be zero")
        if not np.array_equal(a, a.T):
            raise InputError("distance matrix is not symmetric")
        _check_triangle_sampled(a)
        object.__setattr__(self, "entries", a)

    def __len__(self) -> int:
        return self.entries.shape[0]

    def enclosing_radius(self) -> float:
        """min over points of the max distance to any other point.

        Every homology class of the distance complex dies at or before this
        scale, so it is the natural default truncation scale.
        """
        return float(np.min(np.max(self.entries, axis=1)))


def _check_triangle_sampled(a: np.ndarray, max_triples: int = 200) -> None:
    # The triangle inequality is verified probabilistically on sampled
    # triples; a full check is cubic and redundant for metric inputs.
    n = a.shape[0]
    if n < 3:
        return
    rng = np.random.default_rng(n)
    i, j, k = rng.integers(0, n, size=(3, max_triples))
    tol = 1e-9 * max(float(a.max()), 1.0)
    if np.any(a[i, k] > a[i, j] + a[j, k] + tol):
        raise InputError("distance matrix violates the triangle inequality")


def pairwise_distances(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean distance matrix of a point cloud."""
    if len(cloud) == 1:
        return DistanceMatrix(np.zeros((1, 1)))
    return DistanceMatrix(squareform(pdist(cloud.points)))


def sample_shape(
    spec: ShapeSpec,
    count: int,
    noise_sd: float = 0.0,
    seed: int = 0,
) -> PointCloud:
    """Draw `count` noisy points from the ideal shape described by `spec`.

    Points are sampled uniformly with respect to the shape's intrinsic
    measure, embedded into `spec.ambient_dim` coordinates (trailing
    coordinates zero), then shifted by isotropic Gaussian noise with
    standard deviation `noise_sd`. Output is bit-identical for equal
    (spec, count, noise_sd, seed).
    """
    if not isinstance(count, int) or count < 1:
        raise ParameterError("count must be a positive integer")
    if not (isinstance(noise_sd, (int, float)) and math.isfinite(noise_sd) and noise_sd >= 0):
        raise ParameterError("noise_sd must be a finite nonnegative real")
    rng = np.random.default_rng(seed)
    p = spec.parameters
    if spec.kind == "circle":
        theta = rng.uniform(0.0, TWO_PI, size=count)
        base = p["radius"] * np.column_stack([np.cos(theta), np.sin(theta)])
    elif spec.kind == "annulus":
        theta = rng.uniform(0.0, TWO_PI, size=count)
        r0, r1 = p["inner_radius"], p["outer_radius"]
        # sqrt transform makes the radius density proportional to r,
        # i.e. uniform with respect to area on the annulus region
        rad = np.sqrt(rng.uniform(0.0, 1.0, size=count) * (r1 * r1 - r0 * r0) + r0 * r0)
        base = np.column_stack([rad * np.cos(theta), rad * np.sin(theta)])
    elif spec.kind == "figure_eight":
        r = p["radius"]
        lobe = rng.integers(0, 2, size=count)
        theta = rng.uniform(0.0, TWO_PI, size=count)
        cx = np.where(lobe == 0, -r, r)
        base = np.column_stack([cx + r * np.cos(theta), r * np.sin(theta)])
    elif spec.kind == "sphere":
        g = rng.standard_normal((count, 3))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        base = p["radius"] * g / norms
    elif spec.kind == "torus":
        base = _sample_torus(rng, count, p["ring_radius"], p["tube_radius"])
    elif spec.kind == "cluster_blob":
        base = p["spread"] * rng.standard_normal((count, spec.ambient_dim))
    else:  # pragma: no cover - ShapeSpec already validates the kind
        raise ParameterError(f"unknown shape kind {spec.kind!r}")

    points = np.zeros((count, spec.ambient_dim))
    points[:, : base.shape[1]] = base
    if noise_sd > 0:
        points = points + rng.normal(0.0, noise_sd, size=points.shape)
    return PointCloud(points=points, label=spec.kind)


def _sample_torus(rng: np.random.Generator, count: int, ring: float, tube: float) -> np.ndarray:
    """Uniform sampling on a torus surface by rejection on the tube angle.

    The surface element is proportional to ring + tube*cos(theta), so a
    uniform tube angle is accepted with probability proportional to that
    factor; the ring angle is uniform.
    """
    thetas = np.empty(0)
    while thetas.size < count:
        want = count - thetas.size
        batch = max(2 * want, 64)
        cand = rng.uniform(0.0, TWO_PI, size=batch)
        u = rng.uniform(0.0, 1.0, size=batch)
        keep = cand[u * (ring + tube) <= ring + tube * np.cos(cand)]
        thetas = np.concatenate([thetas, keep])
    theta = thetas[:count]
    phi = rng.uniform(0.0, TWO_PI, size=count)
    rad = ring + tube * np.cos(theta)
    return np.column_stack([rad * np.cos(phi), rad * np.sin(phi), tube * np.sin(theta)])


def save_cloud_csv(path, cloud: PointCloud) -> None:
    """Write one point per row as comma-separated coordinates, no header."""
    np.savetxt(path, cloud.points, delimiter=",", fmt="%.17g")


def load_cloud_csv(path, label: str | None = None) -> PointCloud:
    """Read a point cloud written by save_cloud_csv.

    Raises ParseError naming the file and row on non-numeric fields, and
    InputError on ragged rows or an empty file.
    """
    rows = []
    width = None
    try:
        fh = open(path)
    except OSError as exc:
        raise InputError(f"cannot read point cloud {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            fields = text.split(",")
            try:
                row = [float(f) for f in fields]
            except ValueError:
                raise ParseError(f"{path}: row {lineno}: non-numeric field") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputError(
                    f"{path}: row {lineno}: expected {width} columns, got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise InputError(f"{path}: point cloud file is empty")
    return PointCloud(points=np.array(rows, dtype=np.float64), label=label)


def load_distance_csv(path) -> DistanceMatrix:
    """Read a square distance matrix from CSV (same format as point clouds)."""
    cloud_like = load_cloud_csv(path)
    return DistanceMatrix(entries=cloud_like.points)


def save_distance_csv(path, dm: DistanceMatrix) -> None:
    np.savetxt(path, dm.entries, delimiter=",", fmt="%.17g")
