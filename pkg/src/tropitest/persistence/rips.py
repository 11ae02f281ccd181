"""Vietoris-Rips filtrations over a distance matrix.

A simplex enters at the largest pairwise distance among its vertices;
vertices enter at scale zero. Simplices are kept in filtration order,
sorted by (scale, dimension, lexicographic vertex order), which puts every
face no later than its cofaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, ParameterError
from ..shapes import DistanceMatrix


@dataclass(frozen=True)
class Filtration:
    """Sorted simplexwise filtration of a finite metric space."""

    simplices: tuple  # ((v0, ..., vk), scale) in filtration order
    n_vertices: int
    max_dim: int
    max_scale: float

    def __len__(self) -> int:
        return len(self.simplices)

    def in_dimension(self, dim: int) -> list:
        """Simplices of one dimension, in filtration order."""
        return [(v, s) for v, s in self.simplices if len(v) == dim + 1]


def validate_filtration(filtration: Filtration) -> None:
    """Check filtration-order and face-closure invariants; raise InputError."""
    position = {}
    for idx, (verts, scale) in enumerate(filtration.simplices):
        if tuple(sorted(verts)) != verts:
            raise InputError(f"simplex {verts} is not sorted")
        if not (0.0 <= scale <= filtration.max_scale):
            raise InputError(f"simplex {verts} has scale {scale} out of range")
        if len(verts) - 1 > filtration.max_dim:
            raise InputError(f"simplex {verts} exceeds max_dim")
        for omit in range(len(verts)):
            face = verts[:omit] + verts[omit + 1 :]
            if not face:
                continue
            at = position.get(face)
            if at is None:
                raise InputError(f"face {face} of {verts} is missing")
            if filtration.simplices[at][1] > scale:
                raise InputError(f"face {face} appears after coface {verts}")
        position[verts] = idx
    keys = [(s, len(v), v) for v, s in filtration.simplices]
    if keys != sorted(keys):
        raise InputError("filtration is not sorted by (scale, dim, vertices)")


def build_rips_filtration(
    dm: DistanceMatrix,
    max_dim: int,
    max_scale: float | None = None,
) -> Filtration:
    """Enumerate all Rips simplices of dimension <= max_dim and scale <= max_scale.

    max_scale defaults to the enclosing radius of the metric space, at which
    scale the complex has become a cone and carries no homology above
    dimension zero.
    """
    if not isinstance(max_dim, int) or max_dim < 1:
        raise ParameterError("max_dim must be an integer >= 1")
    if max_scale is None:
        max_scale = dm.enclosing_radius()
    if not (isinstance(max_scale, (int, float)) and math.isfinite(max_scale) and max_scale >= 0):
        raise ParameterError("max_scale must be a finite nonnegative real")
    max_scale = float(max_scale)

    d = dm.entries
    n = d.shape[0]
    adj = d <= max_scale
    np.fill_diagonal(adj, False)

    simplices = [((i,), 0.0) for i in range(n)]
    ei, ej = np.nonzero(np.triu(adj, 1))
    edge_scales = d[ei, ej]
    edges = [
        ((int(i), int(j)), float(s)) for i, j, s in zip(ei, ej, edge_scales)
    ]
    simplices.extend(edges)

    if max_dim >= 2:
        if n <= 200:
            # one shot over all index triples; the mask is n^3 booleans
            rng_idx = np.arange(n)
            i3, j3, k3 = np.meshgrid(rng_idx, rng_idx, rng_idx, indexing="ij", sparse=True)
            mask = (i3 < j3) & (j3 < k3) & adj[i3, j3] & adj[i3, k3] & adj[j3, k3]
            ti, tj, tk = np.nonzero(mask)
            tri_scales = np.maximum(np.maximum(d[ti, tj], d[ti, tk]), d[tj, tk])
            triangles = [
                ((int(i), int(j), int(k)), float(s))
                for i, j, k, s in zip(ti, tj, tk, tri_scales)
            ]
        else:
            triangles = []
            for (i, j), scale in edges:
                ws = np.flatnonzero(adj[i, j + 1 :] & adj[j, j + 1 :]) + j + 1
                if ws.size == 0:
                    continue
                tri_scales = np.maximum(scale, np.maximum(d[i, ws], d[j, ws]))
                triangles.extend(
                    ((i, j, int(w)), float(s)) for w, s in zip(ws, tri_scales)
                )
        simplices.extend(triangles)

        # clique expansion above dimension 2: extend each clique by common
        # neighbors beyond its last vertex, tracking the running max distance
        frontier = triangles if max_dim >= 3 else []
        dim = 3
        while dim <= max_dim and frontier:
            next_frontier = []
            for verts, scale in frontier:
                common = adj[verts[0]]
                for v in verts[1:]:
                    common = common & adj[v]
                last = verts[-1]
                ws = np.flatnonzero(common[last + 1 :]) + last + 1
                if ws.size == 0:
                    continue
                new_scales = np.maximum(scale, d[np.ix_(list(verts), ws)].max(axis=0))
                for w, new_scale in zip(ws, new_scales):
                    new_verts = verts + (int(w),)
                    simplices.append((new_verts, float(new_scale)))
                    next_frontier.append((new_verts, float(new_scale)))
            frontier = next_frontier
            dim += 1

    simplices.sort(key=lambda item: (item[1], len(item[0]), item[0]))
    return Filtration(
        simplices=tuple(simplices),
        n_vertices=n,
        max_dim=max_dim,
        max_scale=max_scale,
    )
