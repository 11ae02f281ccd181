"""Barcode computation by boundary-matrix reduction over GF(2).

Columns are stored as Python integers used as bitsets over row indices, so
a column addition is one big-int XOR and the pivot is the highest set bit.
The matrix decomposes by dimension: pairs in homology dimension h come from
reducing the boundary of the (h+1)-simplices against h-simplex rows, and the
positivity of h-simplices is settled by reducing their own boundary columns,
skipping columns already cleared by pivots found one dimension up (twist
optimization).
"""

from __future__ import annotations

from ..errors import ConfigError, ParameterError
from .barcode import Bar, Barcode
from .rips import Filtration

ESSENTIAL_POLICIES = ("truncate", "drop")


def _reduce_gf2(columns: list, n_rows: int, cleared=frozenset()):
    """Left-to-right column reduction; returns {pivot row: column index}."""
    owner = [-1] * n_rows
    reduced = list(columns)
    for idx, col in enumerate(reduced):
        if idx in cleared:
            reduced[idx] = 0
            continue
        while col:
            pivot = col.bit_length() - 1
            other = owner[pivot]
            if other < 0:
                owner[pivot] = idx
                break
            col ^= reduced[other]
        reduced[idx] = col
    pairs = {row: col for row, col in enumerate(owner) if col >= 0}
    return pairs, reduced


def _boundary_columns(simplices: list, face_position: dict) -> list:
    """Bitset boundary columns of (k+1)-vertex simplices over k-vertex rows."""
    pow2 = [1 << i for i in range(len(face_position))]
    columns = []
    for verts, _ in simplices:
        bits = 0
        for omit in range(len(verts)):
            bits |= pow2[face_position[verts[:omit] + verts[omit + 1 :]]]
        columns.append(bits)
    return columns


def compute_barcode(
    filtration: Filtration,
    homology_dim: int,
    essential_policy: str = "truncate",
) -> Barcode:
    """Finite bars of one homology dimension of a filtration.

    A pairing (simplex created at s, simplex destroyed at t) contributes a
    bar only when s < t. Essential classes (never destroyed within the
    filtration) are truncated to death = max_scale under "truncate" and
    omitted under "drop".
    """
    h = homology_dim
    if not isinstance(h, int) or h < 0:
        raise ParameterError("homology_dim must be a nonnegative integer")
    if h >= filtration.max_dim:
        raise ConfigError(
            f"homology_dim {h} requires a filtration of max_dim > {h}, "
            f"got max_dim {filtration.max_dim}"
        )
    if essential_policy not in ESSENTIAL_POLICIES:
        raise ParameterError(f"essential_policy must be one of {ESSENTIAL_POLICIES}")

    faces, cells, cofacets = [], [], []
    for verts, scale in filtration.simplices:
        width = len(verts)
        if width == h + 1:
            cells.append((verts, scale))
        elif width == h + 2:
            cofacets.append((verts, scale))
        elif width == h:
            faces.append((verts, scale))

    position = {verts: idx for idx, (verts, _) in enumerate(cells)}
    pairs, _ = _reduce_gf2(_boundary_columns(cofacets, position), len(cells))

    bars = []
    for row, col_idx in pairs.items():
        birth = cells[row][1]
        death = cofacets[col_idx][1]
        if death > birth:
            bars.append(Bar(birth=birth, persistence=death - birth))

    # essential classes: positive h-simplices that never became a pivot row
    if essential_policy == "truncate":
        if h == 0:
            positive = range(len(cells))
        else:
            face_pos = {verts: idx for idx, (verts, _) in enumerate(faces)}
            own_columns = _boundary_columns(cells, face_pos)
            # pivot rows found one dimension up are positive already (twist)
            _, reduced = _reduce_gf2(own_columns, len(faces), cleared=set(pairs))
            positive = [idx for idx, col in enumerate(reduced) if col == 0]
        for idx in positive:
            if idx not in pairs:
                birth = cells[idx][1]
                bars.append(Bar(birth=birth, persistence=filtration.max_scale - birth))

    return Barcode(bars=tuple(sorted(bars)), homology_dim=h)
