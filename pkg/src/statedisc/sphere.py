"""Icosahedron subdivision used to quantize directions on the unit sphere."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ParameterError

_PHI = (1.0 + np.sqrt(5.0)) / 2.0

_ICO_VERTS = np.array(
    [
        [-1, _PHI, 0],
        [1, _PHI, 0],
        [-1, -_PHI, 0],
        [1, -_PHI, 0],
        [0, -1, _PHI],
        [0, 1, _PHI],
        [0, -1, -_PHI],
        [0, 1, -_PHI],
        [_PHI, 0, -1],
        [_PHI, 0, 1],
        [-_PHI, 0, -1],
        [-_PHI, 0, 1],
    ],
    dtype=np.float64,
)

_ICO_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
)


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def subdivide(verts: np.ndarray, faces: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Split every edge into ``r`` segments (each face into r^2 triangles).

    Points on a shared edge are created once per edge, so no vertex is
    duplicated. New vertices are projected onto the unit sphere.
    """
    if r < 1:
        raise ParameterError(f"subdivision factor must be >= 1, got {r}")
    if r == 1:
        return verts, faces
    points = [v for v in verts]
    edge_cache: dict[tuple[int, int], list[int]] = {}

    def edge_points(a: int, b: int) -> list[int]:
        # indices of the r + 1 points from a to b, inclusive
        key = (min(a, b), max(a, b))
        if key not in edge_cache:
            lo, hi = key
            idx = [lo]
            for i in range(1, r):
                points.append(verts[lo] + (verts[hi] - verts[lo]) * (i / r))
                idx.append(len(points) - 1)
            idx.append(hi)
            edge_cache[key] = idx
        idx = edge_cache[key]
        return idx if a == key[0] else idx[::-1]

    new_faces = []
    for a, b, c in faces:
        ab = edge_points(a, b)
        ac = edge_points(a, c)
        bc = edge_points(b, c)
        # grid[i][j]: point a + i/r (b - a) + j/r (c - a), i + j <= r
        grid: list[list[int]] = [[0] * (r + 1 - i) for i in range(r + 1)]
        for i in range(r + 1):
            grid[i][0] = ab[i]
        for j in range(r + 1):
            grid[0][j] = ac[j]
        for i in range(r + 1):
            grid[i][r - i] = bc[r - i]
        for i in range(1, r):
            for j in range(1, r - i):
                p = verts[a] + (verts[b] - verts[a]) * (i / r) + (verts[c] - verts[a]) * (j / r)
                points.append(p)
                grid[i][j] = len(points) - 1
        for i in range(r):
            for j in range(r - i):
                new_faces.append([grid[i][j], grid[i + 1][j], grid[i][j + 1]])
                if i + j < r - 1:
                    new_faces.append([grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]])
    return _normalize(np.array(points)), np.array(new_faces)


def icosphere(r_vec: Sequence[int] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Vertices and faces after subdividing an icosahedron by each factor in ``r_vec``."""
    verts = _normalize(_ICO_VERTS)
    faces = _ICO_FACES.copy()
    for r in r_vec:
        verts, faces = subdivide(verts, faces, int(r))
    return verts, faces


def icosphere_vertices(r_vec: Sequence[int] = ()) -> np.ndarray:
    """Unit vertices of the subdivided icosahedron; there are 10 * prod(r^2) + 2."""
    return icosphere(r_vec)[0]
