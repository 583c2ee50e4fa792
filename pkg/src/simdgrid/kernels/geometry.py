"""Shared stencil geometry: direction tables and face quadrature weights.

The 26 reconstruction directions are the nonzero offsets of the 3x3x3 lattice
in lexicographic (dz, dy, dx) order.  For a face normal to axis ``a`` the
nine quadrature points are indexed by the two tangential offsets
(in ascending axis order); ``DIR_PLUS[a, t1, t2]`` / ``DIR_MINUS[a, t1, t2]``
give the direction index whose normal component points out of the left /
right cell toward the face.
"""

from __future__ import annotations

import numpy as np

NVAR = 5
IRHO, ISX, ISY, ISZ, IEN = range(NVAR)

NDIR = 26

# rows are (dz, dy, dx); index i negates to index 25 - i
DIRECTIONS = np.array(
    [
        (dz, dy, dx)
        for dz in (-1, 0, 1)
        for dy in (-1, 0, 1)
        for dx in (-1, 0, 1)
        if (dz, dy, dx) != (0, 0, 0)
    ],
    dtype=np.int64,
)
DIRECTIONS_F = DIRECTIONS.astype(np.float64)


def dir_index(dz: int, dy: int, dx: int) -> int:
    idx = (dz + 1) * 9 + (dy + 1) * 3 + (dx + 1)
    if idx == 13:
        raise ValueError("zero offset is not a direction")
    return idx - 1 if idx > 13 else idx


def _qp_tables() -> tuple[np.ndarray, np.ndarray]:
    plus = np.empty((3, 3, 3), dtype=np.int64)
    minus = np.empty((3, 3, 3), dtype=np.int64)
    for i1, t1 in enumerate((-1, 0, 1)):
        for i2, t2 in enumerate((-1, 0, 1)):
            # axis x: tangentials (y, z); axis y: (x, z); axis z: (x, y)
            plus[0, i1, i2] = dir_index(t2, t1, 1)
            minus[0, i1, i2] = dir_index(t2, t1, -1)
            plus[1, i1, i2] = dir_index(t2, 1, t1)
            minus[1, i1, i2] = dir_index(t2, -1, t1)
            plus[2, i1, i2] = dir_index(1, t2, t1)
            minus[2, i1, i2] = dir_index(-1, t2, t1)
    return plus, minus


DIR_PLUS, DIR_MINUS = _qp_tables()

# 3x3 two-dimensional Simpson weights over the tangential offsets; sums to 1
SIMPSON_W = np.array(
    [[1.0, 4.0, 1.0], [4.0, 16.0, 4.0], [1.0, 4.0, 1.0]]
) / 36.0
