"""Full octree over the unit cube whose leaves are 8x8x8 cell subgrids.

Every leaf stores structure-of-arrays fields over an extended (8+2G)^3 cube
with ghost width G=2; arrays are indexed [z, y, x] so that x runs contiguous
in memory (vector loads happen along x).  Boundaries are periodic in all
directions; ``exchange_ghosts`` copies the mapped neighbor interior cells
into the ghost shells exactly, so it is idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N = 8          # interior cells per axis
GHOST = 2      # ghost layers per side
EXT = N + 2 * GHOST
INTERIOR = slice(GHOST, GHOST + N)

HYDRO_FIELDS = ("rho", "sx", "sy", "sz", "E")
GRAVITY_FIELDS = ("mass",)
OUTPUT_FIELDS = ("phi", "gx", "gy", "gz")
ALL_FIELDS = HYDRO_FIELDS + GRAVITY_FIELDS + OUTPUT_FIELDS

FIELD_SETS = {"hydro": HYDRO_FIELDS, "gravity": GRAVITY_FIELDS}

# all 26 offsets (dz, dy, dx), lexicographic; negation maps index i -> 25 - i
DIRECTIONS = tuple(
    (dz, dy, dx)
    for dz in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
    if (dz, dy, dx) != (0, 0, 0)
)


@dataclass
class SubGrid:
    """One octree leaf: SoA cell data over the extended cube."""

    level: int
    coord: tuple[int, int, int]          # (cx, cy, cz) at this level
    dx: float
    fields: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def allocate(cls, level: int, coord: tuple[int, int, int], dx: float) -> "SubGrid":
        """Input fields carry a NaN sentinel until initialized/exchanged;
        output fields start at zero."""
        fields = {}
        for name in ALL_FIELDS:
            if name in OUTPUT_FIELDS:
                fields[name] = np.zeros((EXT, EXT, EXT))
            else:
                fields[name] = np.full((EXT, EXT, EXT), np.nan)
        return cls(level=level, coord=coord, dx=dx, fields=fields)

    def interior(self, name: str) -> np.ndarray:
        """Writable (8,8,8) view of a field's interior cells."""
        return self.fields[name][INTERIOR, INTERIOR, INTERIOR]

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Global (X, Y, Z) center coordinates of the interior cells, shape (8,8,8)."""
        cx, cy, cz = self.coord
        idx = np.arange(N)
        x = (cx * N + idx + 0.5) * self.dx
        y = (cy * N + idx + 0.5) * self.dx
        z = (cz * N + idx + 0.5) * self.dx
        Z, Y, X = np.meshgrid(z, y, x, indexing="ij")
        return X, Y, Z


def _morton_key(cx: int, cy: int, cz: int, level: int) -> int:
    key = 0
    for bit in range(level):
        key |= ((cx >> bit) & 1) << (3 * bit)
        key |= ((cy >> bit) & 1) << (3 * bit + 1)
        key |= ((cz >> bit) & 1) << (3 * bit + 2)
    return key


class Octree:
    """Unigrid octree: every node refined to depth L, 8^L leaf subgrids."""

    def __init__(self, max_level: int):
        if not 0 <= max_level <= 5:
            raise ValueError(f"max_level must be in [0, 5], got {max_level}")
        self.max_level = max_level
        self.leaves_per_axis = 2**max_level
        self.dx = 1.0 / (N * self.leaves_per_axis)

        naxis = self.leaves_per_axis
        coords = [
            (cx, cy, cz)
            for cx in range(naxis)
            for cy in range(naxis)
            for cz in range(naxis)
        ]
        coords.sort(key=lambda c: _morton_key(*c, max_level))
        self.leaves = [SubGrid.allocate(max_level, c, self.dx) for c in coords]
        self._id_of = {c: i for i, c in enumerate(coords)}

        # periodic neighbor ids for each leaf and each of the 26 directions
        self.neighbors = np.empty((len(self.leaves), len(DIRECTIONS)), dtype=np.int64)
        for i, (cx, cy, cz) in enumerate(coords):
            for d, (dz, dy, dxi) in enumerate(DIRECTIONS):
                nb = ((cx + dxi) % naxis, (cy + dy) % naxis, (cz + dz) % naxis)
                self.neighbors[i, d] = self._id_of[nb]

    def __len__(self):
        return len(self.leaves)

    def leaf_id(self, coord: tuple[int, int, int]) -> int:
        return self._id_of[coord]

    def neighbor(self, leaf_id: int, direction: int) -> int:
        return int(self.neighbors[leaf_id, direction])


def build_unigrid(max_level: int, scenario_init=None) -> Octree:
    """Build the full tree; ``scenario_init(X, Y, Z, dx) -> {field: (8,8,8)}``
    fills interior cells from global cell-center coordinates.  Ghosts are
    left unfilled."""
    tree = Octree(max_level)
    if scenario_init is not None:
        for leaf in tree.leaves:
            X, Y, Z = leaf.cell_centers()
            values = scenario_init(X, Y, Z, leaf.dx)
            for name, arr in values.items():
                leaf.interior(name)[...] = arr
    return tree


def leaf_iter(tree: Octree) -> range:
    """Leaf ids in Morton order; stable across runs and thread counts."""
    return range(len(tree.leaves))


def _slab(delta: int) -> tuple[slice, slice]:
    # (target ghost range, source interior range) along one axis
    if delta == -1:
        return slice(0, GHOST), slice(EXT - 2 * GHOST, EXT - GHOST)
    if delta == 0:
        return slice(GHOST, GHOST + N), slice(GHOST, GHOST + N)
    return slice(GHOST + N, EXT), slice(GHOST, GHOST + GHOST)


def exchange_ghosts(tree: Octree, field_set: str) -> None:
    """Fill all 26-direction ghost shells from periodic neighbor interiors.

    Barrier phase: no kernel may run on these fields concurrently.
    """
    try:
        names = FIELD_SETS[field_set]
    except KeyError:
        raise ValueError(
            f"unknown field set {field_set!r}; expected one of {sorted(FIELD_SETS)}"
        ) from None
    for i, leaf in enumerate(tree.leaves):
        for d, (dz, dy, dxi) in enumerate(DIRECTIONS):
            src_leaf = tree.leaves[tree.neighbors[i, d]]
            tz, sz = _slab(dz)
            ty, sy = _slab(dy)
            tx, sx = _slab(dxi)
            for name in names:
                leaf.fields[name][tz, ty, tx] = src_leaf.fields[name][sz, sy, sx]


def neighborhood27(tree: Octree, leaf_id: int) -> list[SubGrid]:
    """The target leaf and its 26 periodic neighbors, ordered by the
    (oz, oy, ox) offset in lexicographic order (center at index 13)."""
    out = []
    d = 0
    for oz in (-1, 0, 1):
        for oy in (-1, 0, 1):
            for ox in (-1, 0, 1):
                if (oz, oy, ox) == (0, 0, 0):
                    out.append(tree.leaves[leaf_id])
                else:
                    out.append(tree.leaves[tree.neighbors[leaf_id, d]])
                    d += 1
    return out


def source_cube(sources: list[SubGrid], name: str, halo: int) -> np.ndarray:
    """Assemble a (8+2*halo)^3 array of one field from a 27-leaf neighborhood
    (``neighborhood27`` order), reading interior cells only.  halo <= 8."""
    if not 0 <= halo <= N:
        raise ValueError(f"halo must be in [0, {N}], got {halo}")
    size = N + 2 * halo
    cube = np.empty((size, size, size))

    def spans(delta: int) -> tuple[slice, slice]:
        # (cube range, source interior range) along one axis
        if delta == -1:
            return slice(0, halo), slice(GHOST + N - halo, GHOST + N)
        if delta == 0:
            return slice(halo, halo + N), slice(GHOST, GHOST + N)
        return slice(halo + N, size), slice(GHOST, GHOST + halo)

    k = 0
    for oz in (-1, 0, 1):
        for oy in (-1, 0, 1):
            for ox in (-1, 0, 1):
                leaf = sources[k]
                k += 1
                cz, sz = spans(oz)
                cy, sy = spans(oy)
                cx, sx = spans(ox)
                if halo == 0 and (oz, oy, ox) != (0, 0, 0):
                    continue
                cube[cz, cy, cx] = leaf.fields[name][sz, sy, sx]
    return cube
