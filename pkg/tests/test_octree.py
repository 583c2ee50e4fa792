"""Octree structure, Morton ordering, periodic ghost exchange."""

import numpy as np
import pytest

from simdgrid.octree import (
    DIRECTIONS,
    EXT,
    GHOST,
    N,
    SubGrid,
    build_unigrid,
    exchange_ghosts,
    leaf_iter,
    neighborhood27,
    source_cube,
)


class TestBuild:
    @pytest.mark.parametrize("level,count", [(0, 1), (1, 8), (2, 64), (3, 512)])
    def test_leaf_count(self, level, count):
        assert len(build_unigrid(level)) == count

    def test_level_range(self):
        with pytest.raises(ValueError):
            build_unigrid(-1)
        with pytest.raises(ValueError):
            build_unigrid(6)

    def test_total_interior_cells(self):
        for level in (0, 1, 2):
            tree = build_unigrid(level)
            cells = sum(leaf.interior("rho").size for leaf in tree.leaves)
            assert cells == 512 * 8**level

    def test_dx(self):
        assert build_unigrid(0).dx == 1.0 / 8
        assert build_unigrid(3).dx == 1.0 / 64

    def test_init_fills_interiors_only(self):
        tree = build_unigrid(1, lambda X, Y, Z, dx: {"rho": X})
        leaf = tree.leaves[0]
        assert np.all(np.isfinite(leaf.interior("rho")))
        assert np.isnan(leaf.fields["rho"][0, 0, 0])  # ghost sentinel


class TestMortonOrder:
    def test_first_leaf_is_origin(self):
        tree = build_unigrid(2)
        assert tree.leaves[0].coord == (0, 0, 0)

    def test_l1_order(self):
        tree = build_unigrid(1)
        assert len(list(leaf_iter(tree))) == 8
        # bit-interleaved order: x varies fastest
        assert [leaf.coord for leaf in tree.leaves] == [
            (0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0),
            (0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1),
        ]

    def test_deterministic(self):
        a = [leaf.coord for leaf in build_unigrid(2).leaves]
        b = [leaf.coord for leaf in build_unigrid(2).leaves]
        assert a == b


class TestNeighbors:
    def test_symmetry_under_negation(self):
        tree = build_unigrid(2)
        for i in range(len(tree)):
            for d in range(26):
                j = tree.neighbor(i, d)
                assert tree.neighbor(j, 25 - d) == i

    def test_direction_negation_index(self):
        for d, (dz, dy, dx) in enumerate(DIRECTIONS):
            assert DIRECTIONS[25 - d] == (-dz, -dy, -dx)

    def test_single_leaf_self_neighbor(self):
        tree = build_unigrid(0)
        assert all(tree.neighbor(0, d) == 0 for d in range(26))


def _linear_fill(tree, name="rho"):
    # value encodes the global (periodic) cell index so ghost mapping is checkable
    n = tree.leaves_per_axis * N
    for leaf in tree.leaves:
        cx, cy, cz = leaf.coord
        idx = np.arange(N)
        gx = cx * N + idx
        gy = cy * N + idx
        gz = cz * N + idx
        Z, Y, X = np.meshgrid(gz, gy, gx, indexing="ij")
        leaf.interior(name)[...] = X + 1000.0 * Y + 1000000.0 * Z
    return n


class TestGhostExchange:
    def test_uniform_field(self):
        tree = build_unigrid(1)
        for leaf in tree.leaves:
            leaf.interior("rho")[...] = 7.5
        exchange_ghosts(tree, "hydro")
        for leaf in tree.leaves:
            assert np.all(leaf.fields["rho"] == 7.5)

    def test_single_leaf_periodic_wrap(self):
        tree = build_unigrid(0)
        leaf = tree.leaves[0]
        leaf.interior("rho")[...] = np.arange(512, dtype=np.float64).reshape(8, 8, 8)
        exchange_ghosts(tree, "hydro")
        arr = leaf.fields["rho"]
        # low-x ghosts equal the opposite interior slab
        assert np.array_equal(arr[GHOST:-GHOST, GHOST:-GHOST, 0:GHOST],
                              arr[GHOST:-GHOST, GHOST:-GHOST, N:N + GHOST])
        assert np.array_equal(arr[0:GHOST, GHOST:-GHOST, GHOST:-GHOST],
                              arr[N:N + GHOST, GHOST:-GHOST, GHOST:-GHOST])

    def test_ghosts_match_neighbor_interiors_exactly(self):
        # index-map oracle: every ghost must equal the periodically mapped
        # global cell value of the encoding fill
        tree = build_unigrid(1)
        n = _linear_fill(tree)
        exchange_ghosts(tree, "hydro")
        for leaf in tree.leaves:
            cx, cy, cz = leaf.coord
            arr = leaf.fields["rho"]
            for ze in range(EXT):
                for ye in range(EXT):
                    for xe in range(EXT):
                        gx = (cx * N + xe - GHOST) % n
                        gy = (cy * N + ye - GHOST) % n
                        gz = (cz * N + ze - GHOST) % n
                        assert arr[ze, ye, xe] == gx + 1000.0 * gy + 1000000.0 * gz

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        tree = build_unigrid(1)
        for leaf in tree.leaves:
            leaf.interior("rho")[...] = rng.uniform(size=(8, 8, 8))
        exchange_ghosts(tree, "hydro")
        snap = [leaf.fields["rho"].copy() for leaf in tree.leaves]
        exchange_ghosts(tree, "hydro")
        for leaf, before in zip(tree.leaves, snap):
            assert np.array_equal(leaf.fields["rho"], before)

    def test_unknown_field_set(self):
        tree = build_unigrid(0)
        with pytest.raises(ValueError, match="field set"):
            exchange_ghosts(tree, "everything")

    def test_gravity_set_touches_only_mass(self):
        tree = build_unigrid(0)
        tree.leaves[0].interior("mass")[...] = 1.0
        tree.leaves[0].interior("rho")[...] = 1.0
        exchange_ghosts(tree, "gravity")
        leaf = tree.leaves[0]
        assert np.all(leaf.fields["mass"] == 1.0)
        assert np.isnan(leaf.fields["rho"][0, 0, 0])


class TestSourceCube:
    def test_cube_matches_periodic_map(self):
        tree = build_unigrid(1)
        n = _linear_fill(tree, "mass")
        for leaf_id in (0, 5):
            cube = source_cube(neighborhood27(tree, leaf_id), "mass", 3)
            cx, cy, cz = tree.leaves[leaf_id].coord
            for z in range(cube.shape[0]):
                for y in range(cube.shape[1]):
                    for x in range(cube.shape[2]):
                        gx = (cx * N + x - 3) % n
                        gy = (cy * N + y - 3) % n
                        gz = (cz * N + z - 3) % n
                        assert cube[z, y, x] == gx + 1000.0 * gy + 1000000.0 * gz

    def test_halo_bounds(self):
        tree = build_unigrid(0)
        with pytest.raises(ValueError):
            source_cube(neighborhood27(tree, 0), "mass", 9)
