"""Shared test helpers: random-state factories and independent oracles.

The gravity oracles are plain numpy triple loops over stencil offsets, kept
deliberately separate from the kernel implementations (different expression
trees, same summation order over offsets)."""

from __future__ import annotations

import numpy as np

from simdgrid.octree import EXT, HYDRO_FIELDS, SubGrid, build_unigrid, neighborhood27

GAMMA = 1.4


def random_hydro_subgrid(rng, dx: float = 1.0 / 64) -> SubGrid:
    """Gentle random state (positive pressure survives reconstruction) with a
    random power-of-two scale so lane arithmetic sees varied exponents."""
    sub = SubGrid.allocate(0, (0, 0, 0), dx)
    scale = float(2.0 ** rng.integers(-6, 7))
    shape = (EXT, EXT, EXT)
    rho = (1.0 + 0.1 * rng.uniform(-1.0, 1.0, shape)) * scale
    v = 0.1 * rng.uniform(-1.0, 1.0, (3, *shape))
    p = (1.0 + 0.1 * rng.uniform(-1.0, 1.0, shape)) * scale
    sub.fields["rho"][...] = rho
    sub.fields["sx"][...] = rho * v[0]
    sub.fields["sy"][...] = rho * v[1]
    sub.fields["sz"][...] = rho * v[2]
    sub.fields["E"][...] = p / (GAMMA - 1.0) + 0.5 * rho * (v**2).sum(axis=0)
    return sub


def uniform_subgrid(rho=1.0, v=(0.0, 0.0, 0.0), p=1.0, dx=1.0 / 64) -> SubGrid:
    sub = SubGrid.allocate(0, (0, 0, 0), dx)
    sub.fields["rho"][...] = rho
    sub.fields["sx"][...] = rho * v[0]
    sub.fields["sy"][...] = rho * v[1]
    sub.fields["sz"][...] = rho * v[2]
    sub.fields["E"][...] = p / (GAMMA - 1.0) + 0.5 * rho * (v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    return sub


def random_mass_tree(rng, level: int = 1):
    """L-level tree with random positive cell masses (zeros sprinkled in)."""
    tree = build_unigrid(level)
    for leaf in tree.leaves:
        m = rng.uniform(0.0, 1.0, (8, 8, 8))
        m[rng.uniform(size=(8, 8, 8)) < 0.05] = 0.0
        leaf.interior("mass")[...] = m * leaf.dx**3
    return tree


def gravity_setup(rng, level: int = 1):
    tree = random_mass_tree(rng, level)
    return tree.leaves[0], neighborhood27(tree, 0)


def conserved_totals(tree) -> dict[str, float]:
    dx3 = tree.dx**3
    return {
        name: float(sum(leaf.interior(name).sum() for leaf in tree.leaves)) * dx3
        for name in HYDRO_FIELDS
    }


def fields_bytes(tree, names=("rho", "sx", "sy", "sz", "E", "phi", "gx", "gy", "gz")) -> bytes:
    return b"".join(leaf.interior(n).tobytes() for leaf in tree.leaves for n in names)


def global_field(tree, name: str) -> np.ndarray:
    n = tree.leaves_per_axis * 8
    out = np.empty((n, n, n))
    for leaf in tree.leaves:
        cx, cy, cz = leaf.coord
        out[cz * 8 : (cz + 1) * 8, cy * 8 : (cy + 1) * 8, cx * 8 : (cx + 1) * 8] = leaf.interior(name)
    return out


# -- gravity oracles ---------------------------------------------------------


def monopole_direct_sum(cube: np.ndarray, dx: float, theta: float, eps: float, halo: int):
    """Brute-force softened direct sum limited to |r| <= dx/theta, offsets in
    lexicographic order; the fp radius test matches the kernel's."""
    rad2 = (dx / theta) ** 2
    eps2 = (eps * dx) ** 2
    phi = np.zeros((8, 8, 8))
    gx = np.zeros((8, 8, 8))
    gy = np.zeros((8, 8, 8))
    gz = np.zeros((8, 8, 8))
    for oz in range(-halo, halo + 1):
        for oy in range(-halo, halo + 1):
            for ox in range(-halo, halo + 1):
                if (oz, oy, ox) == (0, 0, 0):
                    continue
                rx = -ox * dx
                ry = -oy * dx
                rz = -oz * dx
                r2 = rx * rx + ry * ry + rz * rz
                if r2 > rad2:
                    continue
                m = cube[
                    halo + oz : halo + oz + 8,
                    halo + oy : halo + oy + 8,
                    halo + ox : halo + ox + 8,
                ]
                rt = np.sqrt(r2 + eps2)
                phi -= m / rt
                gx -= m * rx / rt**3
                gy -= m * ry / rt**3
                gz -= m * rz / rt**3
    return phi, gx, gy, gz


def gravity_full_direct_sum(cube: np.ndarray, dx: float, eps: float):
    """Softened direct sum over every source in the 24^3 neighborhood cube
    (no radius cut, self term excluded); the reference the cluster expansion
    approximates.  Offsets reach +-15: a target at one edge of the interior
    sees sources across the whole cube."""
    eps2 = (eps * dx) ** 2
    phi = np.zeros((8, 8, 8))

    def spans(o: int) -> tuple[int, int]:
        # interior targets t with source t+o inside cube coords [-8, 16)
        return max(0, -8 - o), min(8, 16 - o)

    for oz in range(-15, 16):
        zlo, zhi = spans(oz)
        if zlo >= zhi:
            continue
        for oy in range(-15, 16):
            ylo, yhi = spans(oy)
            if ylo >= yhi:
                continue
            for ox in range(-15, 16):
                xlo, xhi = spans(ox)
                if xlo >= xhi or (oz, oy, ox) == (0, 0, 0):
                    continue
                r2 = (ox * dx) ** 2 + (oy * dx) ** 2 + (oz * dx) ** 2
                m = cube[
                    zlo + oz + 8 : zhi + oz + 8,
                    ylo + oy + 8 : yhi + oy + 8,
                    xlo + ox + 8 : xhi + ox + 8,
                ]
                phi[zlo:zhi, ylo:yhi, xlo:xhi] -= m / np.sqrt(r2 + eps2)
    return phi
