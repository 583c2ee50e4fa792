"""Width-generic compute kernels over one subgrid: hydro reconstruct/flux/
update and gravity monopole/multipole.

The production path (`compiled`) and the SimdVec-written reference path
(`reference`) share one arithmetic contract and are bitwise interchangeable;
a kernel run on any emulated backend is bitwise identical to the scalar
backend run.  `legacy` holds the straight-line non-vectorized hydro
implementations kept for performance comparison runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import simd
from ..octree import GRAVITY_FIELDS, HYDRO_FIELDS, SubGrid, source_cube
from . import compiled
from .geometry import DIR_MINUS, DIR_PLUS, DIRECTIONS_F, NVAR, SIMPSON_W, dir_index

__all__ = [
    "HydroConfig",
    "GravityConfig",
    "KernelError",
    "QuadratureField",
    "FluxField",
    "reconstruct",
    "flux",
    "hydro_update",
    "monopole_kernel",
    "multipole_kernel",
    "multipole_prepare",
    "max_wavespeed",
    "gravity_halo",
    "INTERIOR_CELLS",
]

INTERIOR_CELLS = 512


class KernelError(RuntimeError):
    """A kernel precondition or state validity check failed."""


@dataclass(frozen=True)
class HydroConfig:
    gamma: float = 1.4
    cfl: float = 0.4
    positivity_floor: float = 1e-12

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"cfl must be in (0, 1), got {self.cfl}")
        if not self.positivity_floor > 0.0:
            raise ValueError("positivity_floor must be positive")


@dataclass(frozen=True)
class GravityConfig:
    theta: float = 0.34
    eps: float = 0.5          # Plummer softening in units of the cell width
    expansion_order: int = 0  # 0: cluster mass only, 1: adds the dipole term

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must be in (0, 1], got {self.theta}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.expansion_order not in (0, 1):
            raise ValueError(f"expansion_order must be 0 or 1, got {self.expansion_order}")


def gravity_halo(theta: float) -> int:
    """Stencil half-width (in cells) covering the direct-interaction radius
    dx/theta; capped at 8 because sources come from the 27-leaf neighborhood."""
    h = int(1.0 / theta)
    return h if h < 8 else 8


@dataclass
class QuadratureField:
    """26 reconstructed values per variable for the interior cells plus the
    one-cell ghost ring the face quadrature needs (region shape 10^3)."""

    values: np.ndarray  # (5, 26, 10, 10, 10)

    @property
    def interior(self) -> np.ndarray:
        """(5, 26, 8, 8, 8) view restricted to the interior cells."""
        return self.values[:, :, 1:9, 1:9, 1:9]

    def value(self, var: int, cell: tuple[int, int, int], direction: tuple[int, int, int]) -> float:
        """Reconstructed value for an interior cell (ix, iy, iz in 0..7) and
        a lattice direction (dx, dy, dz)."""
        ix, iy, iz = cell
        dx, dy, dz = direction
        d = dir_index(dz, dy, dx)
        return float(self.values[var, d, iz + 1, iy + 1, ix + 1])


@dataclass
class FluxField:
    """Face-integrated numerical fluxes and the maximum signal speed seen."""

    fx: np.ndarray  # (5, 8, 8, 9) faces normal to x
    fy: np.ndarray  # (5, 8, 9, 8) faces normal to y
    fz: np.ndarray  # (5, 9, 8, 8) faces normal to z
    max_speed: float


def _width(backend) -> int:
    return simd.get_backend(backend).width


def _stack_hydro(sub: SubGrid) -> np.ndarray:
    return np.stack([sub.fields[name] for name in HYDRO_FIELDS])


def reconstruct(sub: SubGrid, cfg: HydroConfig, backend="scalar", check_ghosts: bool = False) -> QuadratureField:
    """Minmod-limited reconstruction at the 26 lattice directions of every
    cell in the interior-plus-one-ghost-ring region."""
    w = _width(backend)
    U = _stack_hydro(sub)
    if check_ghosts:
        nan_total = int(np.isnan(U).sum())
        nan_interior = int(np.isnan(U[:, 2:10, 2:10, 2:10]).sum())
        if nan_total > nan_interior:
            raise KernelError(
                f"ghost cells of leaf {sub.coord} are unfilled ({nan_total - nan_interior} sentinel values)"
            )
    Q = np.empty((NVAR, 26, 10, 10, 10))
    compiled.reconstruct_kernel(U, cfg.positivity_floor, w, DIRECTIONS_F, Q)
    return QuadratureField(Q)


def _raise_flux_error(sub: SubGrid, code: int, cell: int):
    what = "density" if code == 1 else "pressure"
    xq = cell % 10
    yq = (cell // 10) % 10
    zq = cell // 100
    raise KernelError(
        f"non-positive {what} at a quadrature point of cell "
        f"(x={xq + 1}, y={yq + 1}, z={zq + 1}) [extended indices] of leaf {sub.coord}"
    )


def flux(sub: SubGrid, q: QuadratureField, cfg: HydroConfig, backend="scalar") -> FluxField:
    """Rusanov flux integrated with the 3x3 Simpson weights on every face
    bounding an interior cell; also returns the global max signal speed."""
    w = _width(backend)
    FX = np.empty((NVAR, 8, 8, 9))
    FY = np.empty((NVAR, 8, 9, 8))
    FZ = np.empty((NVAR, 9, 8, 8))
    smax, err_code, err_cell = compiled.flux_kernel(
        q.values, cfg.gamma, w, DIR_PLUS, DIR_MINUS, SIMPSON_W, FX, FY, FZ
    )
    if err_code != 0:
        _raise_flux_error(sub, err_code, err_cell)
    return FluxField(FX, FY, FZ, float(smax))


def hydro_update(sub: SubGrid, fluxes: FluxField, dt: float, cfg: HydroConfig) -> SubGrid:
    """Forward-Euler conservative update; rejects CFL violations and
    non-positive post-update density/energy."""
    if not dt > 0.0:
        raise KernelError(f"dt must be positive, got {dt}")
    if dt * fluxes.max_speed > cfg.cfl * sub.dx:
        raise KernelError(
            f"CFL violation: dt={dt:g} exceeds cfl*dx/s_max="
            f"{cfg.cfl * sub.dx / fluxes.max_speed:g} (s_max={fluxes.max_speed:g})"
        )
    U = _stack_hydro(sub)
    compiled.hydro_update_kernel(U, fluxes.fx, fluxes.fy, fluxes.fz, dt / sub.dx)
    for v, name in enumerate(HYDRO_FIELDS):
        sub.interior(name)[...] = U[v, 2:10, 2:10, 2:10]
    for name in ("rho", "E"):
        vals = sub.interior(name)
        bad = ~(vals > 0.0)  # flags NaN as well: such a step is not accepted
        if bad.any():
            z, y, x = np.argwhere(bad)[0]
            raise KernelError(
                f"non-positive (or NaN) {name} after update at interior cell "
                f"(x={x}, y={y}, z={z}) of leaf {sub.coord}"
            )
    return sub


def _gravity_outputs(target: SubGrid):
    return (
        target.interior("phi"),
        target.interior("gx"),
        target.interior("gy"),
        target.interior("gz"),
    )


def _check_sources(sources):
    if len(sources) != 27:
        raise ValueError(f"expected the 27-leaf neighborhood, got {len(sources)} subgrids")


def monopole_kernel(target: SubGrid, sources, cfg: GravityConfig, backend="scalar"):
    """Softened direct sum over all neighborhood cells within dx/theta.

    Writes and returns the (phi, gx, gy, gz) interior fields of the target.
    """
    w = _width(backend)
    _check_sources(sources)
    dx = target.dx
    halo = gravity_halo(cfg.theta)
    cube = source_cube(sources, "mass", halo)
    rad = dx / cfg.theta
    rad2 = rad * rad
    epsd = cfg.eps * dx
    eps2 = epsd * epsd
    phi, gx, gy, gz = _gravity_outputs(target)
    compiled.monopole_kernel_impl(cube, dx, rad2, eps2, halo, w, phi, gx, gy, gz)
    return phi, gx, gy, gz


def multipole_prepare(target: SubGrid, sources, cfg: GravityConfig, backend="scalar"):
    """Aggregate sources into 2x2x2 clusters and return a chunk runner
    ``run(i0, i1)`` covering the flat interior cell range [i0, i1)."""
    w = _width(backend)
    _check_sources(sources)
    dx = target.dx
    cube = source_cube(sources, "mass", 8)
    M, Dx, Dy, Dz = compiled.cluster_aggregate(cube, dx)
    rad = dx / cfg.theta
    rad2 = rad * rad
    epsd = cfg.eps * dx
    eps2 = epsd * epsd
    order = cfg.expansion_order
    phi, gx, gy, gz = _gravity_outputs(target)

    def run(i0: int, i1: int) -> None:
        compiled.multipole_kernel_impl(
            cube, M, Dx, Dy, Dz, dx, rad2, eps2, order, w, i0, i1, phi, gx, gy, gz
        )

    return run


def multipole_kernel(target: SubGrid, sources, cfg: GravityConfig, backend="scalar", n_tasks: int = 1):
    """Cluster-expansion gravity for the target leaf; the interior cell loop
    is split into n_tasks contiguous chunks executed in ascending order
    (results are bitwise independent of the split)."""
    if n_tasks < 1:
        raise ValueError(f"n_tasks must be >= 1, got {n_tasks}")
    run = multipole_prepare(target, sources, cfg, backend)
    base = INTERIOR_CELLS // n_tasks
    rem = INTERIOR_CELLS % n_tasks
    start = 0
    for i in range(n_tasks):
        size = base + (1 if i < rem else 0)
        run(start, start + size)
        start += size
    return _gravity_outputs(target)


def max_wavespeed(sub: SubGrid, cfg: HydroConfig) -> float:
    """Cell-centered |v|+c maximum over the interior (pre-step dt estimate)."""
    U = _stack_hydro(sub)
    return float(compiled.max_wavespeed_kernel(U, cfg.gamma, cfg.positivity_floor))
