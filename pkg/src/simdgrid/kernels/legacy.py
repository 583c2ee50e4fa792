"""Legacy hydro kernels: plain per-cell scalar loops, branches instead of
masks, no lane structure.  Kept so the harness can compare the vectorized
implementation against the old style (`--hydro-kernel legacy`)."""

from __future__ import annotations

import numpy as np
from numba import njit

from ..octree import HYDRO_FIELDS, SubGrid
from . import FluxField, HydroConfig, KernelError, QuadratureField, _raise_flux_error
from .geometry import DIR_MINUS, DIR_PLUS, DIRECTIONS_F, NVAR, SIMPSON_W

_JIT = dict(cache=True, nogil=True, error_model="numpy", fastmath=False)


@njit(**_JIT)
def _legacy_reconstruct_impl(U, floor, dirs_f, Q):
    slopes = np.empty((5, 3))
    vals = np.empty(5)
    for z in range(10):
        for y in range(10):
            for x in range(10):
                for v in range(5):
                    u = U[v, z + 1, y + 1, x + 1]
                    for axis in range(3):
                        if axis == 0:
                            up = U[v, z + 1, y + 1, x + 2]
                            um = U[v, z + 1, y + 1, x]
                        elif axis == 1:
                            up = U[v, z + 1, y + 2, x + 1]
                            um = U[v, z + 1, y, x + 1]
                        else:
                            up = U[v, z + 2, y + 1, x + 1]
                            um = U[v, z, y + 1, x + 1]
                        ap = up - u
                        am = u - um
                        if ap > 0.0 and am > 0.0:
                            slopes[v, axis] = ap if ap < am else am
                        elif ap < 0.0 and am < 0.0:
                            slopes[v, axis] = ap if ap > am else am
                        else:
                            slopes[v, axis] = 0.0
                for d in range(dirs_f.shape[0]):
                    for v in range(5):
                        vals[v] = U[v, z + 1, y + 1, x + 1] + 0.5 * (
                            dirs_f[d, 2] * slopes[v, 0]
                            + dirs_f[d, 1] * slopes[v, 1]
                            + dirs_f[d, 0] * slopes[v, 2]
                        )
                    if vals[0] < floor:
                        vals[0] = floor
                    if vals[4] < floor:
                        vals[4] = floor
                    ke = 0.5 * (vals[1] ** 2 + vals[2] ** 2 + vals[3] ** 2) / vals[0]
                    emin = ke * (1.0 + floor) + floor
                    if vals[4] < emin:
                        vals[4] = emin
                    for v in range(5):
                        Q[v, d, z, y, x] = vals[v]


@njit(**_JIT)
def _legacy_flux_impl(Q, gamma, dplus, dminus, weights, FX, FY, FZ):
    gm1 = gamma - 1.0
    smax = 0.0
    err_code = 0
    err_cell = -1
    for axis in range(3):
        ni = 8
        nj = 8 if axis == 0 else 9
        nk = 9 if axis == 0 else 8
        for i in range(ni):
            for j in range(nj):
                for k in range(nk):
                    if axis == 0:
                        zl = zr = i + 1
                        yl = yr = j + 1
                        xl, xr = k, k + 1
                    elif axis == 1:
                        zl = zr = i + 1
                        yl, yr = j, j + 1
                        xl = xr = k + 1
                    else:
                        zl, zr = j, j + 1
                        yl = yr = i + 1
                        xl = xr = k + 1
                    for v in range(5):
                        acc = 0.0
                        for i1 in range(3):
                            for i2 in range(3):
                                w = weights[i1, i2]
                                dl = dplus[axis, i1, i2]
                                dr = dminus[axis, i1, i2]
                                rl = Q[0, dl, zl, yl, xl]
                                rr = Q[0, dr, zr, yr, xr]
                                if rl <= 0.0 or rr <= 0.0:
                                    if err_code == 0:
                                        err_code = 1
                                        err_cell = (zl * 10 + yl) * 10 + xl
                                kel = (
                                    Q[1, dl, zl, yl, xl] ** 2
                                    + Q[2, dl, zl, yl, xl] ** 2
                                    + Q[3, dl, zl, yl, xl] ** 2
                                ) / (2.0 * rl)
                                ker = (
                                    Q[1, dr, zr, yr, xr] ** 2
                                    + Q[2, dr, zr, yr, xr] ** 2
                                    + Q[3, dr, zr, yr, xr] ** 2
                                ) / (2.0 * rr)
                                pl = gm1 * (Q[4, dl, zl, yl, xl] - kel)
                                pr = gm1 * (Q[4, dr, zr, yr, xr] - ker)
                                if pl <= 0.0 or pr <= 0.0:
                                    if err_code == 0:
                                        err_code = 2
                                        err_cell = (zl * 10 + yl) * 10 + xl
                                vnl = Q[1 + axis, dl, zl, yl, xl] / rl
                                vnr = Q[1 + axis, dr, zr, yr, xr] / rr
                                s = max(
                                    abs(vnl) + np.sqrt(gamma * pl / rl),
                                    abs(vnr) + np.sqrt(gamma * pr / rr),
                                )
                                if s > smax:
                                    smax = s
                                ul = Q[v, dl, zl, yl, xl]
                                ur = Q[v, dr, zr, yr, xr]
                                if v == 0:
                                    flv = rl * vnl
                                    frv = rr * vnr
                                elif v == 4:
                                    flv = (ul + pl) * vnl
                                    frv = (ur + pr) * vnr
                                else:
                                    flv = ul * vnl
                                    frv = ur * vnr
                                    if v == 1 + axis:
                                        flv += pl
                                        frv += pr
                                acc += w * (0.5 * (flv + frv) - 0.5 * s * (ur - ul))
                        if axis == 0:
                            FX[v, i, j, k] = acc
                        elif axis == 1:
                            FY[v, i, j, k] = acc
                        else:
                            FZ[v, j, i, k] = acc
    return smax, err_code, err_cell


def legacy_reconstruct(sub: SubGrid, cfg: HydroConfig, backend=None) -> QuadratureField:
    """Old-style reconstruction; ``backend`` is accepted and ignored."""
    U = np.stack([sub.fields[name] for name in HYDRO_FIELDS])
    Q = np.empty((NVAR, 26, 10, 10, 10))
    _legacy_reconstruct_impl(U, cfg.positivity_floor, DIRECTIONS_F, Q)
    return QuadratureField(Q)


def legacy_flux(sub: SubGrid, q: QuadratureField, cfg: HydroConfig, backend=None) -> FluxField:
    """Old-style flux; ``backend`` is accepted and ignored."""
    FX = np.empty((NVAR, 8, 8, 9))
    FY = np.empty((NVAR, 8, 9, 8))
    FZ = np.empty((NVAR, 9, 8, 8))
    smax, err_code, err_cell = _legacy_flux_impl(
        q.values, cfg.gamma, DIR_PLUS, DIR_MINUS, SIMPSON_W, FX, FY, FZ
    )
    if err_code != 0:
        _raise_flux_error(sub, err_code, err_cell)
    return FluxField(FX, FY, FZ, float(smax))
