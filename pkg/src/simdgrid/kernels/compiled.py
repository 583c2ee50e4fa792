"""Production lane-loop kernels, JIT-compiled once and shared by all widths.

Each kernel processes W lanes per inner iteration with remainder cells
handled by masking the inactive lanes (`active` guard), never by a separate
scalar epilogue.  The lane count W is a runtime argument: the W=1 call IS the
scalar backend, so results of any width are bitwise comparable against it.
Floating-point rules that keep that comparison exact:

* no fastmath, no fused multiply-add: `a*b + c` stays two rounded ops;
* every accumulation runs in a fixed order (lane-ascending within a row,
  offset/cluster loops lexicographic, axis terms x then y then z);
* masked-out contributions are added as literal 0.0 rather than skipped.

The reference implementations in `reference.py` mirror these expression
trees operation for operation; `tests/test_reference_kernels.py` pins the
two paths together bitwise.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True, error_model="numpy", fastmath=False)

EXT = 12      # extended cube width (8 interior + 2*2 ghosts)
NIN = 8       # interior cells per axis
NRC = 10      # reconstruction region width (interior + one ghost ring)


@njit(**_JIT)
def reconstruct_kernel(U, floor, W, dirs_f, Q):
    """Minmod-limited directional reconstruction.

    U: (5, 12, 12, 12) conserved fields with ghosts filled.
    Q: (5, 26, 10, 10, 10) output, region = extended cells 1..10.

    Density and energy are floored at `floor`; energy is additionally floored
    at the reconstructed kinetic energy plus `floor`, so every emitted state
    carries a strictly positive pressure (corner directions combine three
    axis slopes and can undershoot the raw formula into ke > E).
    """
    ndir = dirs_f.shape[0]
    slopes = np.empty((5, 3))
    uc = np.empty(5)
    for z in range(NRC):
        ze = z + 1
        for y in range(NRC):
            ye = y + 1
            for x0 in range(0, NRC, W):
                for lane in range(W):
                    x = x0 + lane
                    if x < NRC:
                        xe = x + 1
                        for v in range(5):
                            u = U[v, ze, ye, xe]
                            uc[v] = u
                            ap = U[v, ze, ye, xe + 1] - u
                            am = u - U[v, ze, ye, xe - 1]
                            mag = ap if abs(ap) < abs(am) else am
                            sgn = (ap > 0.0 and am > 0.0) or (ap < 0.0 and am < 0.0)
                            slopes[v, 0] = mag if sgn else 0.0
                            ap = U[v, ze, ye + 1, xe] - u
                            am = u - U[v, ze, ye - 1, xe]
                            mag = ap if abs(ap) < abs(am) else am
                            sgn = (ap > 0.0 and am > 0.0) or (ap < 0.0 and am < 0.0)
                            slopes[v, 1] = mag if sgn else 0.0
                            ap = U[v, ze + 1, ye, xe] - u
                            am = u - U[v, ze - 1, ye, xe]
                            mag = ap if abs(ap) < abs(am) else am
                            sgn = (ap > 0.0 and am > 0.0) or (ap < 0.0 and am < 0.0)
                            slopes[v, 2] = mag if sgn else 0.0
                        for d in range(ndir):
                            fdz = dirs_f[d, 0]
                            fdy = dirs_f[d, 1]
                            fdx = dirs_f[d, 2]
                            rho = uc[0] + 0.5 * (
                                fdx * slopes[0, 0] + fdy * slopes[0, 1] + fdz * slopes[0, 2]
                            )
                            rho = floor if rho < floor else rho
                            sx = uc[1] + 0.5 * (
                                fdx * slopes[1, 0] + fdy * slopes[1, 1] + fdz * slopes[1, 2]
                            )
                            sy = uc[2] + 0.5 * (
                                fdx * slopes[2, 0] + fdy * slopes[2, 1] + fdz * slopes[2, 2]
                            )
                            sz = uc[3] + 0.5 * (
                                fdx * slopes[3, 0] + fdy * slopes[3, 1] + fdz * slopes[3, 2]
                            )
                            en = uc[4] + 0.5 * (
                                fdx * slopes[4, 0] + fdy * slopes[4, 1] + fdz * slopes[4, 2]
                            )
                            en = floor if en < floor else en
                            ke = 0.5 * ((sx * sx + sy * sy) + sz * sz) / rho
                            # relative + absolute margin: survives rounding at large ke
                            emin = ke * (1.0 + floor) + floor
                            en = emin if en < emin else en
                            Q[0, d, z, y, x] = rho
                            Q[1, d, z, y, x] = sx
                            Q[2, d, z, y, x] = sy
                            Q[3, d, z, y, x] = sz
                            Q[4, d, z, y, x] = en


@njit(**_JIT)
def flux_kernel(Q, gamma, W, dplus, dminus, weights, FX, FY, FZ):
    """Rusanov flux with 3x3 Simpson face quadrature over reconstructed states.

    Q:  (5, 26, 10, 10, 10) reconstruction output.
    FX: (5, 8, 8, 9)  faces normal to x, indexed [v, z, y, s].
    FY: (5, 8, 9, 8)  faces normal to y, indexed [v, z, s, x].
    FZ: (5, 9, 8, 8)  faces normal to z, indexed [v, s, y, x].
    Returns (max signal speed, err_code, err_cell); err_code 1 = density,
    2 = pressure, err_cell encodes the failing cell in the Q region.
    """
    gm1 = gamma - 1.0
    smax = 0.0
    err_code = 0
    err_cell = -1
    for axis in range(3):
        for i in range(NIN):
            for j in range(NIN if axis == 0 else NIN + 1):
                nlane = NIN + 1 if axis == 0 else NIN
                for l0 in range(0, nlane, W):
                    for lane in range(W):
                        k = l0 + lane
                        if k < nlane:
                            # map (i, j, k) to the left/right cell in Q indices
                            if axis == 0:
                                zq = i + 1
                                yq = j + 1
                                xl = k
                                xr = k + 1
                                zl = zq
                                zr = zq
                                yl = yq
                                yr = yq
                            elif axis == 1:
                                zq = i + 1
                                zl = zq
                                zr = zq
                                yl = j
                                yr = j + 1
                                xl = k + 1
                                xr = k + 1
                            else:
                                zl = j
                                zr = j + 1
                                yl = i + 1
                                yr = yl
                                xl = k + 1
                                xr = xl
                            f0 = 0.0
                            f1 = 0.0
                            f2 = 0.0
                            f3 = 0.0
                            f4 = 0.0
                            for i1 in range(3):
                                for i2 in range(3):
                                    w = weights[i1, i2]
                                    dl = dplus[axis, i1, i2]
                                    dr = dminus[axis, i1, i2]
                                    ul0 = Q[0, dl, zl, yl, xl]
                                    ul1 = Q[1, dl, zl, yl, xl]
                                    ul2 = Q[2, dl, zl, yl, xl]
                                    ul3 = Q[3, dl, zl, yl, xl]
                                    ul4 = Q[4, dl, zl, yl, xl]
                                    ur0 = Q[0, dr, zr, yr, xr]
                                    ur1 = Q[1, dr, zr, yr, xr]
                                    ur2 = Q[2, dr, zr, yr, xr]
                                    ur3 = Q[3, dr, zr, yr, xr]
                                    ur4 = Q[4, dr, zr, yr, xr]
                                    # <= comparisons are False for NaN: poisoned
                                    # states propagate instead of erroring
                                    if ul0 <= 0.0:
                                        if err_code == 0:
                                            err_code = 1
                                            err_cell = (zl * NRC + yl) * NRC + xl
                                    if ur0 <= 0.0:
                                        if err_code == 0:
                                            err_code = 1
                                            err_cell = (zr * NRC + yr) * NRC + xr
                                    invl = 1.0 / ul0
                                    vxl = ul1 * invl
                                    vyl = ul2 * invl
                                    vzl = ul3 * invl
                                    kel = 0.5 * (ul1 * vxl + ul2 * vyl + ul3 * vzl)
                                    pl = gm1 * (ul4 - kel)
                                    invr = 1.0 / ur0
                                    vxr = ur1 * invr
                                    vyr = ur2 * invr
                                    vzr = ur3 * invr
                                    ker = 0.5 * (ur1 * vxr + ur2 * vyr + ur3 * vzr)
                                    pr = gm1 * (ur4 - ker)
                                    if pl <= 0.0:
                                        if err_code == 0:
                                            err_code = 2
                                            err_cell = (zl * NRC + yl) * NRC + xl
                                    if pr <= 0.0:
                                        if err_code == 0:
                                            err_code = 2
                                            err_cell = (zr * NRC + yr) * NRC + xr
                                    cl = np.sqrt(gamma * pl * invl)
                                    cr = np.sqrt(gamma * pr * invr)
                                    if axis == 0:
                                        vnl = vxl
                                        vnr = vxr
                                    elif axis == 1:
                                        vnl = vyl
                                        vnr = vyr
                                    else:
                                        vnl = vzl
                                        vnr = vzr
                                    sl = abs(vnl) + cl
                                    sr = abs(vnr) + cr
                                    s = sl if sl > sr else sr
                                    if s > smax:
                                        smax = s
                                    fl0 = ul0 * vnl
                                    fl1 = ul1 * vnl
                                    fl2 = ul2 * vnl
                                    fl3 = ul3 * vnl
                                    fl4 = (ul4 + pl) * vnl
                                    fr0 = ur0 * vnr
                                    fr1 = ur1 * vnr
                                    fr2 = ur2 * vnr
                                    fr3 = ur3 * vnr
                                    fr4 = (ur4 + pr) * vnr
                                    if axis == 0:
                                        fl1 = fl1 + pl
                                        fr1 = fr1 + pr
                                    elif axis == 1:
                                        fl2 = fl2 + pl
                                        fr2 = fr2 + pr
                                    else:
                                        fl3 = fl3 + pl
                                        fr3 = fr3 + pr
                                    hs = 0.5 * s
                                    f0 = f0 + w * (0.5 * (fl0 + fr0) - hs * (ur0 - ul0))
                                    f1 = f1 + w * (0.5 * (fl1 + fr1) - hs * (ur1 - ul1))
                                    f2 = f2 + w * (0.5 * (fl2 + fr2) - hs * (ur2 - ul2))
                                    f3 = f3 + w * (0.5 * (fl3 + fr3) - hs * (ur3 - ul3))
                                    f4 = f4 + w * (0.5 * (fl4 + fr4) - hs * (ur4 - ul4))
                            if axis == 0:
                                FX[0, i, j, k] = f0
                                FX[1, i, j, k] = f1
                                FX[2, i, j, k] = f2
                                FX[3, i, j, k] = f3
                                FX[4, i, j, k] = f4
                            elif axis == 1:
                                FY[0, i, j, k] = f0
                                FY[1, i, j, k] = f1
                                FY[2, i, j, k] = f2
                                FY[3, i, j, k] = f3
                                FY[4, i, j, k] = f4
                            else:
                                FZ[0, j, i, k] = f0
                                FZ[1, j, i, k] = f1
                                FZ[2, j, i, k] = f2
                                FZ[3, j, i, k] = f3
                                FZ[4, j, i, k] = f4
    return smax, err_code, err_cell


@njit(**_JIT)
def hydro_update_kernel(U, FX, FY, FZ, dtdx):
    """First-order forward-Euler conservative update of the interior cells."""
    nvar = U.shape[0]
    for v in range(nvar):
        for z in range(NIN):
            for y in range(NIN):
                for x in range(NIN):
                    net = (
                        (FX[v, z, y, x + 1] - FX[v, z, y, x])
                        + (FY[v, z, y + 1, x] - FY[v, z, y, x])
                        + (FZ[v, z + 1, y, x] - FZ[v, z, y, x])
                    )
                    U[v, z + 2, y + 2, x + 2] = U[v, z + 2, y + 2, x + 2] - dtdx * net


@njit(**_JIT)
def monopole_kernel_impl(cube, dx, rad2, eps2, halo, W, phi, gx, gy, gz):
    """Radius-limited softened direct sum over the (8+2*halo)^3 source cube.

    Out-of-radius and self terms contribute a masked 0.0 (they are added,
    not skipped, to keep every backend's accumulation identical).
    """
    for z in range(NIN):
        for y in range(NIN):
            for x0 in range(0, NIN, W):
                for lane in range(W):
                    x = x0 + lane
                    if x < NIN:
                        acc_p = 0.0
                        acc_x = 0.0
                        acc_y = 0.0
                        acc_z = 0.0
                        for oz in range(-halo, halo + 1):
                            rz = (-float(oz)) * dx
                            for oy in range(-halo, halo + 1):
                                ry = (-float(oy)) * dx
                                for ox in range(-halo, halo + 1):
                                    rx = (-float(ox)) * dx
                                    m = cube[z + oz + halo, y + oy + halo, x + ox + halo]
                                    r2 = (rx * rx + ry * ry) + rz * rz
                                    ok = r2 <= rad2 and not (
                                        ox == 0 and oy == 0 and oz == 0
                                    )
                                    rt = np.sqrt(r2 + eps2)
                                    inv = 1.0 / rt
                                    pt = -(m * inv)
                                    inv3 = (inv * inv) * inv
                                    com = m * inv3
                                    acc_p = acc_p + (pt if ok else 0.0)
                                    acc_x = acc_x + (-(com * rx) if ok else 0.0)
                                    acc_y = acc_y + (-(com * ry) if ok else 0.0)
                                    acc_z = acc_z + (-(com * rz) if ok else 0.0)
                        phi[z, y, x] = acc_p
                        gx[z, y, x] = acc_x
                        gy[z, y, x] = acc_y
                        gz[z, y, x] = acc_z


@njit(**_JIT)
def cluster_aggregate(cube, dx):
    """Collapse the 24^3 source cube into 2x2x2 clusters: total mass and
    mass-weighted dipole offset about each cluster's geometric centroid."""
    nc = cube.shape[0] // 2
    M = np.empty((nc, nc, nc))
    Dx = np.empty((nc, nc, nc))
    Dy = np.empty((nc, nc, nc))
    Dz = np.empty((nc, nc, nc))
    for cz in range(nc):
        for cy in range(nc):
            for cx in range(nc):
                m_tot = 0.0
                dxa = 0.0
                dya = 0.0
                dza = 0.0
                for oz in range(2):
                    for oy in range(2):
                        for ox in range(2):
                            m = cube[2 * cz + oz, 2 * cy + oy, 2 * cx + ox]
                            m_tot = m_tot + m
                            dxa = dxa + m * ((float(ox) - 0.5) * dx)
                            dya = dya + m * ((float(oy) - 0.5) * dx)
                            dza = dza + m * ((float(oz) - 0.5) * dx)
                M[cz, cy, cx] = m_tot
                Dx[cz, cy, cx] = dxa
                Dy[cz, cy, cx] = dya
                Dz[cz, cy, cx] = dza
    return M, Dx, Dy, Dz


@njit(**_JIT)
def multipole_kernel_impl(
    cube, M, Dx, Dy, Dz, dx, rad2, eps2, order, W, i0, i1, phi, gx, gy, gz
):
    """Cluster expansion for far clusters, direct per-cell sum for near ones.

    Processes the contiguous flat interior cell range [i0, i1); chunked
    launches write disjoint cells, so any split is bitwise identical to the
    unsplit run.  Far/near selection is a per-lane mask (centroid distance
    > dx/theta uses the expansion); both branches are evaluated and the
    inactive one contributes through the select, never via control flow that
    diverges between lanes of one vector.
    """
    nc = M.shape[0]
    f = i0
    while f < i1:
        z = f // 64
        y = (f % 64) // 8
        xs = f % 8
        run_end = xs + (i1 - f)
        if run_end > 8:
            run_end = 8
        for x0 in range(xs, run_end, W):
            for lane in range(W):
                x = x0 + lane
                if x < run_end:
                    tx = float(x) + 0.5
                    ty = float(y) + 0.5
                    tz = float(z) + 0.5
                    acc_p = 0.0
                    acc_x = 0.0
                    acc_y = 0.0
                    acc_z = 0.0
                    for cz in range(nc):
                        bz = float(2 * cz - 8)
                        for cy in range(nc):
                            by = float(2 * cy - 8)
                            for cx in range(nc):
                                bx = float(2 * cx - 8)
                                rx = (tx - (bx + 1.0)) * dx
                                ry = (ty - (by + 1.0)) * dx
                                rz = (tz - (bz + 1.0)) * dx
                                r2 = (rx * rx + ry * ry) + rz * rz
                                far = r2 > rad2
                                mt = M[cz, cy, cx]
                                rt = np.sqrt(r2 + eps2)
                                inv = 1.0 / rt
                                inv3 = (inv * inv) * inv
                                p_f = -(mt * inv)
                                gcom = mt * inv3
                                gx_f = -(gcom * rx)
                                gy_f = -(gcom * ry)
                                gz_f = -(gcom * rz)
                                if order == 1:
                                    dxa = Dx[cz, cy, cx]
                                    dya = Dy[cz, cy, cx]
                                    dza = Dz[cz, cy, cx]
                                    dr = (dxa * rx + dya * ry) + dza * rz
                                    p_f = p_f - dr * inv3
                                    inv5 = (inv3 * inv) * inv
                                    t3 = (3.0 * dr) * inv5
                                    gx_f = (gx_f + dxa * inv3) - t3 * rx
                                    gy_f = (gy_f + dya * inv3) - t3 * ry
                                    gz_f = (gz_f + dza * inv3) - t3 * rz
                                p_n = 0.0
                                gx_n = 0.0
                                gy_n = 0.0
                                gz_n = 0.0
                                for oz in range(2):
                                    for oy in range(2):
                                        for ox in range(2):
                                            m = cube[
                                                2 * cz + oz, 2 * cy + oy, 2 * cx + ox
                                            ]
                                            sx = (tx - ((bx + float(ox)) + 0.5)) * dx
                                            sy = (ty - ((by + float(oy)) + 0.5)) * dx
                                            sz = (tz - ((bz + float(oz)) + 0.5)) * dx
                                            r2s = (sx * sx + sy * sy) + sz * sz
                                            ok = r2s > 0.0
                                            rts = np.sqrt(r2s + eps2)
                                            invs = 1.0 / rts
                                            pt = -(m * invs)
                                            invs3 = (invs * invs) * invs
                                            coms = m * invs3
                                            p_n = p_n + (pt if ok else 0.0)
                                            gx_n = gx_n + (-(coms * sx) if ok else 0.0)
                                            gy_n = gy_n + (-(coms * sy) if ok else 0.0)
                                            gz_n = gz_n + (-(coms * sz) if ok else 0.0)
                                acc_p = acc_p + (p_f if far else p_n)
                                acc_x = acc_x + (gx_f if far else gx_n)
                                acc_y = acc_y + (gy_f if far else gy_n)
                                acc_z = acc_z + (gz_f if far else gz_n)
                    phi[z, y, x] = acc_p
                    gx[z, y, x] = acc_x
                    gy[z, y, x] = acc_y
                    gz[z, y, x] = acc_z
        f += run_end - xs


@njit(**_JIT)
def max_wavespeed_kernel(U, gamma, pfloor):
    """Cell-centered |v| + c over the interior; used for pre-step dt only."""
    gm1 = gamma - 1.0
    smax = 0.0
    for z in range(2, 2 + NIN):
        for y in range(2, 2 + NIN):
            for x in range(2, 2 + NIN):
                rho = U[0, z, y, x]
                inv = 1.0 / rho
                vx = U[1, z, y, x] * inv
                vy = U[2, z, y, x] * inv
                vz = U[3, z, y, x] * inv
                ke = 0.5 * (U[1, z, y, x] * vx + U[2, z, y, x] * vy + U[3, z, y, x] * vz)
                p = gm1 * (U[4, z, y, x] - ke)
                if not p > pfloor:
                    p = pfloor
                c = np.sqrt(gamma * p * inv)
                av = abs(vx)
                if abs(vy) > av:
                    av = abs(vy)
                if abs(vz) > av:
                    av = abs(vz)
                s = av + c
                if s > smax:
                    smax = s
    return smax
