"""Reference kernels written directly in the SimdVec/SimdMask vocabulary.

These spell out the kernel arithmetic one lane operation at a time: branches
become masks, remainders become masked tail vectors, and every accumulation
happens in the same fixed order as the compiled path.  They are the
readable semantic definition; `compiled.py` is the fast transcription.  The
two must agree bitwise on every backend (see tests/test_reference_kernels.py).

Masked-out contributions are materialized as +0.0 through `choose` and still
added, so accumulator bit patterns (including signed zeros) match a run that
never masks.
"""

from __future__ import annotations

import numpy as np

from .. import simd
from ..octree import HYDRO_FIELDS, SubGrid, source_cube
from . import (
    FluxField,
    GravityConfig,
    HydroConfig,
    KernelError,
    QuadratureField,
    _check_sources,
    _gravity_outputs,
    gravity_halo,
)
from .geometry import DIR_MINUS, DIR_PLUS, DIRECTIONS_F, NVAR, SIMPSON_W

NRC = 10
NIN = 8


def _mload(bk, row, offset, active):
    """Load up to W lanes from a row, zero-padding the inactive tail."""
    if active == bk.width:
        return bk.load(row, offset)
    lanes = np.zeros(bk.width)
    lanes[:active] = row[offset : offset + active]
    return simd.SimdVec(lanes, bk)


def _mstore(vec, row, offset, active):
    row[offset : offset + active] = vec.lanes[:active]


def _active_mask(bk, active):
    lanes = np.zeros(bk.width, dtype=bool)
    lanes[:active] = True
    return simd.SimdMask(lanes, bk)


def _neg(bk, v):
    # exact sign flip; mirrors the compiled unary minus for finite values
    return bk.mul(bk.splat(-1.0), v)


def _minmod(bk, ap, am, zero):
    mag = bk.choose(bk.cmp_lt(bk.abs(ap), bk.abs(am)), ap, am)
    sgn = bk.mask_or(
        bk.mask_and(bk.cmp_gt(ap, zero), bk.cmp_gt(am, zero)),
        bk.mask_and(bk.cmp_lt(ap, zero), bk.cmp_lt(am, zero)),
    )
    return bk.choose(sgn, mag, zero)


def reconstruct(sub: SubGrid, cfg: HydroConfig, backend="scalar") -> QuadratureField:
    bk = simd.get_backend(backend)
    w = bk.width
    U = np.stack([sub.fields[name] for name in HYDRO_FIELDS])
    Q = np.empty((NVAR, 26, NRC, NRC, NRC))

    zero = bk.splat(0.0)
    half = bk.splat(0.5)
    floorv = bk.splat(cfg.positivity_floor)
    one_plus_floor = bk.splat(1.0 + cfg.positivity_floor)
    dir_splats = [
        (bk.splat(DIRECTIONS_F[d, 2]), bk.splat(DIRECTIONS_F[d, 1]), bk.splat(DIRECTIONS_F[d, 0]))
        for d in range(26)
    ]

    for z in range(NRC):
        ze = z + 1
        for y in range(NRC):
            ye = y + 1
            for x0 in range(0, NRC, w):
                act = min(w, NRC - x0)
                xe = x0 + 1
                uc = []
                slopes = []
                for v in range(NVAR):
                    row_c = U[v, ze, ye]
                    u = _mload(bk, row_c, xe, act)
                    ap = bk.sub(_mload(bk, row_c, xe + 1, act), u)
                    am = bk.sub(u, _mload(bk, row_c, xe - 1, act))
                    mx = _minmod(bk, ap, am, zero)
                    ap = bk.sub(_mload(bk, U[v, ze, ye + 1], xe, act), u)
                    am = bk.sub(u, _mload(bk, U[v, ze, ye - 1], xe, act))
                    my = _minmod(bk, ap, am, zero)
                    ap = bk.sub(_mload(bk, U[v, ze + 1, ye], xe, act), u)
                    am = bk.sub(u, _mload(bk, U[v, ze - 1, ye], xe, act))
                    mz = _minmod(bk, ap, am, zero)
                    uc.append(u)
                    slopes.append((mx, my, mz))
                for d in range(26):
                    fdx, fdy, fdz = dir_splats[d]

                    def shifted(v):
                        mx, my, mz = slopes[v]
                        inner = bk.add(
                            bk.add(bk.mul(fdx, mx), bk.mul(fdy, my)), bk.mul(fdz, mz)
                        )
                        return bk.add(uc[v], bk.mul(half, inner))

                    rho = shifted(0)
                    rho = bk.choose(bk.cmp_lt(rho, floorv), floorv, rho)
                    sx = shifted(1)
                    sy = shifted(2)
                    sz = shifted(3)
                    en = shifted(4)
                    en = bk.choose(bk.cmp_lt(en, floorv), floorv, en)
                    ke = bk.div(
                        bk.mul(
                            half,
                            bk.add(bk.add(bk.mul(sx, sx), bk.mul(sy, sy)), bk.mul(sz, sz)),
                        ),
                        rho,
                    )
                    emin = bk.add(bk.mul(ke, one_plus_floor), floorv)
                    en = bk.choose(bk.cmp_lt(en, emin), emin, en)
                    _mstore(rho, Q[0, d, z, y], x0, act)
                    _mstore(sx, Q[1, d, z, y], x0, act)
                    _mstore(sy, Q[2, d, z, y], x0, act)
                    _mstore(sz, Q[3, d, z, y], x0, act)
                    _mstore(en, Q[4, d, z, y], x0, act)
    return QuadratureField(Q)


def _euler_state(bk, u, gm1v, gammav, half, axis):
    """Primitive recovery and flux pieces for one reconstructed state."""
    inv = bk.div(bk.splat(1.0), u[0])
    vx = bk.mul(u[1], inv)
    vy = bk.mul(u[2], inv)
    vz = bk.mul(u[3], inv)
    ke = bk.mul(
        half, bk.add(bk.add(bk.mul(u[1], vx), bk.mul(u[2], vy)), bk.mul(u[3], vz))
    )
    p = bk.mul(gm1v, bk.sub(u[4], ke))
    c = bk.sqrt(bk.mul(bk.mul(gammav, p), inv))
    vn = (vx, vy, vz)[axis]
    speed = bk.add(bk.abs(vn), c)
    f = [
        bk.mul(u[0], vn),
        bk.mul(u[1], vn),
        bk.mul(u[2], vn),
        bk.mul(u[3], vn),
        bk.mul(bk.add(u[4], p), vn),
    ]
    f[1 + axis] = bk.add(f[1 + axis], p)
    return p, speed, f


def flux(sub: SubGrid, q: QuadratureField, cfg: HydroConfig, backend="scalar") -> FluxField:
    bk = simd.get_backend(backend)
    w = bk.width
    Q = q.values
    FX = np.empty((NVAR, 8, 8, 9))
    FY = np.empty((NVAR, 8, 9, 8))
    FZ = np.empty((NVAR, 9, 8, 8))

    zero = bk.splat(0.0)
    half = bk.splat(0.5)
    gm1v = bk.splat(cfg.gamma - 1.0)
    gammav = bk.splat(cfg.gamma)
    neg_inf = bk.splat(-np.inf)
    smax = 0.0

    for axis in range(3):
        for i in range(NIN):
            jrange = NIN if axis == 0 else NIN + 1
            nlane = NIN + 1 if axis == 0 else NIN
            for j in range(jrange):
                for k0 in range(0, nlane, w):
                    act = min(w, nlane - k0)
                    activem = _active_mask(bk, act)
                    facc = [zero] * NVAR
                    for i1 in range(3):
                        for i2 in range(3):
                            wq = bk.splat(SIMPSON_W[i1, i2])
                            dl = DIR_PLUS[axis, i1, i2]
                            dr = DIR_MINUS[axis, i1, i2]
                            if axis == 0:
                                rows_l = [Q[v, dl, i + 1, j + 1] for v in range(NVAR)]
                                rows_r = [Q[v, dr, i + 1, j + 1] for v in range(NVAR)]
                                ol, orr = k0, k0 + 1
                            elif axis == 1:
                                rows_l = [Q[v, dl, i + 1, j] for v in range(NVAR)]
                                rows_r = [Q[v, dr, i + 1, j + 1] for v in range(NVAR)]
                                ol = orr = k0 + 1
                            else:
                                rows_l = [Q[v, dl, j, i + 1] for v in range(NVAR)]
                                rows_r = [Q[v, dr, j + 1, i + 1] for v in range(NVAR)]
                                ol = orr = k0 + 1
                            ul = [_mload(bk, rows_l[v], ol, act) for v in range(NVAR)]
                            ur = [_mload(bk, rows_r[v], orr, act) for v in range(NVAR)]
                            for side_u in (ul, ur):
                                bad = bk.mask_and(bk.cmp_le(side_u[0], zero), activem)
                                if bk.any(bad):
                                    raise KernelError(
                                        f"non-positive density at a quadrature point of leaf {sub.coord}"
                                    )
                            pl, sl, fl = _euler_state(bk, ul, gm1v, gammav, half, axis)
                            pr, sr, fr = _euler_state(bk, ur, gm1v, gammav, half, axis)
                            for pv in (pl, pr):
                                bad = bk.mask_and(bk.cmp_le(pv, zero), activem)
                                if bk.any(bad):
                                    raise KernelError(
                                        f"non-positive pressure at a quadrature point of leaf {sub.coord}"
                                    )
                            s = bk.max(sl, sr)
                            cand = bk.reduce_max(bk.choose(activem, s, neg_inf))
                            if cand > smax:
                                smax = cand
                            hs = bk.mul(half, s)
                            for v in range(NVAR):
                                central = bk.mul(half, bk.add(fl[v], fr[v]))
                                dissip = bk.mul(hs, bk.sub(ur[v], ul[v]))
                                facc[v] = bk.add(
                                    facc[v], bk.mul(wq, bk.sub(central, dissip))
                                )
                    for v in range(NVAR):
                        if axis == 0:
                            _mstore(facc[v], FX[v, i, j], k0, act)
                        elif axis == 1:
                            _mstore(facc[v], FY[v, i, j], k0, act)
                        else:
                            _mstore(facc[v], FZ[v, j, i], k0, act)
    return FluxField(FX, FY, FZ, float(smax))


def hydro_update(sub: SubGrid, fluxes: FluxField, dt: float, cfg: HydroConfig, backend="scalar") -> SubGrid:
    if not dt > 0.0:
        raise KernelError(f"dt must be positive, got {dt}")
    if dt * fluxes.max_speed > cfg.cfl * sub.dx:
        raise KernelError(
            f"CFL violation: dt={dt:g} exceeds cfl*dx/s_max="
            f"{cfg.cfl * sub.dx / fluxes.max_speed:g}"
        )
    bk = simd.get_backend(backend)
    w = bk.width
    dtdx = bk.splat(dt / sub.dx)
    F = {"x": fluxes.fx, "y": fluxes.fy, "z": fluxes.fz}
    for v, name in enumerate(HYDRO_FIELDS):
        field = sub.fields[name]
        for z in range(NIN):
            for y in range(NIN):
                row = field[z + 2, y + 2]
                fy_lo = F["y"][v, z, y]
                fy_hi = F["y"][v, z, y + 1]
                fz_lo = F["z"][v, z, y]
                fz_hi = F["z"][v, z + 1, y]
                fx_row = F["x"][v, z, y]
                for x0 in range(0, NIN, w):
                    act = min(w, NIN - x0)
                    u = _mload(bk, row, x0 + 2, act)
                    dxf = bk.sub(_mload(bk, fx_row, x0 + 1, act), _mload(bk, fx_row, x0, act))
                    dyf = bk.sub(_mload(bk, fy_hi, x0, act), _mload(bk, fy_lo, x0, act))
                    dzf = bk.sub(_mload(bk, fz_hi, x0, act), _mload(bk, fz_lo, x0, act))
                    net = bk.add(bk.add(dxf, dyf), dzf)
                    out = bk.sub(u, bk.mul(dtdx, net))
                    _mstore(out, row, x0 + 2, act)
    return sub


def monopole_kernel(target: SubGrid, sources, cfg: GravityConfig, backend="scalar"):
    bk = simd.get_backend(backend)
    w = bk.width
    _check_sources(sources)
    dx = target.dx
    halo = gravity_halo(cfg.theta)
    cube = source_cube(sources, "mass", halo)
    rad = dx / cfg.theta
    rad2 = rad * rad
    epsd = cfg.eps * dx
    eps2 = epsd * epsd
    phi, gx, gy, gz = _gravity_outputs(target)

    zero = bk.splat(0.0)
    one = bk.splat(1.0)
    rad2v = bk.splat(rad2)
    eps2v = bk.splat(eps2)

    for z in range(NIN):
        for y in range(NIN):
            for x0 in range(0, NIN, w):
                act = min(w, NIN - x0)
                acc_p = zero
                acc_x = zero
                acc_y = zero
                acc_z = zero
                for oz in range(-halo, halo + 1):
                    rzs = (-float(oz)) * dx
                    rzv = bk.splat(rzs)
                    for oy in range(-halo, halo + 1):
                        rys = (-float(oy)) * dx
                        ryv = bk.splat(rys)
                        for ox in range(-halo, halo + 1):
                            rxs = (-float(ox)) * dx
                            rxv = bk.splat(rxs)
                            row = cube[z + oz + halo, y + oy + halo]
                            m = _mload(bk, row, x0 + ox + halo, act)
                            r2 = bk.add(
                                bk.add(bk.mul(rxv, rxv), bk.mul(ryv, ryv)),
                                bk.mul(rzv, rzv),
                            )
                            not_self = not (ox == 0 and oy == 0 and oz == 0)
                            ok = bk.mask_and(
                                bk.cmp_le(r2, rad2v), bk.splat_mask(not_self)
                            )
                            if not bk.any(ok):
                                acc_p = bk.add(acc_p, zero)
                                acc_x = bk.add(acc_x, zero)
                                acc_y = bk.add(acc_y, zero)
                                acc_z = bk.add(acc_z, zero)
                                continue
                            rt = bk.sqrt(bk.add(r2, eps2v))
                            inv = bk.div(one, rt)
                            pt = _neg(bk, bk.mul(m, inv))
                            inv3 = bk.mul(bk.mul(inv, inv), inv)
                            com = bk.mul(m, inv3)
                            acc_p = bk.add(acc_p, bk.choose(ok, pt, zero))
                            acc_x = bk.add(acc_x, bk.choose(ok, _neg(bk, bk.mul(com, rxv)), zero))
                            acc_y = bk.add(acc_y, bk.choose(ok, _neg(bk, bk.mul(com, ryv)), zero))
                            acc_z = bk.add(acc_z, bk.choose(ok, _neg(bk, bk.mul(com, rzv)), zero))
                _mstore(acc_p, phi[z, y], x0, act)
                _mstore(acc_x, gx[z, y], x0, act)
                _mstore(acc_y, gy[z, y], x0, act)
                _mstore(acc_z, gz[z, y], x0, act)
    return phi, gx, gy, gz


def _clusters(cube: np.ndarray, dx: float):
    """Python mirror of the compiled cluster aggregation (same sum order)."""
    nc = cube.shape[0] // 2
    M = np.empty((nc, nc, nc))
    Dx = np.empty((nc, nc, nc))
    Dy = np.empty((nc, nc, nc))
    Dz = np.empty((nc, nc, nc))
    for cz in range(nc):
        for cy in range(nc):
            for cx in range(nc):
                m_tot = np.float64(0.0)
                dxa = np.float64(0.0)
                dya = np.float64(0.0)
                dza = np.float64(0.0)
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


def multipole_kernel(
    target: SubGrid, sources, cfg: GravityConfig, backend="scalar", i0: int = 0, i1: int = 512
):
    """Reference multipole over the flat interior cell range [i0, i1)."""
    bk = simd.get_backend(backend)
    w = bk.width
    _check_sources(sources)
    dx = target.dx
    cube = source_cube(sources, "mass", 8)
    M, Dx, Dy, Dz = _clusters(cube, dx)
    rad = dx / cfg.theta
    rad2 = rad * rad
    epsd = cfg.eps * dx
    eps2 = epsd * epsd
    order = cfg.expansion_order
    phi, gx, gy, gz = _gravity_outputs(target)

    zero = bk.splat(0.0)
    one = bk.splat(1.0)
    three = bk.splat(3.0)
    dxv = bk.splat(dx)
    rad2v = bk.splat(rad2)
    eps2v = bk.splat(eps2)
    nc = M.shape[0]

    f = i0
    while f < i1:
        z = f // 64
        y = (f % 64) // 8
        xs = f % 8
        run_end = min(8, xs + (i1 - f))
        tyv = bk.splat(float(y) + 0.5)
        tzv = bk.splat(float(z) + 0.5)
        for x0 in range(xs, run_end, w):
            act = min(w, run_end - x0)
            activem = _active_mask(bk, act)
            txv = simd.SimdVec(
                (np.arange(bk.width, dtype=np.float64) + float(x0)) + 0.5, bk
            )
            acc_p = zero
            acc_x = zero
            acc_y = zero
            acc_z = zero
            for cz in range(nc):
                bz = float(2 * cz - 8)
                rzv = bk.mul(bk.sub(tzv, bk.splat(bz + 1.0)), dxv)
                for cy in range(nc):
                    by = float(2 * cy - 8)
                    ryv = bk.mul(bk.sub(tyv, bk.splat(by + 1.0)), dxv)
                    for cx in range(nc):
                        bx = float(2 * cx - 8)
                        rxv = bk.mul(bk.sub(txv, bk.splat(bx + 1.0)), dxv)
                        r2 = bk.add(
                            bk.add(bk.mul(rxv, rxv), bk.mul(ryv, ryv)), bk.mul(rzv, rzv)
                        )
                        far = bk.cmp_gt(r2, rad2v)
                        mt = bk.splat(M[cz, cy, cx])
                        rt = bk.sqrt(bk.add(r2, eps2v))
                        inv = bk.div(one, rt)
                        inv3 = bk.mul(bk.mul(inv, inv), inv)
                        p_f = _neg(bk, bk.mul(mt, inv))
                        gcom = bk.mul(mt, inv3)
                        gx_f = _neg(bk, bk.mul(gcom, rxv))
                        gy_f = _neg(bk, bk.mul(gcom, ryv))
                        gz_f = _neg(bk, bk.mul(gcom, rzv))
                        if order == 1:
                            dxa = bk.splat(Dx[cz, cy, cx])
                            dya = bk.splat(Dy[cz, cy, cx])
                            dza = bk.splat(Dz[cz, cy, cx])
                            dr = bk.add(
                                bk.add(bk.mul(dxa, rxv), bk.mul(dya, ryv)),
                                bk.mul(dza, rzv),
                            )
                            p_f = bk.sub(p_f, bk.mul(dr, inv3))
                            inv5 = bk.mul(bk.mul(inv3, inv), inv)
                            t3 = bk.mul(bk.mul(three, dr), inv5)
                            gx_f = bk.sub(bk.add(gx_f, bk.mul(dxa, inv3)), bk.mul(t3, rxv))
                            gy_f = bk.sub(bk.add(gy_f, bk.mul(dya, inv3)), bk.mul(t3, ryv))
                            gz_f = bk.sub(bk.add(gz_f, bk.mul(dza, inv3)), bk.mul(t3, rzv))
                        near_any = bk.any(bk.mask_and(bk.mask_not(far), activem))
                        if near_any:
                            p_n = zero
                            gx_n = zero
                            gy_n = zero
                            gz_n = zero
                            for oz in range(2):
                                for oy in range(2):
                                    for ox in range(2):
                                        # one source cell: the mass is lane-uniform
                                        m = bk.splat(
                                            float(cube[2 * cz + oz, 2 * cy + oy, 2 * cx + ox])
                                        )
                                        sxv = bk.mul(
                                            bk.sub(txv, bk.splat((bx + float(ox)) + 0.5)),
                                            dxv,
                                        )
                                        syv = bk.mul(
                                            bk.sub(tyv, bk.splat((by + float(oy)) + 0.5)),
                                            dxv,
                                        )
                                        szv = bk.mul(
                                            bk.sub(tzv, bk.splat((bz + float(oz)) + 0.5)),
                                            dxv,
                                        )
                                        r2s = bk.add(
                                            bk.add(bk.mul(sxv, sxv), bk.mul(syv, syv)),
                                            bk.mul(szv, szv),
                                        )
                                        okn = bk.cmp_gt(r2s, zero)
                                        rts = bk.sqrt(bk.add(r2s, eps2v))
                                        invs = bk.div(one, rts)
                                        pt = _neg(bk, bk.mul(m, invs))
                                        invs3 = bk.mul(bk.mul(invs, invs), invs)
                                        coms = bk.mul(m, invs3)
                                        p_n = bk.add(p_n, bk.choose(okn, pt, zero))
                                        gx_n = bk.add(
                                            gx_n,
                                            bk.choose(okn, _neg(bk, bk.mul(coms, sxv)), zero),
                                        )
                                        gy_n = bk.add(
                                            gy_n,
                                            bk.choose(okn, _neg(bk, bk.mul(coms, syv)), zero),
                                        )
                                        gz_n = bk.add(
                                            gz_n,
                                            bk.choose(okn, _neg(bk, bk.mul(coms, szv)), zero),
                                        )
                        else:
                            p_n = zero
                            gx_n = zero
                            gy_n = zero
                            gz_n = zero
                        acc_p = bk.add(acc_p, bk.choose(far, p_f, p_n))
                        acc_x = bk.add(acc_x, bk.choose(far, gx_f, gx_n))
                        acc_y = bk.add(acc_y, bk.choose(far, gy_f, gy_n))
                        acc_z = bk.add(acc_z, bk.choose(far, gz_f, gz_n))
            _mstore(acc_p, phi[z, y], x0, act)
            _mstore(acc_x, gx[z, y], x0, act)
            _mstore(acc_y, gy[z, y], x0, act)
            _mstore(acc_z, gz[z, y], x0, act)
        f += run_end - xs
    return phi, gx, gy, gz
