"""Hot trajectory kernels: numba-compiled scalar loops with a vectorized
numpy fallback (CURVEDFLOW_NUMBA=0 selects the fallback).

The analytic sphere flows are encoded by integer ids so the inner loops stay
compilable; samplers expose `kernel_spec = (flow_id, p0, p1)`.  Sphere
trajectories integrate in the R^3 embedding (renormalized each step), with
material tangents carried in frame components

    d xi1/dt = G11 xi1 + (G12 + w) xi2
    d xi2/dt = (G21 - w) xi1 + G22 xi2,   w = u mu / sqrt(1 - mu^2),

where G is the frame covariant velocity gradient.  Hyperbolicity indicators
are sampled at the RK4 midpoint stage of every step.
"""

import numpy as np

from ._accel import USE_NUMBA, njit, prange
from .interp import spline_eval, spline_eval_scalar

RIGID, JET, QUADRUPOLE = 0, 1, 2

_SQRT5 = np.sqrt(5.0)
_SQRT30 = np.sqrt(30.0)

_JET_AXIS_TOL = 1e-9
_DEGEN_REL = 1e-10


# ---------------------------------------------------------------------------
# scalar flow formulas (numba path)

@njit(cache=True)
def _uv_chart(flow, p0, p1, lam, mu):
    r = np.sqrt(1.0 - mu * mu)
    if flow == JET:
        if mu >= p0:
            amp = 0.5 * p1 * (1.0 + p0)
            return amp * np.sqrt((1.0 - mu) / (1.0 + mu)), 0.0
        amp = 0.5 * p1 * (1.0 - p0)
        return amp * np.sqrt((1.0 + mu) / (1.0 - mu)), 0.0
    if flow == QUADRUPOLE:
        c2 = np.cos(2.0 * lam)
        s2 = np.sin(2.0 * lam)
        u = mu * r * (0.5 * _SQRT5 - (_SQRT30 / 6.0) * c2)
        v = (_SQRT30 / 6.0) * r * s2
        return u, v
    return p0 * r, 0.0


@njit(cache=True)
def _grad_chart(flow, p0, p1, lam, mu):
    """Frame covariant gradient entries (G11, G12, G21, G22)."""
    r = np.sqrt(1.0 - mu * mu)
    if flow == JET:
        if mu >= p0:
            amp = 0.5 * p1 * (1.0 + p0)
            return 0.0, -amp / (1.0 + mu), amp * mu / (1.0 + mu), 0.0
        amp = 0.5 * p1 * (1.0 - p0)
        return 0.0, amp / (1.0 - mu), -amp * mu / (1.0 - mu), 0.0
    if flow == QUADRUPOLE:
        c2 = np.cos(2.0 * lam)
        s2 = np.sin(2.0 * lam)
        zonal = 0.5 * _SQRT5 - (_SQRT30 / 6.0) * c2
        u = mu * r * zonal
        v = (_SQRT30 / 6.0) * r * s2
        u_lam = mu * r * (_SQRT30 / 3.0) * s2
        u_mu = (1.0 - 2.0 * mu * mu) / r * zonal
        v_lam = (_SQRT30 / 3.0) * r * c2
        v_mu = -(_SQRT30 / 6.0) * (mu / r) * s2
        a = mu / r
        return u_lam / r - v * a, u_mu * r, v_lam / r + u * a, v_mu * r
    return 0.0, -p0 * mu, p0 * mu, 0.0


@njit(cache=True)
def _w_chart(flow, p0, p1, lam, mu):
    """Frame advective acceleration (nabla_u u)."""
    u, v = _uv_chart(flow, p0, p1, lam, mu)
    g11, g12, g21, g22 = _grad_chart(flow, p0, p1, lam, mu)
    return g11 * u + g12 * v, g21 * u + g22 * v


@njit(cache=True)
def _classify4(flow, p0, p1, lam, mu, threshold):
    """(hyp_with, hyp_without, strong_with, strong_without) at a sphere point."""
    g11, g12, g21, g22 = _grad_chart(flow, p0, p1, lam, mu)
    frob = np.sqrt(g11 * g11 + g12 * g12 + g21 * g21 + g22 * g22)
    s1 = 0.5 * (g11 - g22)
    s12 = 0.5 * (g12 + g21)
    lam_s = np.hypot(s1, s12)
    if lam_s <= _DEGEN_REL * (frob + 1e-300):
        return False, False, False, False
    if flow == JET and abs(mu - p0) <= _JET_AXIS_TOL:
        return False, False, False, False

    r = np.sqrt(1.0 - mu * mu)
    hl = 1e-4
    hm = min(1e-4, (1.0 - abs(mu)) / 8.0)
    w1l = 0.0
    w2l = 0.0
    w1m = 0.0
    w2m = 0.0
    for idx in range(4):
        if idx == 0:
            o, c = -2.0, 1.0 / 12.0
        elif idx == 1:
            o, c = -1.0, -8.0 / 12.0
        elif idx == 2:
            o, c = 1.0, 8.0 / 12.0
        else:
            o, c = 2.0, -1.0 / 12.0
        a1, a2 = _w_chart(flow, p0, p1, lam + o * hl, mu)
        w1l += c * a1
        w2l += c * a2
        b1, b2 = _w_chart(flow, p0, p1, lam, mu + o * hm)
        w1m += c * b1
        w2m += c * b2
    w1l /= hl
    w2l /= hl
    w1m /= hm
    w2m /= hm

    u, v = _uv_chart(flow, p0, p1, lam, mu)
    w1, w2 = _w_chart(flow, p0, p1, lam, mu)
    a = mu / r
    h11 = -(w1l / r - w2 * a)
    h12 = -(w1m * r)
    h21 = -(w2l / r + w1 * a)
    h22 = -(w2m * r)

    t11 = g11 * g11 + g21 * g21
    t12 = g11 * g12 + g21 * g22
    t21 = g12 * g11 + g22 * g21
    t22 = g12 * g12 + g22 * g22

    n11 = -h11 + t11
    n12 = -h12 + t12
    n21 = -h21 + t21
    n22 = -h22 + t22

    # curvature term on the unit sphere: R1221 = 1
    c11 = v * v
    c12 = -u * v
    c22 = u * u

    phi = 0.5 * np.arctan2(s12, s1)
    epx = np.cos(phi)
    epy = np.sin(phi)
    # zero-strain directions e+ +/- e-
    xp1 = epx - epy
    xp2 = epy + epx
    xm1 = epx + epy
    xm2 = epy - epx

    sn12 = 0.5 * (n12 + n21)
    scale_w = abs(n11 - c11) + abs(n22 - c22) + 2.0 * abs(sn12 - c12) + 1e-300
    scale_n = abs(n11) + abs(n22) + 2.0 * abs(sn12) + 1e-300
    fw_p = (n11 - c11) * xp1 * xp1 + 2.0 * (sn12 - c12) * xp1 * xp2 + (n22 - c22) * xp2 * xp2
    fw_m = (n11 - c11) * xm1 * xm1 + 2.0 * (sn12 - c12) * xm1 * xm2 + (n22 - c22) * xm2 * xm2
    fn_p = n11 * xp1 * xp1 + 2.0 * sn12 * xp1 * xp2 + n22 * xp2 * xp2
    fn_m = n11 * xm1 * xm1 + 2.0 * sn12 * xm1 * xm2 + n22 * xm2 * xm2
    if abs(fw_p) <= 1e-12 * scale_w:
        fw_p = 0.0
    if abs(fw_m) <= 1e-12 * scale_w:
        fw_m = 0.0
    if abs(fn_p) <= 1e-12 * scale_n:
        fn_p = 0.0
    if abs(fn_m) <= 1e-12 * scale_n:
        fn_m = 0.0

    tr_w = (n11 - c11) + (n22 - c22)
    det_w = (n11 - c11) * (n22 - c22) - (sn12 - c12) ** 2
    tr_n = n11 + n22
    det_n = n11 * n22 - sn12 * sn12

    hyp_w = fw_p >= threshold and fw_m >= threshold
    hyp_n = fn_p >= threshold and fn_m >= threshold
    strong_w = tr_w > 0.0 and det_w > 0.0
    strong_n = tr_n > 0.0 and det_n > 0.0
    return hyp_w, hyp_n, strong_w, strong_n


@njit(cache=True)
def _embed_terms(flow, p0, p1, x, y, z):
    """Velocity vector in R^3 plus the frame tangent-ODE matrix."""
    rxy = np.sqrt(x * x + y * y)
    mu = z
    if flow == QUADRUPOLE:
        c2 = (x * x - y * y) / (rxy * rxy)
        s2 = 2.0 * x * y / (rxy * rxy)
        zonal = 0.5 * _SQRT5 - (_SQRT30 / 6.0) * c2
        u = mu * rxy * zonal
        v = (_SQRT30 / 6.0) * rxy * s2
        u_lam = mu * rxy * (_SQRT30 / 3.0) * s2
        u_mu = (1.0 - 2.0 * mu * mu) / rxy * zonal
        v_lam = (_SQRT30 / 3.0) * rxy * c2
        v_mu = -(_SQRT30 / 6.0) * (mu / rxy) * s2
        a = mu / rxy
        g11 = u_lam / rxy - v * a
        g12 = u_mu * rxy
        g21 = v_lam / rxy + u * a
        g22 = v_mu * rxy
    elif flow == JET:
        if mu >= p0:
            amp = 0.5 * p1 * (1.0 + p0)
            u = amp * np.sqrt((1.0 - mu) / (1.0 + mu))
            g12 = -amp / (1.0 + mu)
            g21 = amp * mu / (1.0 + mu)
        else:
            amp = 0.5 * p1 * (1.0 - p0)
            u = amp * np.sqrt((1.0 + mu) / (1.0 - mu))
            g12 = amp / (1.0 - mu)
            g21 = -amp * mu / (1.0 - mu)
        v = 0.0
        g11 = 0.0
        g22 = 0.0
    else:
        u = p0 * rxy
        v = 0.0
        g11 = 0.0
        g12 = -p0 * mu
        g21 = p0 * mu
        g22 = 0.0
    w = u * mu / rxy
    vx = -u * y / rxy - v * z * x / rxy
    vy = u * x / rxy - v * z * y / rxy
    vz = v * rxy
    return vx, vy, vz, g11, g12 + w, g21 - w, g22


@njit(cache=True)
def _embed_vel(flow, p0, p1, x, y, z):
    rxy = np.sqrt(x * x + y * y)
    mu = z
    if flow == QUADRUPOLE:
        c2 = (x * x - y * y) / (rxy * rxy)
        s2 = 2.0 * x * y / (rxy * rxy)
        u = mu * rxy * (0.5 * _SQRT5 - (_SQRT30 / 6.0) * c2)
        v = (_SQRT30 / 6.0) * rxy * s2
    elif flow == JET:
        if mu >= p0:
            u = 0.5 * p1 * (1.0 + p0) * np.sqrt((1.0 - mu) / (1.0 + mu))
        else:
            u = 0.5 * p1 * (1.0 - p0) * np.sqrt((1.0 + mu) / (1.0 - mu))
        v = 0.0
    else:
        u = p0 * rxy
        v = 0.0
    return -u * y / rxy - v * z * x / rxy, u * x / rxy - v * z * y / rxy, v * rxy


@njit(cache=True, parallel=True)
def ftle_map_numba(flow, p0, p1, lam_seeds, mu_seeds, big_t, dt):
    """FTLE over flattened seeds: tangent-pair Gram-matrix definition."""
    n = lam_seeds.size
    out = np.empty(n)
    nsteps = int(round(big_t / dt))
    for s in prange(n):
        mu = mu_seeds[s]
        rxy = np.sqrt(1.0 - mu * mu)
        x = np.cos(lam_seeds[s]) * rxy
        y = np.sin(lam_seeds[s]) * rxy
        z = mu
        xa1 = 1.0
        xa2 = 0.0
        xb1 = 0.0
        xb2 = 1.0
        for _ in range(nsteps):
            vx1, vy1, vz1, a11, a12, a21, a22 = _embed_terms(flow, p0, p1, x, y, z)
            ka1 = a11 * xa1 + a12 * xa2
            ka2 = a21 * xa1 + a22 * xa2
            kb1 = a11 * xb1 + a12 * xb2
            kb2 = a21 * xb1 + a22 * xb2

            x2 = x + 0.5 * dt * vx1
            y2 = y + 0.5 * dt * vy1
            z2 = z + 0.5 * dt * vz1
            vx2, vy2, vz2, a11, a12, a21, a22 = _embed_terms(flow, p0, p1, x2, y2, z2)
            la1 = a11 * (xa1 + 0.5 * dt * ka1) + a12 * (xa2 + 0.5 * dt * ka2)
            la2 = a21 * (xa1 + 0.5 * dt * ka1) + a22 * (xa2 + 0.5 * dt * ka2)
            lb1 = a11 * (xb1 + 0.5 * dt * kb1) + a12 * (xb2 + 0.5 * dt * kb2)
            lb2 = a21 * (xb1 + 0.5 * dt * kb1) + a22 * (xb2 + 0.5 * dt * kb2)

            x3 = x + 0.5 * dt * vx2
            y3 = y + 0.5 * dt * vy2
            z3 = z + 0.5 * dt * vz2
            vx3, vy3, vz3, a11, a12, a21, a22 = _embed_terms(flow, p0, p1, x3, y3, z3)
            ma1 = a11 * (xa1 + 0.5 * dt * la1) + a12 * (xa2 + 0.5 * dt * la2)
            ma2 = a21 * (xa1 + 0.5 * dt * la1) + a22 * (xa2 + 0.5 * dt * la2)
            mb1 = a11 * (xb1 + 0.5 * dt * lb1) + a12 * (xb2 + 0.5 * dt * lb2)
            mb2 = a21 * (xb1 + 0.5 * dt * lb1) + a22 * (xb2 + 0.5 * dt * lb2)

            x4 = x + dt * vx3
            y4 = y + dt * vy3
            z4 = z + dt * vz3
            vx4, vy4, vz4, a11, a12, a21, a22 = _embed_terms(flow, p0, p1, x4, y4, z4)
            na1 = a11 * (xa1 + dt * ma1) + a12 * (xa2 + dt * ma2)
            na2 = a21 * (xa1 + dt * ma1) + a22 * (xa2 + dt * ma2)
            nb1 = a11 * (xb1 + dt * mb1) + a12 * (xb2 + dt * mb2)
            nb2 = a21 * (xb1 + dt * mb1) + a22 * (xb2 + dt * mb2)

            x += (dt / 6.0) * (vx1 + 2.0 * vx2 + 2.0 * vx3 + vx4)
            y += (dt / 6.0) * (vy1 + 2.0 * vy2 + 2.0 * vy3 + vy4)
            z += (dt / 6.0) * (vz1 + 2.0 * vz2 + 2.0 * vz3 + vz4)
            nrm = np.sqrt(x * x + y * y + z * z)
            x /= nrm
            y /= nrm
            z /= nrm
            xa1 += (dt / 6.0) * (ka1 + 2.0 * la1 + 2.0 * ma1 + na1)
            xa2 += (dt / 6.0) * (ka2 + 2.0 * la2 + 2.0 * ma2 + na2)
            xb1 += (dt / 6.0) * (kb1 + 2.0 * lb1 + 2.0 * mb1 + nb1)
            xb2 += (dt / 6.0) * (kb2 + 2.0 * lb2 + 2.0 * mb2 + nb2)

        gaa = xa1 * xa1 + xa2 * xa2
        gbb = xb1 * xb1 + xb2 * xb2
        gab = xa1 * xb1 + xa2 * xb2
        tr = gaa + gbb
        det = gaa * gbb - gab * gab
        disc = tr * tr - 4.0 * det
        if disc < 0.0:
            disc = 0.0
        lmax = 0.5 * (tr + np.sqrt(disc))
        out[s] = np.log(lmax) / (2.0 * big_t)
    return out


@njit(cache=True, parallel=True)
def hyptime_map_numba(flow, p0, p1, lam_seeds, mu_seeds, big_t, dt, threshold):
    """Hyperbolicity times along trajectories, all four variants at once.

    Columns: plain-with-curvature, plain-without, strong-with,
    strong-without.  Sharing one trajectory makes the pointwise
    inequalities (strong <= plain, with <= without) exact.
    """
    n = lam_seeds.size
    out = np.zeros((n, 4))
    nsteps = int(round(big_t / dt))
    for s in prange(n):
        mu = mu_seeds[s]
        rxy = np.sqrt(1.0 - mu * mu)
        x = np.cos(lam_seeds[s]) * rxy
        y = np.sin(lam_seeds[s]) * rxy
        z = mu
        for _ in range(nsteps):
            vx1, vy1, vz1 = _embed_vel(flow, p0, p1, x, y, z)
            x2 = x + 0.5 * dt * vx1
            y2 = y + 0.5 * dt * vy1
            z2 = z + 0.5 * dt * vz1
            nrm = np.sqrt(x2 * x2 + y2 * y2 + z2 * z2)
            lam_m = np.arctan2(y2, x2)
            mu_m = z2 / nrm
            hw, hn, sw, sn = _classify4(flow, p0, p1, lam_m, mu_m, threshold)
            if hw or sw:
                out[s, 0] += dt
            if hn or sn:
                out[s, 1] += dt
            if sw:
                out[s, 2] += dt
            if sn:
                out[s, 3] += dt
            vx2, vy2, vz2 = _embed_vel(flow, p0, p1, x2, y2, z2)
            x3 = x + 0.5 * dt * vx2
            y3 = y + 0.5 * dt * vy2
            z3 = z + 0.5 * dt * vz2
            vx3, vy3, vz3 = _embed_vel(flow, p0, p1, x3, y3, z3)
            x4 = x + dt * vx3
            y4 = y + dt * vy3
            z4 = z + dt * vz3
            vx4, vy4, vz4 = _embed_vel(flow, p0, p1, x4, y4, z4)
            x += (dt / 6.0) * (vx1 + 2.0 * vx2 + 2.0 * vx3 + vx4)
            y += (dt / 6.0) * (vy1 + 2.0 * vy2 + 2.0 * vy3 + vy4)
            z += (dt / 6.0) * (vz1 + 2.0 * vz2 + 2.0 * vz3 + vz4)
            nrm = np.sqrt(x * x + y * y + z * z)
            x /= nrm
            y /= nrm
            z /= nrm
    return out


@njit(cache=True, parallel=True)
def advect_final_numba(flow, p0, p1, lam_seeds, mu_seeds, big_t, dt):
    """Final (lambda, mu) of each seed after time big_t (positions only)."""
    n = lam_seeds.size
    lam_f = np.empty(n)
    mu_f = np.empty(n)
    nsteps = int(round(big_t / dt))
    for s in prange(n):
        mu = mu_seeds[s]
        rxy = np.sqrt(1.0 - mu * mu)
        x = np.cos(lam_seeds[s]) * rxy
        y = np.sin(lam_seeds[s]) * rxy
        z = mu
        for _ in range(nsteps):
            vx1, vy1, vz1 = _embed_vel(flow, p0, p1, x, y, z)
            vx2, vy2, vz2 = _embed_vel(flow, p0, p1, x + 0.5 * dt * vx1, y + 0.5 * dt * vy1, z + 0.5 * dt * vz1)
            vx3, vy3, vz3 = _embed_vel(flow, p0, p1, x + 0.5 * dt * vx2, y + 0.5 * dt * vy2, z + 0.5 * dt * vz2)
            vx4, vy4, vz4 = _embed_vel(flow, p0, p1, x + dt * vx3, y + dt * vy3, z + dt * vz3)
            x += (dt / 6.0) * (vx1 + 2.0 * vx2 + 2.0 * vx3 + vx4)
            y += (dt / 6.0) * (vy1 + 2.0 * vy2 + 2.0 * vy3 + vy4)
            z += (dt / 6.0) * (vz1 + 2.0 * vz2 + 2.0 * vz3 + vz4)
            nrm = np.sqrt(x * x + y * y + z * z)
            x /= nrm
            y /= nrm
            z /= nrm
        lam_f[s] = np.arctan2(y, x)
        mu_f[s] = z
    return lam_f, mu_f


def advect_final_numpy(flow, p0, p1, lam_seeds, mu_seeds, big_t, dt):
    lam = np.asarray(lam_seeds, dtype=float)
    mu = np.asarray(mu_seeds, dtype=float)
    r = np.sqrt(1.0 - mu * mu)
    pos = np.stack([np.cos(lam) * r, np.sin(lam) * r, mu], axis=1)
    nsteps = int(round(big_t / dt))

    def vel(pos):
        x, y, z = pos[:, 0], pos[:, 1], pos[:, 2]
        rxy = np.sqrt(x * x + y * y)
        u, v = _uv_chart_np(flow, p0, p1, np.arctan2(y, x), z)
        return np.stack(
            [-u * y / rxy - v * z * x / rxy, u * x / rxy - v * z * y / rxy, v * rxy], axis=1
        )

    for _ in range(nsteps):
        k1 = vel(pos)
        k2 = vel(pos + 0.5 * dt * k1)
        k3 = vel(pos + 0.5 * dt * k2)
        k4 = vel(pos + dt * k3)
        pos = pos + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        pos /= np.linalg.norm(pos, axis=1, keepdims=True)
    return np.arctan2(pos[:, 1], pos[:, 0]), pos[:, 2]


@njit(cache=True)
def line_rk4_step_numba(xs, ys, cu_a, cv_a, cu_b, cv_b, dt):
    """Advance line nodes one solver step (coordinate velocities).

    cu_a/cv_a are spline coefficients of (dx/dt, dy/dt) at the step start,
    cu_b/cv_b at the step end; stages blend the two levels linearly in time.
    """
    for i in range(xs.size):
        x = xs[i]
        y = ys[i]
        u1 = spline_eval_scalar(cu_a, x, y)
        v1 = spline_eval_scalar(cv_a, x, y)
        x2 = x + 0.5 * dt * u1
        y2 = y + 0.5 * dt * v1
        u2 = 0.5 * (spline_eval_scalar(cu_a, x2, y2) + spline_eval_scalar(cu_b, x2, y2))
        v2 = 0.5 * (spline_eval_scalar(cv_a, x2, y2) + spline_eval_scalar(cv_b, x2, y2))
        x3 = x + 0.5 * dt * u2
        y3 = y + 0.5 * dt * v2
        u3 = 0.5 * (spline_eval_scalar(cu_a, x3, y3) + spline_eval_scalar(cu_b, x3, y3))
        v3 = 0.5 * (spline_eval_scalar(cv_a, x3, y3) + spline_eval_scalar(cv_b, x3, y3))
        x4 = x + dt * u3
        y4 = y + dt * v3
        u4 = spline_eval_scalar(cu_b, x4, y4)
        v4 = spline_eval_scalar(cv_b, x4, y4)
        xs[i] = x + (dt / 6.0) * (u1 + 2.0 * u2 + 2.0 * u3 + u4)
        ys[i] = y + (dt / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4)


# ---------------------------------------------------------------------------
# vectorized numpy fallback

def _uv_chart_np(flow, p0, p1, lam, mu):
    r = np.sqrt(1.0 - mu * mu)
    if flow == JET:
        au = 0.5 * p1 * (1.0 + p0)
        al = 0.5 * p1 * (1.0 - p0)
        u = np.where(
            mu >= p0,
            au * np.sqrt((1.0 - mu) / (1.0 + mu)),
            al * np.sqrt((1.0 + mu) / (1.0 - mu)),
        )
        return u, 0.0 * u
    if flow == QUADRUPOLE:
        c2, s2 = np.cos(2.0 * lam), np.sin(2.0 * lam)
        return mu * r * (0.5 * _SQRT5 - (_SQRT30 / 6.0) * c2), (_SQRT30 / 6.0) * r * s2
    return p0 * r, 0.0 * r


def _grad_chart_np(flow, p0, p1, lam, mu):
    r = np.sqrt(1.0 - mu * mu)
    if flow == JET:
        au = 0.5 * p1 * (1.0 + p0)
        al = 0.5 * p1 * (1.0 - p0)
        g12 = np.where(mu >= p0, -au / (1.0 + mu), al / (1.0 - mu))
        g21 = np.where(mu >= p0, au * mu / (1.0 + mu), -al * mu / (1.0 - mu))
        zero = 0.0 * g12
        return zero, g12, g21, zero
    if flow == QUADRUPOLE:
        c2, s2 = np.cos(2.0 * lam), np.sin(2.0 * lam)
        zonal = 0.5 * _SQRT5 - (_SQRT30 / 6.0) * c2
        u = mu * r * zonal
        v = (_SQRT30 / 6.0) * r * s2
        a = mu / r
        g11 = mu * r * (_SQRT30 / 3.0) * s2 / r - v * a
        g12 = (1.0 - 2.0 * mu * mu) / r * zonal * r
        g21 = (_SQRT30 / 3.0) * r * c2 / r + u * a
        g22 = -(_SQRT30 / 6.0) * (mu / r) * s2 * r
        return g11, g12, g21, g22
    zero = 0.0 * mu
    return zero, -p0 * mu, p0 * mu, zero


def _w_chart_np(flow, p0, p1, lam, mu):
    u, v = _uv_chart_np(flow, p0, p1, lam, mu)
    g11, g12, g21, g22 = _grad_chart_np(flow, p0, p1, lam, mu)
    return g11 * u + g12 * v, g21 * u + g22 * v


def _classify4_np(flow, p0, p1, lam, mu, threshold):
    g11, g12, g21, g22 = _grad_chart_np(flow, p0, p1, lam, mu)
    frob = np.sqrt(g11**2 + g12**2 + g21**2 + g22**2)
    s1 = 0.5 * (g11 - g22)
    s12 = 0.5 * (g12 + g21)
    lam_s = np.hypot(s1, s12)
    ok = lam_s > _DEGEN_REL * (frob + 1e-300)
    if flow == JET:
        ok &= np.abs(mu - p0) > _JET_AXIS_TOL

    r = np.sqrt(1.0 - mu * mu)
    hl = 1e-4
    hm = np.minimum(1e-4, (1.0 - np.abs(mu)) / 8.0)
    w1l = w2l = w1m = w2m = 0.0
    for o, c in zip((-2, -1, 1, 2), (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)):
        a1, a2 = _w_chart_np(flow, p0, p1, lam + o * hl, mu)
        w1l = w1l + c * a1
        w2l = w2l + c * a2
        b1, b2 = _w_chart_np(flow, p0, p1, lam, mu + o * hm)
        w1m = w1m + c * b1
        w2m = w2m + c * b2
    w1l, w2l = w1l / hl, w2l / hl
    w1m, w2m = w1m / hm, w2m / hm

    u, v = _uv_chart_np(flow, p0, p1, lam, mu)
    w1, w2 = _w_chart_np(flow, p0, p1, lam, mu)
    a = mu / r
    h11 = -(w1l / r - w2 * a)
    h12 = -(w1m * r)
    h21 = -(w2l / r + w1 * a)
    h22 = -(w2m * r)

    n11 = -h11 + g11 * g11 + g21 * g21
    n12 = -h12 + g11 * g12 + g21 * g22
    n21 = -h21 + g12 * g11 + g22 * g21
    n22 = -h22 + g12 * g12 + g22 * g22
    sn12 = 0.5 * (n12 + n21)

    c11, c12, c22 = v * v, -u * v, u * u

    phi = 0.5 * np.arctan2(s12, s1)
    epx, epy = np.cos(phi), np.sin(phi)
    xp1, xp2 = epx - epy, epy + epx
    xm1, xm2 = epx + epy, epy - epx

    def forms(m11, m12, m22):
        scale = np.abs(m11) + np.abs(m22) + 2.0 * np.abs(m12) + 1e-300
        f_p = m11 * xp1**2 + 2.0 * m12 * xp1 * xp2 + m22 * xp2**2
        f_m = m11 * xm1**2 + 2.0 * m12 * xm1 * xm2 + m22 * xm2**2
        f_p = np.where(np.abs(f_p) <= 1e-12 * scale, 0.0, f_p)
        f_m = np.where(np.abs(f_m) <= 1e-12 * scale, 0.0, f_m)
        return (f_p >= threshold) & (f_m >= threshold), (m11 + m22 > 0) & (m11 * m22 - m12**2 > 0)

    hyp_n, strong_n = forms(n11, sn12, n22)
    hyp_w, strong_w = forms(n11 - c11, sn12 - c12, n22 - c22)
    return hyp_w & ok, hyp_n & ok, strong_w & ok, strong_n & ok


def _embed_terms_np(flow, p0, p1, x, y, z):
    rxy = np.sqrt(x * x + y * y)
    lam = np.arctan2(y, x)
    u, v = _uv_chart_np(flow, p0, p1, lam, z)
    g11, g12, g21, g22 = _grad_chart_np(flow, p0, p1, lam, z)
    w = u * z / rxy
    vx = -u * y / rxy - v * z * x / rxy
    vy = u * x / rxy - v * z * y / rxy
    vz = v * rxy
    return vx, vy, vz, g11, g12 + w, g21 - w, g22


def ftle_map_numpy(flow, p0, p1, lam_seeds, mu_seeds, big_t, dt):
    lam = np.asarray(lam_seeds, dtype=float)
    mu = np.asarray(mu_seeds, dtype=float)
    r = np.sqrt(1.0 - mu * mu)
    pos = np.stack([np.cos(lam) * r, np.sin(lam) * r, mu], axis=1)
    xi = np.zeros((lam.size, 4))
    xi[:, 0] = 1.0
    xi[:, 3] = 1.0
    nsteps = int(round(big_t / dt))

    def rhs(pos, xi):
        vx, vy, vz, a11, a12, a21, a22 = _embed_terms_np(
            flow, p0, p1, pos[:, 0], pos[:, 1], pos[:, 2]
        )
        dxi = np.empty_like(xi)
        dxi[:, 0] = a11 * xi[:, 0] + a12 * xi[:, 1]
        dxi[:, 1] = a21 * xi[:, 0] + a22 * xi[:, 1]
        dxi[:, 2] = a11 * xi[:, 2] + a12 * xi[:, 3]
        dxi[:, 3] = a21 * xi[:, 2] + a22 * xi[:, 3]
        return np.stack([vx, vy, vz], axis=1), dxi

    for _ in range(nsteps):
        k1, k1x = rhs(pos, xi)
        k2, k2x = rhs(pos + 0.5 * dt * k1, xi + 0.5 * dt * k1x)
        k3, k3x = rhs(pos + 0.5 * dt * k2, xi + 0.5 * dt * k2x)
        k4, k4x = rhs(pos + dt * k3, xi + dt * k3x)
        pos = pos + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        xi = xi + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        pos /= np.linalg.norm(pos, axis=1, keepdims=True)

    gaa = xi[:, 0] ** 2 + xi[:, 1] ** 2
    gbb = xi[:, 2] ** 2 + xi[:, 3] ** 2
    gab = xi[:, 0] * xi[:, 2] + xi[:, 1] * xi[:, 3]
    tr = gaa + gbb
    det = gaa * gbb - gab**2
    lmax = 0.5 * (tr + np.sqrt(np.maximum(tr**2 - 4.0 * det, 0.0)))
    return np.log(lmax) / (2.0 * big_t)


def hyptime_map_numpy(flow, p0, p1, lam_seeds, mu_seeds, big_t, dt, threshold):
    lam = np.asarray(lam_seeds, dtype=float)
    mu = np.asarray(mu_seeds, dtype=float)
    r = np.sqrt(1.0 - mu * mu)
    pos = np.stack([np.cos(lam) * r, np.sin(lam) * r, mu], axis=1)
    out = np.zeros((lam.size, 4))
    nsteps = int(round(big_t / dt))

    def vel(pos):
        x, y, z = pos[:, 0], pos[:, 1], pos[:, 2]
        rxy = np.sqrt(x * x + y * y)
        u, v = _uv_chart_np(flow, p0, p1, np.arctan2(y, x), z)
        return np.stack([-u * y / rxy - v * z * x / rxy, u * x / rxy - v * z * y / rxy, v * rxy], axis=1)

    for _ in range(nsteps):
        k1 = vel(pos)
        mid = pos + 0.5 * dt * k1
        nrm = np.linalg.norm(mid, axis=1)
        hw, hn, sw, sn = _classify4_np(
            flow, p0, p1, np.arctan2(mid[:, 1], mid[:, 0]), mid[:, 2] / nrm, threshold
        )
        out[:, 0] += dt * (hw | sw)
        out[:, 1] += dt * (hn | sn)
        out[:, 2] += dt * sw
        out[:, 3] += dt * sn
        k2 = vel(mid)
        k3 = vel(pos + 0.5 * dt * k2)
        k4 = vel(pos + dt * k3)
        pos = pos + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        pos /= np.linalg.norm(pos, axis=1, keepdims=True)
    return out


def line_rk4_step_numpy(xs, ys, cu_a, cv_a, cu_b, cv_b, dt):
    x, y = xs, ys
    u1 = spline_eval(cu_a, x, y)
    v1 = spline_eval(cv_a, x, y)
    x2, y2 = x + 0.5 * dt * u1, y + 0.5 * dt * v1
    u2 = 0.5 * (spline_eval(cu_a, x2, y2) + spline_eval(cu_b, x2, y2))
    v2 = 0.5 * (spline_eval(cv_a, x2, y2) + spline_eval(cv_b, x2, y2))
    x3, y3 = x + 0.5 * dt * u2, y + 0.5 * dt * v2
    u3 = 0.5 * (spline_eval(cu_a, x3, y3) + spline_eval(cu_b, x3, y3))
    v3 = 0.5 * (spline_eval(cv_a, x3, y3) + spline_eval(cv_b, x3, y3))
    x4, y4 = x + dt * u3, y + dt * v3
    u4 = spline_eval(cu_b, x4, y4)
    v4 = spline_eval(cv_b, x4, y4)
    xs[:] = x + (dt / 6.0) * (u1 + 2.0 * u2 + 2.0 * u3 + u4)
    ys[:] = y + (dt / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4)


# dispatch table: public entry points pick the path once at import
if USE_NUMBA:
    ftle_map = ftle_map_numba
    hyptime_map = hyptime_map_numba
    line_rk4_step = line_rk4_step_numba
    advect_final = advect_final_numba
else:  # pragma: no cover - exercised via CURVEDFLOW_NUMBA=0 runs
    ftle_map = ftle_map_numpy
    hyptime_map = hyptime_map_numpy
    line_rk4_step = line_rk4_step_numpy
    advect_final = advect_final_numpy
