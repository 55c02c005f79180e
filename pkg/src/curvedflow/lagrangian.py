"""Particle advection, tangent propagation, FTLE, hyperbolicity times and
material lines.

Sphere trajectories integrate in the R^3 embedding (the chart pole
singularity never enters); conformal charts integrate in coordinates with
unwrapped copies kept for line geometry.  Tangent vectors are carried in
frame components with the connection transport term, obeying
D xi/dt = nabla_xi u along the path.

Seed-parallel map products (FTLE fields, hyperbolicity-time fields) go
through the compiled kernels for samplers that expose `kernel_spec`; single
trajectories use the generic sampler interface.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import DomainError

TWO_PI = 2.0 * np.pi


class StagnationError(ArithmeticError):
    """Material-line direction undefined at a stagnation point."""


@dataclass
class Trajectory:
    """Time-ordered path samples in chart coordinates plus integrator meta."""

    times: np.ndarray
    points: np.ndarray  # (n, 2), unwrapped coordinates
    dt: float
    scheme: str = "rk4"
    chart_kind: str = ""

    def initial_point(self):
        return tuple(self.points[0])


def _sphere_lift(lam, mu):
    r = np.sqrt(1.0 - mu * mu)
    return np.array([np.cos(lam) * r, np.sin(lam) * r, mu])


def _sphere_coords(x):
    return np.arctan2(x[1], x[0]), x[2]


def _sphere_rhs(sampler, x, xi=None):
    """Velocity in R^3 and (optionally) frame tangent derivatives."""
    rxy = np.hypot(x[0], x[1])
    lam, mu = np.arctan2(x[1], x[0]), x[2]
    u, v = sampler.velocity((lam, mu))
    vel = np.array(
        [
            -u * x[1] / rxy - v * x[2] * x[0] / rxy,
            u * x[0] / rxy - v * x[2] * x[1] / rxy,
            v * rxy,
        ]
    )
    if xi is None:
        return vel
    g = sampler.velocity_gradient((lam, mu))
    a, b = sampler.chart.rotation_coeffs((lam, mu))
    w = u * a + v * b
    dxi = np.array(
        [
            g[0, 0] * xi[0] + (g[0, 1] + w) * xi[1],
            (g[1, 0] - w) * xi[0] + g[1, 1] * xi[1],
        ]
    )
    return vel, dxi


def _planar_rhs(sampler, p, xi=None):
    """Coordinate velocity on conformal charts, plus tangent derivatives."""
    u, v = sampler.velocity(p)
    h1, h2 = sampler.chart.scale_factors(p)
    vel = np.array([u / h1, v / h2])
    if xi is None:
        return vel
    g = sampler.velocity_gradient(p)
    a, b = sampler.chart.rotation_coeffs(p)
    w = u * a + v * b
    dxi = np.array(
        [
            g[0, 0] * xi[0] + (g[0, 1] + w) * xi[1],
            (g[1, 0] - w) * xi[0] + g[1, 1] * xi[1],
        ]
    )
    return vel, dxi


def advect(sampler, x0, t0, t1, dt, record_every=1):
    """RK4 trajectory of the particle seeded at x0, steady or frozen field.

    dt > 0; integration direction follows sign(t1 - t0).  Points are
    recorded every `record_every` steps (plus the endpoint).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    traj, _ = advect_with_tangent(sampler, x0, None, t0, t1, dt, record_every)
    return traj


def advect_with_tangent(sampler, x0, xi0, t0, t1, dt, record_every=1):
    """Coupled particle + frame-tangent integration.

    xi0 is a frame vector (or None to skip tangents).  Returns (Trajectory,
    xi_series) where xi_series rows align with the recorded times.
    """
    chart = sampler.chart
    nsteps = int(round(abs(t1 - t0) / dt))
    sdt = dt if t1 >= t0 else -dt
    on_sphere = chart.kind == "sphere"
    with_xi = xi0 is not None

    times = [t0]
    if on_sphere:
        pos = _sphere_lift(*x0)
        lam_prev = x0[0]
        pts = [np.array([x0[0], x0[1]])]
    else:
        pos = np.array([x0[0], x0[1]], dtype=float)
        pts = [pos.copy()]
    xi = np.array(xi0, dtype=float) if with_xi else None
    xis = [xi.copy()] if with_xi else None

    rhs = _sphere_rhs if on_sphere else _planar_rhs
    for n in range(nsteps):
        if with_xi:
            k1, k1x = rhs(sampler, pos, xi)
            k2, k2x = rhs(sampler, pos + 0.5 * sdt * k1, xi + 0.5 * sdt * k1x)
            k3, k3x = rhs(sampler, pos + 0.5 * sdt * k2, xi + 0.5 * sdt * k2x)
            k4, k4x = rhs(sampler, pos + sdt * k3, xi + sdt * k3x)
            xi = xi + (sdt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        else:
            k1 = rhs(sampler, pos)
            k2 = rhs(sampler, pos + 0.5 * sdt * k1)
            k3 = rhs(sampler, pos + 0.5 * sdt * k2)
            k4 = rhs(sampler, pos + sdt * k3)
        pos = pos + (sdt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if on_sphere:
            pos /= np.linalg.norm(pos)
        elif chart.kind == "disk":
            if pos[0] ** 2 + pos[1] ** 2 >= 1.0:
                raise DomainError("trajectory left the Poincaré disk chart")
        if n % record_every == record_every - 1 or n == nsteps - 1:
            times.append(t0 + (n + 1) * sdt)
            if on_sphere:
                lam, mu = _sphere_coords(pos)
                # unwrap longitude against the previous record
                lam = lam_prev + np.angle(np.exp(1j * (lam - lam_prev)))
                lam_prev = lam
                pts.append(np.array([lam, mu]))
            else:
                pts.append(pos.copy())
            if with_xi:
                xis.append(xi.copy())

    traj = Trajectory(
        times=np.array(times),
        points=np.array(pts),
        dt=dt,
        chart_kind=chart.kind,
    )
    return traj, (np.array(xis) if with_xi else None)


def propagate_tangent(sampler, traj, xi0):
    """Frame-tangent series along a recorded trajectory.

    Re-integrates the coupled system from the trajectory's initial point
    with its own dt (bitwise the same path), returning xi at the recorded
    times.
    """
    stride = int(round(abs(traj.times[1] - traj.times[0]) / traj.dt)) if len(traj.times) > 1 else 1
    _, xis = advect_with_tangent(
        sampler, traj.initial_point(), xi0, traj.times[0], traj.times[-1], traj.dt, stride
    )
    return xis


def tangent_norm_second_derivative(sampler, x0, xi0, delta=1e-2, dt=1e-3):
    """Central second difference of |xi(t)|^2 at t = 0 along the trajectory.

    Independent dynamic check of 2 <M xi, xi>: integrates the tangent ODE
    forward and backward over +/- delta.
    """
    _, xi_f = advect_with_tangent(sampler, x0, xi0, 0.0, delta, dt)
    _, xi_b = advect_with_tangent(sampler, x0, xi0, 0.0, -delta, dt)
    n0 = float(np.dot(xi0, xi0))
    nf = float(np.dot(xi_f[-1], xi_f[-1]))
    nb = float(np.dot(xi_b[-1], xi_b[-1]))
    return (nf - 2.0 * n0 + nb) / delta**2


# ---------------------------------------------------------------------------
# FTLE

def ftle_map(sampler, lams, mus, big_t, dt):
    """FTLE field over the seed grid (lams x mus), shape (len(lams), len(mus)).

    Cauchy-Green definition: two initially orthonormal frame tangents,
    Gram matrix at time T, FTLE = ln(lambda_max)/(2T).
    """
    spec = getattr(sampler, "kernel_spec", None)
    if spec is None:
        raise ValueError("ftle_map needs a sampler with a compiled kernel_spec")
    big_l, big_m = np.meshgrid(lams, mus, indexing="ij")
    flow, p0, p1 = spec
    vals = _kernels.ftle_map(
        flow, float(p0), float(p1), big_l.ravel(), big_m.ravel(), float(big_t), float(dt)
    )
    return vals.reshape(big_l.shape)


def ftle_flowmap_batch(sampler, lam_seeds, mu_seeds, big_t, dt, h=1e-6):
    """Flow-map-differencing FTLE for many seeds at once (sphere samplers).

    Four frame-displaced auxiliaries per seed are advected in one batch;
    the Cauchy-Green matrix is assembled from final-point frame
    displacements.
    """
    spec = getattr(sampler, "kernel_spec", None)
    if spec is None or sampler.chart.kind != "sphere":
        raise ValueError("batched flow-map FTLE needs a sphere sampler with kernel_spec")
    lam0 = np.asarray(lam_seeds, dtype=float)
    mu0 = np.asarray(mu_seeds, dtype=float)
    r0 = np.sqrt(1.0 - mu0 * mu0)
    lams = np.concatenate([lam0 + h / r0, lam0 - h / r0, lam0, lam0])
    mus = np.concatenate([mu0, mu0, mu0 + h * r0, mu0 - h * r0])
    flow, p0, p1 = spec
    lam_f, mu_f = _kernels.advect_final(
        flow, float(p0), float(p1), lams, mus, float(big_t), float(dt)
    )
    n = lam0.size
    lam_f = lam_f.reshape(4, n)
    mu_f = mu_f.reshape(4, n)
    r_f = np.sqrt(1.0 - mu_f * mu_f)
    d11 = np.angle(np.exp(1j * (lam_f[0] - lam_f[1]))) * 0.5 * (r_f[0] + r_f[1]) / (2 * h)
    d21 = (mu_f[0] - mu_f[1]) / (0.5 * (r_f[0] + r_f[1])) / (2 * h)
    d12 = np.angle(np.exp(1j * (lam_f[2] - lam_f[3]))) * 0.5 * (r_f[2] + r_f[3]) / (2 * h)
    d22 = (mu_f[2] - mu_f[3]) / (0.5 * (r_f[2] + r_f[3])) / (2 * h)
    gaa = d11 * d11 + d21 * d21
    gbb = d12 * d12 + d22 * d22
    gab = d11 * d12 + d21 * d22
    tr = gaa + gbb
    det = gaa * gbb - gab * gab
    lmax = 0.5 * (tr + np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0)))
    return np.log(lmax) / (2.0 * big_t)


def ftle(sampler, x0, big_t, dt, method="tangent", h=1e-6):
    """Pointwise FTLE by tangent propagation or flow-map differencing."""
    if method == "tangent":
        return float(ftle_map(sampler, np.array([x0[0]]), np.array([x0[1]]), big_t, dt)[0, 0])
    if method != "flowmap":
        raise ValueError("method must be 'tangent' or 'flowmap'")
    if sampler.chart.kind != "sphere":
        raise NotImplementedError("flow-map FTLE differencing is implemented on the sphere")
    lam0, mu0 = x0
    r0 = np.sqrt(1.0 - mu0 * mu0)
    seeds = [
        (lam0 + h / r0, mu0),
        (lam0 - h / r0, mu0),
        (lam0, mu0 + h * r0),
        (lam0, mu0 - h * r0),
    ]
    finals = []
    for s in seeds:
        traj = advect(sampler, s, 0.0, big_t, dt, record_every=10**9)
        finals.append(traj.points[-1])
    finals = np.array(finals)
    r_f = np.sqrt(1.0 - finals[:, 1] ** 2)
    d = np.empty((2, 2))
    for col, (ia, ib) in enumerate(((0, 1), (2, 3))):
        dlam = np.angle(np.exp(1j * (finals[ia, 0] - finals[ib, 0])))
        rbar = 0.5 * (r_f[ia] + r_f[ib])
        d[0, col] = dlam * rbar / (2.0 * h)
        d[1, col] = (finals[ia, 1] - finals[ib, 1]) / rbar / (2.0 * h)
    gram = d.T @ d
    lmax = np.linalg.eigvalsh(gram)[-1]
    return float(np.log(lmax) / (2.0 * big_t))


# ---------------------------------------------------------------------------
# hyperbolicity time

def hyperbolicity_time_maps(sampler, lams, mus, big_t, dt, threshold=0.0):
    """All four hyperbolicity-time fields over the seed grid in one pass.

    Returns a dict with keys 'plain', 'plain_nocurv', 'strong',
    'strong_nocurv'; sharing the trajectory makes strong <= plain and
    with-curvature <= without-curvature exact pointwise.  The indicator is
    sampled at every RK4 step midpoint.
    """
    spec = getattr(sampler, "kernel_spec", None)
    if spec is None:
        raise ValueError("hyperbolicity-time maps need a sampler with a kernel_spec")
    if not sampler.steady:
        raise ValueError("hyperbolicity time assumes a steady classification field")
    big_l, big_m = np.meshgrid(lams, mus, indexing="ij")
    flow, p0, p1 = spec
    cols = _kernels.hyptime_map(
        flow,
        float(p0),
        float(p1),
        big_l.ravel(),
        big_m.ravel(),
        float(big_t),
        float(dt),
        float(threshold),
    )
    shape = big_l.shape
    return {
        "plain": cols[:, 0].reshape(shape),
        "plain_nocurv": cols[:, 1].reshape(shape),
        "strong": cols[:, 2].reshape(shape),
        "strong_nocurv": cols[:, 3].reshape(shape),
    }


def hyperbolicity_time(sampler, x0, big_t, dt, strong=False, with_curvature=True, threshold=0.0):
    """Time spent in the (strong) hyperbolic domain along one trajectory."""
    maps = hyperbolicity_time_maps(
        sampler, np.array([x0[0]]), np.array([x0[1]]), big_t, dt, threshold
    )
    if strong:
        key = "strong" if with_curvature else "strong_nocurv"
    else:
        key = "plain" if with_curvature else "plain_nocurv"
    return float(maps[key][0, 0])


# ---------------------------------------------------------------------------
# material lines

@dataclass
class MaterialLine:
    """Ordered node positions (unwrapped coordinates) with parameter length."""

    nodes: np.ndarray  # (I+1, 2)
    s0: float

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ValueError("a material line needs at least two nodes")

    @property
    def ds(self):
        return self.s0 / (len(self.nodes) - 1)


def init_material_line(sampler, x0, y0, s0, n_segments=100, min_speed=1e-12):
    """Seed a unit-speed line normal to the velocity field.

    Integrates dx/ds = -(1/sqrt g) v/|u|, dy/ds = (1/sqrt g) u/|u| by RK4
    from (x0, y0) over s in [0, s0] with n_segments steps (n_segments + 1
    nodes).
    """
    chart = sampler.chart

    def rhs(p):
        u, v = sampler.velocity(p)
        speed = np.hypot(u, v)
        if speed < min_speed:
            raise StagnationError(f"velocity magnitude {speed} too small at {p}")
        h1, h2 = chart.scale_factors(p)
        return np.array([-v / h1, u / h2]) / speed

    ds = s0 / n_segments
    p = np.array([x0, y0], dtype=float)
    nodes = [p.copy()]
    for _ in range(n_segments):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * ds * k1)
        k3 = rhs(p + 0.5 * ds * k2)
        k4 = rhs(p + ds * k3)
        p = p + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        nodes.append(p.copy())
    return MaterialLine(nodes=np.array(nodes), s0=s0)


def material_line_energy(line, chart):
    """Discrete Dirichlet energy (1/2) sum g_i |delta node|^2 / ds.

    Uses unwrapped coordinate differences and the diagonal metric at the
    segment's left node; proportional to the summed squared segment lengths
    at fixed parameter spacing.
    """
    d = np.diff(line.nodes, axis=0)
    left = (line.nodes[:-1, 0], line.nodes[:-1, 1])
    h1, h2 = chart.scale_factors(left)
    return float(0.5 * np.sum(h1 * h1 * d[:, 0] ** 2 + h2 * h2 * d[:, 1] ** 2) / line.ds)
