"""Pseudo-spectral vorticity solver on the conformally curved torus.

Metric g = exp(alpha sin x sin y) (dx^2 + dy^2).  The Laplace-Beltrami
operator is g^-1 times the flat Laplacian, so the standard trigonometric
expansion applies: all metric multiplications happen in physical space and
products are re-truncated to the truncation wavenumber K afterwards.  The
rapid decay of the metric's Fourier coefficients (see spectral_bounds)
keeps the unpadded product pipeline's aliasing residue far below solver
accuracy for alpha < 2.

Prognostic equation (vorticity q, stream function psi with Delta_flat psi
= g q):

    dq/dt = -(1/g)(psi_x q_y - psi_y q_x) + nu (1/g)(q_xx + q_yy)

advanced by classical RK4.  The g-weighted area mean of q is re-projected
to zero after every step; the viscous enstrophy and energy sinks are
accumulated per stage with RK4 weights so dissipation budgets close.

Grids are (ny, nx) row-major with y outer, matching the field-file layout.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import lagrangian
from .diagnostics import VelocitySampler
from .geometry import ConformalTorusChart
from .interp import spline_coeffs, spline_eval
from ._kernels import line_rk4_step

TWO_PI = 2.0 * np.pi


class BlowUpError(ArithmeticError):
    """Numerical blow-up, with the norms that tripped the guard."""


class ConsistencyError(ValueError):
    """Operation preconditions violated (e.g. nonzero g-weighted mean)."""


class TorusGrid:
    """Wavenumbers, metric grids and transform helpers for one resolution."""

    def __init__(self, nx, kmax, alpha, ny=None):
        ny = nx if ny is None else ny
        if nx < 2 * kmax + 2 or ny < 2 * kmax + 2:
            raise ValueError("grid must satisfy nx, ny >= 2 K + 2")
        self.nx, self.ny, self.kmax, self.alpha = nx, ny, kmax, float(alpha)
        self.chart = ConformalTorusChart(alpha)
        self.x = TWO_PI * np.arange(nx) / nx
        self.y = TWO_PI * np.arange(ny) / ny
        self.X, self.Y = np.meshgrid(self.x, self.y)  # (ny, nx), y outer
        self.g = np.exp(alpha * np.sin(self.X) * np.sin(self.Y))
        self.sqrt_g = np.sqrt(self.g)
        self.rot_a, self.rot_b = self.chart.rotation_coeffs((self.X, self.Y))

        kx = np.arange(nx // 2 + 1, dtype=float)
        ky = np.fft.fftfreq(ny, 1.0 / ny)
        self.ikx = 1j * kx[None, :]
        self.iky = 1j * ky[:, None]
        self.k2 = kx[None, :] ** 2 + ky[:, None] ** 2
        self.inv_k2 = np.zeros_like(self.k2)
        nz = self.k2 > 0
        self.inv_k2[nz] = 1.0 / self.k2[nz]
        self.trunc = (np.abs(kx)[None, :] <= kmax) & (np.abs(ky)[:, None] <= kmax)

    def to_grid(self, f_hat):
        return np.fft.irfft2(f_hat, s=(self.ny, self.nx))

    def to_hat(self, f):
        return np.fft.rfft2(f)

    def dx(self, f_hat):
        return self.to_grid(self.ikx * f_hat)

    def dy(self, f_hat):
        return self.to_grid(self.iky * f_hat)

    def integral(self, f):
        """Integral over [0, 2pi)^2 (exact trapezoid for periodic fields)."""
        return TWO_PI**2 * float(np.mean(f))

    def g_weighted_mean(self, q):
        return float(np.mean(self.g * q) / np.mean(self.g))


@dataclass
class SolverState:
    """Truncated vorticity spectrum plus time and run parameters."""

    grid: TorusGrid
    q_hat: np.ndarray
    t: float
    nu: float
    dt: float
    dissipated_enstrophy: float = 0.0
    dissipated_energy: float = 0.0

    def vorticity_grid(self):
        return self.grid.to_grid(self.q_hat)


@dataclass
class Budget:
    """Energy (1/2)int |u|^2 g, enstrophy (1/2)int q^2 g, and the flat
    palinstrophy-like integrand int |grad q|^2_g g = int (q_x^2 + q_y^2)."""

    energy: float
    enstrophy: float
    grad_q_sq: float


def invert_laplacian(q_hat, grid):
    """Stream function: solves Delta_flat psi = g q, zero-mean psi.

    Raises ConsistencyError if the g-weighted mean of q is not (numerically)
    zero.  psi keeps the full grid spectrum; truncation is applied to the
    prognostic tendency only.
    """
    q = grid.to_grid(q_hat)
    scale = float(np.max(np.abs(q))) + 1e-300
    if abs(grid.g_weighted_mean(q)) > 1e-8 * scale:
        raise ConsistencyError("g-weighted mean of q must vanish before inversion")
    gq_hat = grid.to_hat(grid.g * q)
    psi_hat = -gq_hat * grid.inv_k2
    psi_hat[0, 0] = 0.0
    return psi_hat


def velocity_from_psi(psi_hat, grid):
    """Frame velocity u = -psi_y / sqrt(g), v = psi_x / sqrt(g) on the grid."""
    return -grid.dy(psi_hat) / grid.sqrt_g, grid.dx(psi_hat) / grid.sqrt_g


def coordinate_velocity_from_psi(psi_hat, grid):
    """Coordinate velocity (dx/dt, dy/dt) = (-psi_y / g, psi_x / g)."""
    return -grid.dy(psi_hat) / grid.g, grid.dx(psi_hat) / grid.g


def vorticity_from_velocity(u, v, grid):
    """Curl (1/g)[d_x(sqrt g v) - d_y(sqrt g u)] (round-trip oracle)."""
    term = grid.dx(grid.to_hat(grid.sqrt_g * v)) - grid.dy(grid.to_hat(grid.sqrt_g * u))
    return term / grid.g


def divergence(u, v, grid):
    """(1/g)[d_x(sqrt g u) + d_y(sqrt g v)]."""
    term = grid.dx(grid.to_hat(grid.sqrt_g * u)) + grid.dy(grid.to_hat(grid.sqrt_g * v))
    return term / grid.g


def _rhs(q_hat, grid, nu):
    """Tendency spectrum (truncated to K) plus stage grids for budgets."""
    q = grid.to_grid(q_hat)
    gq_hat = grid.to_hat(grid.g * q)
    psi_hat = -gq_hat * grid.inv_k2
    psi_hat[0, 0] = 0.0
    psi_x = grid.dx(psi_hat)
    psi_y = grid.dy(psi_hat)
    q_x = grid.dx(q_hat)
    q_y = grid.dy(q_hat)
    rhs_grid = -(psi_x * q_y - psi_y * q_x) / grid.g
    if nu != 0.0:
        rhs_grid = rhs_grid + nu * grid.to_grid(-grid.k2 * q_hat) / grid.g
    rhs_hat = grid.to_hat(rhs_grid) * grid.trunc
    return rhs_hat, {"q": q, "q_x": q_x, "q_y": q_y}


def rhs(state):
    """dq/dt spectrum for the current state."""
    return _rhs(state.q_hat, state.grid, state.nu)[0]


def step_rk4(state):
    """One classical RK4 step; re-projects the zero g-weighted mean and
    accumulates the viscous enstrophy / energy sinks with RK4 weights."""
    grid, dt, nu = state.grid, state.dt, state.nu
    q0 = state.q_hat
    diss_z = 0.0
    diss_e = 0.0

    def stage(qh, weight):
        nonlocal diss_z, diss_e
        k, aux = _rhs(qh, grid, nu)
        if nu != 0.0:
            sink = nu * grid.integral(aux["q_x"] ** 2 + aux["q_y"] ** 2)
            z_val = 0.5 * grid.integral(aux["q"] ** 2 * grid.g)
            diss_z += weight * sink
            diss_e += weight * 2.0 * nu * z_val
        return k

    k1 = stage(q0, 1.0 / 6.0)
    k2 = stage(q0 + 0.5 * dt * k1, 2.0 / 6.0)
    k3 = stage(q0 + 0.5 * dt * k2, 2.0 / 6.0)
    k4 = stage(q0 + dt * k3, 1.0 / 6.0)
    q_new = q0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    # zero the g-weighted mean (exact constant-mode adjustment)
    q_grid = grid.to_grid(q_new)
    shift = grid.g_weighted_mean(q_grid)
    q_new[0, 0] -= shift * grid.nx * grid.ny

    if not np.isfinite(q_new[0, 0]) or not np.all(np.isfinite(q_new)):
        raise BlowUpError(f"non-finite vorticity spectrum at t={state.t + dt}")

    return replace(
        state,
        q_hat=q_new,
        t=state.t + dt,
        dissipated_enstrophy=state.dissipated_enstrophy + dt * diss_z,
        dissipated_energy=state.dissipated_energy + dt * diss_e,
    )


def integrate(state, t_end, callback=None, callback_every=1):
    """Step to t_end (within half a step), invoking callback(state) as asked."""
    nsteps = int(round((t_end - state.t) / state.dt))
    for n in range(nsteps):
        state = step_rk4(state)
        if callback is not None and (n + 1) % callback_every == 0:
            callback(state)
    return state


def budget(state):
    """Energy / enstrophy / dissipation-integrand diagnostics by g-weighted
    grid quadrature."""
    grid = state.grid
    q = grid.to_grid(state.q_hat)
    psi_hat = -grid.to_hat(grid.g * q) * grid.inv_k2
    psi_hat[0, 0] = 0.0
    psi_x = grid.dx(psi_hat)
    psi_y = grid.dy(psi_hat)
    q_x = grid.dx(state.q_hat)
    q_y = grid.dy(state.q_hat)
    return Budget(
        energy=0.5 * grid.integral(psi_x**2 + psi_y**2),
        enstrophy=0.5 * grid.integral(q * q * grid.g),
        grad_q_sq=grid.integral(q_x**2 + q_y**2),
    )


def frame_gradient_grids(grid, u, v):
    """Frame covariant velocity gradient on the grid, derivatives spectral."""
    u_hat = grid.to_hat(u)
    v_hat = grid.to_hat(v)
    u_x, u_y = grid.dx(u_hat), grid.dy(u_hat)
    v_x, v_y = grid.dx(v_hat), grid.dy(v_hat)
    sq = grid.sqrt_g
    a, b = grid.rot_a, grid.rot_b
    return (
        u_x / sq - v * a,
        u_y / sq - v * b,
        v_x / sq + u * a,
        v_y / sq + u * b,
    )


def pressure_solve(state):
    """Pressure spectrum from Delta_g p = -div(nabla_u u), zero-mean.

    Valid for evolving fields as well: div(du/dt) = 0, so the divergence of
    the momentum equation closes on the advective term alone.
    """
    grid = state.grid
    psi_hat = invert_laplacian(state.q_hat, grid)
    u, v = velocity_from_psi(psi_hat, grid)
    g11, g12, g21, g22 = frame_gradient_grids(grid, u, v)
    w1 = g11 * u + g12 * v
    w2 = g21 * u + g22 * v
    div_w = divergence(w1, w2, grid)
    p_hat = grid.to_hat(grid.g * div_w) * grid.inv_k2
    p_hat[0, 0] = 0.0
    return p_hat


def scalar_frame_hessian(grid, f_hat):
    """Frame Hessian of a scalar: covariant gradient of its frame gradient."""
    sq = grid.sqrt_g
    f1 = grid.dx(f_hat) / sq
    f2 = grid.dy(f_hat) / sq
    return frame_gradient_grids(grid, f1, f2)


def okubo_weiss_grid(grid, u, v):
    g11, g12, g21, g22 = frame_gradient_grids(grid, u, v)
    s12 = 0.5 * (g12 + g21)
    omega = 0.5 * (g21 - g12)
    s_sq = g11**2 + g22**2 + 2.0 * s12**2
    return 0.5 * (s_sq - 2.0 * omega**2)


def diagnostic_fields(state):
    """Instantaneous fields: q, psi, p, Okubo-Weiss Q, and the strain
    acceleration quadratic form terms for xi = unit normal to u
    (pressure-Hessian term, curvature term, velocity-gradient term, their
    sum, and the sum with the curvature term removed)."""
    grid = state.grid
    q = grid.to_grid(state.q_hat)
    psi_hat = invert_laplacian(state.q_hat, grid)
    u, v = velocity_from_psi(psi_hat, grid)
    g11, g12, g21, g22 = frame_gradient_grids(grid, u, v)
    p_hat = pressure_solve(state)
    h11, h12, h21, h22 = scalar_frame_hessian(grid, p_hat)

    speed_sq = u * u + v * v
    safe = np.where(speed_sq > 1e-28, speed_sq, 1.0)
    xi1, xi2 = -v / np.sqrt(safe), u / np.sqrt(safe)
    dead = speed_sq <= 1e-28

    def form(t11, t12, t21, t22):
        val = t11 * xi1 * xi1 + (t12 + t21) * xi1 * xi2 + t22 * xi2 * xi2
        return np.where(dead, 0.0, val)

    term_hess = -form(h11, h12, h21, h22)
    r1221 = grid.chart.curvature((grid.X, grid.Y))
    term_curv = np.where(dead, 0.0, -r1221 * speed_sq)
    y1 = g11 * xi1 + g12 * xi2
    y2 = g21 * xi1 + g22 * xi2
    term_grad = np.where(dead, 0.0, y1 * y1 + y2 * y2)

    return {
        "vorticity": q,
        "stream_function": grid.to_grid(psi_hat),
        "pressure": grid.to_grid(p_hat),
        "okubo_weiss": okubo_weiss_grid(grid, u, v),
        "m_term_hess": term_hess,
        "m_term_curv": term_curv,
        "m_term_grad": term_grad,
        "m_total": term_hess + term_curv + term_grad,
        "m_total_nocurv": term_hess + term_grad,
        "curvature": r1221,
    }


# ---------------------------------------------------------------------------
# Appendix-style initial data (printed coefficient table, k, l <= 2)

APPENDIX_COEFFS = {
    "a": {
        (0, 0): 0.05983618385516437,
        (0, 1): -0.07844948104163184,
        (0, 2): 0.12523658449465810,
        (1, 0): 0.16532280170939714,
        (1, 1): -0.11693416269523071,
        (1, 2): 0.39389003962238250,
        (2, 0): -0.08428800796409970,
        (2, 1): 0.04229008794099242,
        (2, 2): 0.30077848482043962,
    },
    "b": {
        (0, 1): -0.19049291872705523,
        (0, 2): 0.05827967227392698,
        (1, 1): -0.10944106134331011,
        (1, 2): 0.32536644789854924,
        (2, 1): 0.26029577962448952,
        (2, 2): 0.00188425339698650,
    },
    "c": {
        (1, 0): 0.19681063366118581,
        (1, 1): -0.31923881592497894,
        (1, 2): -0.16743435702548920,
        (2, 0): -0.10316648330130607,
        (2, 1): 0.02821210104193395,
        (2, 2): -0.22662753731338633,
    },
    "d": {
        (1, 1): -0.19180157757767999,
        (1, 2): 0.23382559599065009,
        (2, 1): 0.39408167049915921,
        (2, 2): -0.37903947388947745,
    },
}


def initial_vorticity_table(x, y):
    """Synthesize the printed low-wavenumber vorticity (pre mean adjustment)."""
    q = np.zeros(np.broadcast(x, y).shape)
    for (k, l), val in APPENDIX_COEFFS["a"].items():
        q = q + val * np.cos(k * x) * np.cos(l * y)
    for (k, l), val in APPENDIX_COEFFS["b"].items():
        q = q + val * np.cos(k * x) * np.sin(l * y)
    for (k, l), val in APPENDIX_COEFFS["c"].items():
        q = q + val * np.sin(k * x) * np.cos(l * y)
    for (k, l), val in APPENDIX_COEFFS["d"].items():
        q = q + val * np.sin(k * x) * np.sin(l * y)
    return q


def initial_condition(grid, nu, dt):
    """SolverState from the printed table, g-weighted mean adjusted to zero."""
    q = initial_vorticity_table(grid.X, grid.Y)
    q = q - grid.g_weighted_mean(q)
    q_hat = grid.to_hat(q) * grid.trunc
    return SolverState(grid=grid, q_hat=q_hat, t=0.0, nu=nu, dt=dt)


# ---------------------------------------------------------------------------
# pointwise sampling of solver fields

class TorusGridSampler(VelocitySampler):
    """Bicubic-spline sampler of one solver snapshot.

    Velocity and its frame gradient come from spectrally differentiated
    grids interpolated by periodic cardinal B-splines (O(h^4)); tagged
    unsteady, so steady-only reductions refuse it.
    """

    steady = False
    source = "grid"

    def __init__(self, state):
        grid = state.grid
        self.chart = grid.chart
        psi_hat = invert_laplacian(state.q_hat, grid)
        u, v = velocity_from_psi(psi_hat, grid)
        self._cu = spline_coeffs(u)
        self._cv = spline_coeffs(v)
        self._cg = [spline_coeffs(c) for c in frame_gradient_grids(grid, u, v)]

    def velocity(self, p):
        return spline_eval(self._cu, p[0], p[1]), spline_eval(self._cv, p[0], p[1])

    def velocity_gradient(self, p):
        vals = [spline_eval(c, p[0], p[1]) for c in self._cg]
        return np.array([[vals[0], vals[1]], [vals[2], vals[3]]])


# ---------------------------------------------------------------------------
# material-line co-advection

def advect_material_lines(state, lines, t_end, sample_every=50):
    """Advance the solver and advect material-line nodes simultaneously.

    Node velocities are bicubic splines of the coordinate velocity field,
    blended linearly in time across each solver step (RK4 in space/time for
    the nodes).  Returns the final state and a record dict with sampled
    times, node snapshots per line, and line energies.
    """
    grid = state.grid
    chart = grid.chart

    def vel_coeffs(st):
        psi_hat = invert_laplacian(st.q_hat, grid)
        big_u, big_v = coordinate_velocity_from_psi(psi_hat, grid)
        return spline_coeffs(big_u), spline_coeffs(big_v)

    xs = [np.ascontiguousarray(ln.nodes[:, 0], dtype=float) for ln in lines]
    ys = [np.ascontiguousarray(ln.nodes[:, 1], dtype=float) for ln in lines]
    s0s = [ln.s0 for ln in lines]

    def snapshot(st):
        nodes = [np.stack([x.copy(), y.copy()], axis=1) for x, y in zip(xs, ys)]
        energies = [
            lagrangian.material_line_energy(lagrangian.MaterialLine(nd, s0), chart)
            for nd, s0 in zip(nodes, s0s)
        ]
        return {"t": st.t, "nodes": nodes, "energy": energies}

    records = [snapshot(state)]
    cu_a, cv_a = vel_coeffs(state)
    nsteps = int(round((t_end - state.t) / state.dt))
    for n in range(nsteps):
        state = step_rk4(state)
        cu_b, cv_b = vel_coeffs(state)
        for x, y in zip(xs, ys):
            line_rk4_step(x, y, cu_a, cv_a, cu_b, cv_b, state.dt)
        cu_a, cv_a = cu_b, cv_b
        if (n + 1) % sample_every == 0 or n == nsteps - 1:
            records.append(snapshot(state))
    return state, records
