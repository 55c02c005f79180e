"""Advection, tangent propagation, FTLE, hyperbolicity time, and material
lines."""

import numpy as np
import pytest
from scipy.linalg import expm

from curvedflow import diagnostics as dg
from curvedflow import lagrangian as lg
from curvedflow import sphere_flows as sf
from curvedflow import torus_solver as ts
from curvedflow.geometry import ConformalTorusChart

TWO_PI = 2.0 * np.pi


class ConstantFlatSampler(dg.VelocitySampler):
    steady = True

    def __init__(self, u0=1.0, v0=0.0, alpha=0.0):
        self.u0, self.v0 = u0, v0
        self.chart = ConformalTorusChart(alpha)

    def velocity(self, p):
        return self.u0 + 0.0 * p[0], self.v0 + 0.0 * p[0]

    def coordinate_partials(self, p):
        z = 0.0 * p[0]
        return (z, z), (z, z)


def test_advect_zero_velocity_stays_put():
    s = ConstantFlatSampler(0.0, 0.0)
    traj = lg.advect(s, (1.0, 2.0), 0.0, 1.0, 0.01)
    assert np.max(np.abs(traj.points - np.array([1.0, 2.0]))) == 0.0


def test_advect_jet_zonal_rate():
    """The jet carries particles at the coordinate angular rate
    d lambda/dt = u / sqrt(1 - mu^2) = a / (1 + mu) on the upper branch,
    with mu constant; RK4 must land on the exact closed form."""
    params = sf.JetParams(mu0=0.0, delta_q=2.0)
    s = sf.JetSampler(params)
    z0 = 0.3
    traj = lg.advect(s, (0.0, z0), 0.0, 2.0, 1e-3)
    lam_exact = float(sf.jet_angular_velocity(params, z0)) * 2.0
    assert traj.points[-1, 1] == pytest.approx(z0, abs=1e-12)
    assert traj.points[-1, 0] == pytest.approx(lam_exact, rel=1e-10)


def test_advect_quadrupole_saddle_fixed_point():
    s = sf.QuadrupoleSampler()
    traj = lg.advect(s, (0.0, 0.0), 0.0, 1.0, 1e-2)
    assert np.max(np.abs(traj.points)) < 1e-14


def test_tangent_isometry_preserves_norm():
    s = sf.RigidRotationSampler(1.3)
    traj, xis = lg.advect_with_tangent(s, (0.2, 0.4), (0.6, -0.8), 0.0, 3.0, 1e-3)
    norms = np.hypot(xis[:, 0], xis[:, 1])
    assert np.max(np.abs(norms - 1.0)) < 1e-10


def test_tangent_jet_second_derivative_matches_closed_form():
    params = sf.JetParams(mu0=0.0, delta_q=2.0)
    s = sf.JetSampler(params)
    fd = lg.tangent_norm_second_derivative(s, (0.0, 0.5), (0.0, 1.0), delta=5e-3, dt=5e-4)
    assert fd == pytest.approx(2.0 / 9.0, rel=1e-5)


def test_tangent_matches_flow_map_differencing():
    """xi(t) from the tangent ODE against the difference of two nearby
    trajectories lifted to frame components."""
    s = sf.QuadrupoleSampler()
    h = 1e-6
    for seed in [(1.0, 0.2), (4.0, -0.5)]:
        lam0, mu0 = seed
        r0 = np.sqrt(1 - mu0**2)
        _, xis = lg.advect_with_tangent(s, seed, (1.0, 0.0), 0.0, 1.0, 1e-3)
        tp = lg.advect(s, (lam0 + h / r0, mu0), 0.0, 1.0, 1e-3)
        tm = lg.advect(s, (lam0 - h / r0, mu0), 0.0, 1.0, 1e-3)
        lam_f = 0.5 * (tp.points[-1, 0] + tm.points[-1, 0])
        mu_f = 0.5 * (tp.points[-1, 1] + tm.points[-1, 1])
        r_f = np.sqrt(1 - mu_f**2)
        dlam = tp.points[-1, 0] - tm.points[-1, 0]
        dmu = tp.points[-1, 1] - tm.points[-1, 1]
        xi_fd = np.array([dlam * r_f / (2 * h), dmu / r_f / (2 * h)])
        assert np.max(np.abs(xi_fd - xis[-1])) < 1e-5


def test_propagate_tangent_along_recorded_trajectory():
    s = sf.QuadrupoleSampler()
    traj, xis = lg.advect_with_tangent(s, (0.7, 0.1), (0.0, 1.0), 0.0, 0.5, 1e-3, record_every=100)
    xis2 = lg.propagate_tangent(s, traj, (0.0, 1.0))
    assert np.array_equal(xis, xis2)


def test_ftle_rigid_rotation_vanishes():
    s = sf.RigidRotationSampler(0.8)
    assert abs(lg.ftle(s, (1.0, 0.3), 2.0, 1e-3)) < 1e-8


def test_ftle_saddle_matches_linearization_oracle():
    """At the stagnation point the tangent dynamics is exactly linear; the
    matrix exponential gives the FTLE for any T."""
    s = sf.QuadrupoleSampler()
    grad = np.array(s.velocity_gradient((0.0, 0.0)), dtype=float)
    for big_t in (0.5, 1.0, 2.0):
        m = expm(grad * big_t)
        lam = np.linalg.eigvalsh(m.T @ m)[-1]
        oracle = np.log(lam) / (2 * big_t)
        assert lg.ftle(s, (0.0, 0.0), big_t, 1e-3) == pytest.approx(oracle, abs=1e-10)


def test_ftle_pi_periodicity_small_grid():
    s = sf.QuadrupoleSampler()
    lams = (np.arange(16) + 0.5) * TWO_PI / 16
    mus = np.array([-0.4, 0.1, 0.6])
    f = lg.ftle_map(s, lams, mus, 1.0, 2e-3)
    assert np.max(np.abs(f - np.roll(f, 8, axis=0))) < 1e-6


def test_ftle_tangent_vs_flowmap_methods():
    s = sf.QuadrupoleSampler()
    rng = np.random.default_rng(13)
    for _ in range(5):
        seed = (rng.uniform(0, TWO_PI), rng.uniform(-0.7, 0.7))
        a = lg.ftle(s, seed, 1.0, 1e-3, method="tangent")
        b = lg.ftle(s, seed, 1.0, 1e-3, method="flowmap")
        assert abs(a - b) < 1e-6


def test_hyperbolicity_time_jet_full_interval():
    s = sf.JetSampler(sf.JetParams(mu0=0.0, delta_q=2.0))
    t = lg.hyperbolicity_time(s, (0.5, 0.6), 2.0, 1e-3)
    assert t == pytest.approx(2.0, rel=1e-12)


def test_hyperbolicity_time_elliptic_point_zero():
    s = sf.QuadrupoleSampler()
    assert lg.hyperbolicity_time(s, (np.pi / 2, 0.0), 2.0, 1e-3) == 0.0


def test_hyperbolicity_time_strong_below_plain():
    s = sf.QuadrupoleSampler()
    lams = (np.arange(12) + 0.5) * TWO_PI / 12
    mus = -1 + (np.arange(6) + 0.5) / 3.0
    maps = lg.hyperbolicity_time_maps(s, lams, mus, 1.0, 2e-3)
    assert np.all(maps["strong"] <= maps["plain"])
    assert np.all(maps["plain"] <= maps["plain_nocurv"])
    assert np.all(maps["plain"] >= 0.0) and np.all(maps["plain"] <= 1.0 + 1e-12)


def test_init_material_line_flat():
    s = ConstantFlatSampler(1.0, 0.0)
    line = lg.init_material_line(s, 0.0, 0.0, 0.1, 100)
    assert line.nodes.shape == (101, 2)
    assert np.max(np.abs(line.nodes[:, 0])) < 1e-14
    assert line.nodes[-1, 1] == pytest.approx(0.1, rel=1e-12)
    assert lg.material_line_energy(line, s.chart) == pytest.approx(0.05, rel=1e-12)


def test_init_material_line_normal_and_unit_speed():
    g = ts.TorusGrid(nx=128, kmax=41, alpha=1.8)
    state = ts.initial_condition(g, nu=0.0, dt=1e-3)
    sampler = ts.TorusGridSampler(state)
    line = lg.init_material_line(sampler, 0.30 * TWO_PI, 0.70 * TWO_PI, 0.1, 100)
    # normality by construction: the ODE direction is orthogonal to u
    u, v = sampler.velocity((line.nodes[:, 0], line.nodes[:, 1]))
    h1, h2 = sampler.chart.scale_factors((line.nodes[:, 0], line.nodes[:, 1]))
    dots = (-v / h1) * u * h1 + (u / h2) * v * h2
    assert np.max(np.abs(dots)) <= 1e-8
    # unit speed: total metric length equals s0
    d = np.diff(line.nodes, axis=0)
    mid = ((line.nodes[:-1, 0] + line.nodes[1:, 0]) / 2, (line.nodes[:-1, 1] + line.nodes[1:, 1]) / 2)
    hm, _ = sampler.chart.scale_factors(mid)
    length = np.sum(hm * np.hypot(d[:, 0], d[:, 1]))
    assert length == pytest.approx(0.1, abs=1e-6)


def test_init_material_line_stagnation_error():
    s = ConstantFlatSampler(0.0, 0.0)
    with pytest.raises(lg.StagnationError):
        lg.init_material_line(s, 0.0, 0.0, 0.1, 10)


def test_material_line_energy_metric_scaling():
    class ScaledChart(ConformalTorusChart):
        def __init__(self, factor):
            super().__init__(0.0)
            self.factor = factor

        def conformal_factor(self, p):
            return self.factor + 0.0 * p[0]

        def log_g_grad(self, p):
            return 0.0 * p[0], 0.0 * p[0]

    nodes = np.stack([np.linspace(0, 0.1, 11), np.linspace(0, 0.05, 11)], axis=1)
    line = lg.MaterialLine(nodes=nodes, s0=0.1)
    e1 = lg.material_line_energy(line, ScaledChart(1.0))
    e3 = lg.material_line_energy(line, ScaledChart(3.0))
    assert e3 == pytest.approx(3.0 * e1, rel=1e-14)


def test_material_line_energy_rigid_rotation_constant():
    """Isometric advection preserves the discrete line energy."""
    s = sf.RigidRotationSampler(1.1)
    mu_nodes = np.linspace(0.2, 0.3, 21)
    nodes = np.stack([np.zeros_like(mu_nodes), mu_nodes], axis=1)
    line = lg.MaterialLine(nodes=nodes, s0=0.1)
    e0 = lg.material_line_energy(line, s.chart)
    moved = []
    for lam0, mu0 in nodes:
        traj = lg.advect(s, (lam0, mu0), 0.0, 1.0, 1e-3, record_every=10**9)
        moved.append(traj.points[-1])
    e1 = lg.material_line_energy(lg.MaterialLine(nodes=np.array(moved), s0=0.1), s.chart)
    assert e1 == pytest.approx(e0, rel=1e-8)


def test_quadrupole_trajectories_conserve_psi():
    s = sf.QuadrupoleSampler()
    rng = np.random.default_rng(19)
    for _ in range(4):
        seed = (rng.uniform(0, TWO_PI), rng.uniform(-0.7, 0.7))
        traj = lg.advect(s, seed, 0.0, 2.0, 1e-3, record_every=200)
        psi0 = sf.quadrupole_psi(seed)
        psis = sf.quadrupole_psi((traj.points[:, 0], traj.points[:, 1]))
        assert np.max(np.abs(psis - psi0)) < 1e-6


def test_torus_line_coadvection_exact_in_steady_shear():
    """In the steady flat shear q = -cos x the solver fields are constant in
    time, nodes move as y(t) = y0 - sin(x0) t exactly, and the spline-based
    line stepper must reproduce that to interpolation accuracy."""
    g = ts.TorusGrid(nx=64, kmax=20, alpha=0.0)
    q = -np.cos(g.X)
    state = ts.SolverState(grid=g, q_hat=g.to_hat(q) * g.trunc, t=0.0, nu=0.0, dt=5e-3)
    x_nodes = np.linspace(1.0, 1.4, 21)
    nodes = np.stack([x_nodes, np.full_like(x_nodes, 2.0)], axis=1)
    line = lg.MaterialLine(nodes=nodes, s0=0.4)
    _, recs = ts.advect_material_lines(state, [line], 0.5, sample_every=100)
    got = recs[-1]["nodes"][0]
    exact_y = 2.0 - np.sin(x_nodes) * 0.5
    assert np.max(np.abs(got[:, 0] - x_nodes)) < 1e-12
    # bounded by the O(h^4) bicubic interpolation error at this resolution
    assert np.max(np.abs(got[:, 1] - exact_y)) < 5e-7
