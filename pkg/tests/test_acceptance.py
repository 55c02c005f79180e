"""Acceptance criteria A1-A11, one PASS/FAIL line per criterion clause.

Run with `pytest tests/test_acceptance.py -s` to see the report lines as
they print.  Two clauses are implemented exactly as specified and fail by
honest measurement; the analysis lives in the project notes:

  * A3's saddle-to-median factor: the saddle FTLE exceeds the 360x180 grid
    median by ~1.52x at T = 2 (verified against an independent flow-map
    oracle), not the required 2x.
  * A9's printed term-ratio inequality: |b_{j+1}|/|b_j| <= alpha^2/(8(L+3))
    is violated by the early series terms for every (k, l) with L >= 2
    (e.g. k = l = 2, j = 0: ratio 0.27 vs bound 0.081); only the decay
    bound itself holds.
"""

import time

import numpy as np
import pytest

from curvedflow import diagnostics as dg
from curvedflow import experiments as ex
from curvedflow import lagrangian as lg
from curvedflow import pdisk
from curvedflow import spectral_bounds as sb
from curvedflow import sphere_flows as sf
from curvedflow import torus_solver as ts
from curvedflow.geometry import ConformalTorusChart, PoincareDiskChart, SphereChart

TWO_PI = 2.0 * np.pi


def check(tag, ok, detail=""):
    print(f"[{tag}] {'PASS' if ok else 'FAIL'} {detail}", flush=True)
    return bool(ok)


# ---------------------------------------------------------------------------
# A1: jet consistency

def test_a1_jet_consistency():
    t0 = time.time()
    rows = ex.jet_consistency_rows(
        delta_q=2.0, mu0s=(-0.5, 0.0, 0.5), z0s=(-0.5, 0.0, 0.3, 0.8)
    )
    elapsed = time.time() - t0
    worst_tensor = max(r["rel_err"] for r in rows)
    worst_line = max(r["rel_err_line"] for r in rows)
    ok = check(
        "A1",
        worst_tensor < 1e-6 and worst_line < 1e-6 and elapsed < 5.0,
        f"tensor rel {worst_tensor:.2e}, line-FD rel {worst_line:.2e}, {elapsed:.2f} s",
    )
    assert ok


# ---------------------------------------------------------------------------
# A2: sphere hyperbolic-domain inclusion

def test_a2_domain_inclusion():
    lams = (np.arange(720) + 0.5) * TWO_PI / 720
    mus = -1.0 + (np.arange(360) + 0.5) / 180.0
    big_l, big_m = np.meshgrid(lams, mus, indexing="ij")
    field = dg.classify_field(sf.QuadrupoleSampler(), big_l, big_m)
    with_mask = field.mask_hyperbolic(True)
    without_mask = field.mask_hyperbolic(False)
    violations = int(np.count_nonzero(with_mask & ~without_mask))
    difference = int(np.count_nonzero(without_mask & ~with_mask))
    ok = check(
        "A2",
        violations == 0 and difference > 0,
        f"violations {violations}, difference set {difference} of {with_mask.size}",
    )
    assert ok


# ---------------------------------------------------------------------------
# A3: FTLE structure

@pytest.fixture(scope="module")
def ftle_field():
    lams = (np.arange(360) + 0.5) * TWO_PI / 360
    mus = -1.0 + (np.arange(180) + 0.5) / 90.0
    sampler = sf.QuadrupoleSampler()
    t0 = time.time()
    field = lg.ftle_map(sampler, lams, mus, 2.0, 1e-3)
    return field, time.time() - t0


def test_a3_periodicity_and_runtime(ftle_field):
    field, elapsed = ftle_field
    period_err = float(np.max(np.abs(field - np.roll(field, 180, axis=0))))
    ok = check(
        "A3-periodicity",
        period_err < 1e-6 and elapsed < 600.0,
        f"pi-shift residual {period_err:.2e}, map runtime {elapsed:.1f} s",
    )
    assert ok


def test_a3_saddle_versus_median(ftle_field):
    field, _ = ftle_field
    sampler = sf.QuadrupoleSampler()
    saddles = [lg.ftle(sampler, (0.0, 0.0), 2.0, 1e-3), lg.ftle(sampler, (np.pi, 0.0), 2.0, 1e-3)]
    median = float(np.median(field))
    factor = min(saddles) / median
    ok = check(
        "A3-saddle-median",
        factor >= 2.0,
        f"saddle FTLE {min(saddles):.4f}, grid median {median:.4f}, factor {factor:.3f} "
        "(criterion unattainable for the Cauchy-Green FTLE at T=2; see notes)",
    )
    assert ok


def test_a3_tangent_vs_flowmap(ftle_field):
    sampler = sf.QuadrupoleSampler()
    rng = np.random.default_rng(101)
    lams = rng.uniform(0.0, TWO_PI, 100)
    mus = rng.uniform(-0.9, 0.9, 100)
    tangent = lg.ftle_map(sampler, lams, mus, 2.0, 1e-3)
    tangent = np.array([tangent[i, i] for i in range(100)])
    flowmap = lg.ftle_flowmap_batch(sampler, lams, mus, 2.0, 1e-3)
    worst = float(np.max(np.abs(tangent - flowmap)))
    ok = check("A3-oracle", worst < 1e-4, f"max |tangent - flowmap| = {worst:.2e} at 100 seeds")
    assert ok


# ---------------------------------------------------------------------------
# A4: hyperbolicity times

@pytest.fixture(scope="module")
def hyptime_fields():
    lams = (np.arange(240) + 0.5) * TWO_PI / 240
    mus = -1.0 + (np.arange(120) + 0.5) / 60.0
    sampler = sf.QuadrupoleSampler()
    maps = lg.hyperbolicity_time_maps(sampler, lams, mus, 2.0, 1e-3)
    big_l, big_m = np.meshgrid(lams, mus, indexing="ij")
    maps["psi"] = sf.quadrupole_psi((big_l, big_m))
    return maps


def test_a4_pointwise_orderings(hyptime_fields):
    maps = hyptime_fields
    strong_ok = bool(np.all(maps["strong"] <= maps["plain"]))
    curv_ok = bool(np.all(maps["plain_nocurv"] >= maps["plain"]))
    ok = check(
        "A4-orderings",
        strong_ok and curv_ok,
        f"strong<=plain exact: {strong_ok}, without>=with exact: {curv_ok}",
    )
    assert ok


def test_a4_annular_maximum_absent_in_strong(hyptime_fields):
    """Locate the annular local maximum of the plain map along the orbits
    around the negative vortices (hyperbolicity time is an orbit function,
    so profile it over stream-function levels) and require the strong map
    not to reproduce it."""
    maps = hyptime_fields
    psi = maps["psi"]
    psi_saddle = float(sf.quadrupole_psi((0.0, 0.0)))
    psi_center = float(sf.quadrupole_psi((np.pi / 2, 0.0)))
    nb = 40
    bins = np.linspace(psi_saddle, psi_center, nb + 1)
    centers = 0.5 * (bins[:-1] + bins[1:])
    profile = np.full(nb, np.nan)
    for i in range(nb):
        sel = (psi >= bins[i]) & (psi < bins[i + 1])
        if np.count_nonzero(sel) > 5:
            profile[i] = maps["plain"][sel].mean()
    lo, hi = int(0.2 * nb), int(0.85 * nb)
    i_star = lo + int(np.nanargmax(profile[lo:hi]))
    is_local_max = profile[i_star] > np.nanmin(profile[lo : i_star + 1]) and (
        i_star + 1 >= hi or profile[i_star] > profile[i_star + 1]
    )
    band = np.abs(psi - centers[i_star]) < (bins[1] - bins[0])
    plain_max = float(maps["plain"][band].max())
    strong_max = float(maps["strong"][band].max())
    ratio = strong_max / plain_max
    ok = check(
        "A4-annulus",
        is_local_max and ratio < 0.8,
        f"annulus at psi={centers[i_star]:.3f}: plain max {plain_max:.3f}, "
        f"strong max {strong_max:.3f}, ratio {ratio:.3f}",
    )
    assert ok


# ---------------------------------------------------------------------------
# A5: inviscid conservation

def test_a5_torus_conservation():
    t0 = time.time()
    grid = ts.TorusGrid(nx=128, kmax=41, alpha=1.8)
    state = ts.initial_condition(grid, nu=0.0, dt=1e-3)
    b0 = ts.budget(state)
    drift_e = drift_z = 0.0
    worst_mean = abs(np.mean(grid.g * state.vorticity_grid()))

    for _ in range(20):
        state = ts.integrate(state, state.t + 0.05)
        b = ts.budget(state)
        drift_e = max(drift_e, abs(b.energy / b0.energy - 1.0))
        drift_z = max(drift_z, abs(b.enstrophy / b0.enstrophy - 1.0))
        worst_mean = max(worst_mean, abs(np.mean(grid.g * state.vorticity_grid())))
    elapsed = time.time() - t0
    ok = check(
        "A5",
        drift_e < 1e-8 and drift_z < 1e-8 and worst_mean < 1e-12 and elapsed < 120.0,
        f"|dE/E| {drift_e:.2e}, |dZ/Z| {drift_z:.2e}, g-mean {worst_mean:.2e}, {elapsed:.0f} s",
    )
    assert ok


# ---------------------------------------------------------------------------
# A6: dissipation budget

@pytest.fixture(scope="module")
def torus_viscous_run():
    grid = ts.TorusGrid(nx=256, kmax=85, alpha=1.8)
    state = ts.initial_condition(grid, nu=1e-6, dt=1e-3)
    b0 = ts.budget(state)
    t0 = time.time()
    state = ts.integrate(state, 5.0)
    return state, b0, time.time() - t0


def test_a6_dissipation_budget(torus_viscous_run):
    state, b0, elapsed = torus_viscous_run
    b1 = ts.budget(state)
    z_drop = b0.enstrophy - b1.enstrophy
    sink = state.dissipated_enstrophy
    budget_rel = abs(z_drop - sink) / abs(sink)
    loss_e = (b0.energy - b1.energy) / b0.energy
    loss_z = z_drop / b0.enstrophy
    ok = check(
        "A6",
        budget_rel < 1e-2 and 0.0 < loss_e < 1e-3 and 0.0 < loss_z < 1e-3 and elapsed < 1800.0,
        f"sink closure {budget_rel:.2e}, energy loss {loss_e:.3e}, "
        f"enstrophy loss {loss_z:.3e}, {elapsed:.0f} s",
    )
    assert ok


# ---------------------------------------------------------------------------
# A7: material lines

def test_a7_material_lines():
    grid = ts.TorusGrid(nx=256, kmax=85, alpha=1.8)
    state = ts.initial_condition(grid, nu=1e-6, dt=1e-3)
    sampler = ts.TorusGridSampler(state)
    lines = [
        lg.init_material_line(sampler, x0, 0.70 * TWO_PI, 0.1, 100)
        for x0 in (0.25 * TWO_PI, 0.30 * TWO_PI, 0.35 * TWO_PI)
    ]
    _, records = ts.advect_material_lines(state, lines, 2.0, sample_every=50)
    times = np.array([r["t"] for r in records])
    energies = np.array([r["energy"] for r in records])  # (nt, 3)
    norm = energies / energies[0]
    upto1 = times <= 1.0 + 1e-9
    increasing = bool(np.all(np.diff(norm[upto1], axis=0) > 0.0))
    final = norm[-1]
    leader = int(np.argmax(final))
    ok = check(
        "A7",
        increasing and leader == 0,
        f"E/E0 increasing on [0,1]: {increasing}; final normalized energies "
        f"{final.round(3).tolist()} (x0=0.25 leads: {leader == 0})",
    )
    assert ok


# ---------------------------------------------------------------------------
# A8: curvature-term identities

def test_a8_curvature_identities():
    rng = np.random.default_rng(808)
    n = 10_000
    charts = [SphereChart(), ConformalTorusChart(1.8), PoincareDiskChart()]
    worst_quad = worst_orient = 0.0
    sphere_sign_ok = torus_sign_ok = True
    for chart in charts:
        if chart.kind == "sphere":
            pts = (rng.uniform(0, TWO_PI, n), rng.uniform(-0.99, 0.99, n))
        elif chart.kind == "torus":
            pts = (rng.uniform(0, TWO_PI, n), rng.uniform(0, TWO_PI, n))
        else:
            r = np.sqrt(rng.uniform(0, 0.9, n))
            th = rng.uniform(0, TWO_PI, n)
            pts = (r * np.cos(th), r * np.sin(th))
        u = (rng.normal(size=n), rng.normal(size=n))
        xi = (rng.normal(size=n), rng.normal(size=n))
        c = dg.curvature_term(chart, pts, u)
        r1221 = chart.curvature(pts)
        form = dg._quadratic_form(c, xi)
        expected = r1221 * (xi[0] * u[1] - xi[1] * u[0]) ** 2
        scale = np.abs(expected) + 1.0
        worst_quad = max(worst_quad, float(np.max(np.abs(form - expected) / scale)))
        # orientation: xi unit-normal to u gives R1221 |u|^2
        speed = np.hypot(u[0], u[1])
        xi_n = (-u[1] / speed, u[0] / speed)
        form_n = dg._quadratic_form(c, xi_n)
        worst_orient = max(
            worst_orient,
            float(np.max(np.abs(form_n - r1221 * speed**2) / (speed**2 + 1.0))),
        )
        m_contribution = -form  # the term enters M as -R(.,u)u
        if chart.kind == "sphere":
            sphere_sign_ok &= bool(np.all(m_contribution <= 0.0))
        if chart.kind == "torus":
            neg = r1221 < 0.0
            torus_sign_ok &= bool(np.all(m_contribution[neg] >= 0.0))
    ok = check(
        "A8",
        worst_quad < 1e-12 and worst_orient < 1e-12 and sphere_sign_ok and torus_sign_ok,
        f"quadratic-form residual {worst_quad:.2e}, orientation {worst_orient:.2e}, "
        f"sphere<=0 {sphere_sign_ok}, torus>=0 on R<0 {torus_sign_ok}",
    )
    assert ok


# ---------------------------------------------------------------------------
# A9: Appendix-B machinery

def test_a9_series_fft_and_parity():
    series = sb.coeffs_by_series(1.8, 40)
    fft = sb.coeffs_by_fft(1.8, 40)
    diff = float(np.max(np.abs(series.a - fft.a)))
    forbidden = series.parity_forbidden_mask()
    series_zeros = int(np.count_nonzero(series.a[forbidden]))
    fft_parity = float(np.max(np.abs(fft.a[forbidden])))
    ok = check(
        "A9-tables",
        diff < 1e-12 and series_zeros == 0 and fft_parity < 1e-14,
        f"series-fft {diff:.2e}, series parity zeros exact: {series_zeros == 0}, "
        f"fft parity max {fft_parity:.2e}",
    )
    assert ok


def test_a9_decay_bound():
    tab = sb.coeffs_by_series(1.8, 60)
    report = sb.verify_bound(tab, (10, 60))
    ok = check(
        "A9-bound",
        report.holds and report.c_observed <= 4.0,
        f"C_observed {report.c_observed:.4f} (<= 4), holds over L in [10, 60]: {report.holds}",
    )
    assert ok


def test_a9_ratio_inequality_term_by_term():
    rows = sb.ratio_inequality_report(1.8, 12, l_min=2, j_count=8)
    holds = all(r["holds"] for r in rows)
    worst = max(rows, key=lambda r: r["ratio"] / r["printed_bound"])
    ok = check(
        "A9-ratio",
        holds,
        f"printed |b_j+1|/|b_j| <= a^2/(8(L+3)) violated, e.g. (k,l,j)="
        f"({worst['k']},{worst['l']},{worst['j']}): ratio {worst['ratio']:.3f} vs "
        f"bound {worst['printed_bound']:.3f} (paper inequality false term-by-term; see notes)",
    )
    assert ok


# ---------------------------------------------------------------------------
# A10: Poincaré disk

def test_a10_disk():
    report = pdisk.disk_flow_checks(n=200, r_max=0.98)
    residuals_ok = (
        report["max_cauchy_riemann"] < 1e-8
        and report["max_divergence"] < 1e-8
        and report["max_vorticity"] < 1e-8
    )
    s = pdisk.DiskJetSampler()
    grad0 = np.max(np.abs(s.velocity_gradient((0.0, 0.0))))
    hess = dg.pressure_hessian_steady(s, (0.0, 0.0))
    evals = np.linalg.eigvalsh(np.array(hess, dtype=float))
    origin_ok = grad0 < 1e-10 and evals[0] >= -1e-10

    rng = np.random.default_rng(1010)
    h = 1e-6
    worst_rt = 0.0
    for _ in range(200):
        r = np.sqrt(rng.uniform(0, 0.9))
        th = rng.uniform(0, TWO_PI)
        x, y = r * np.cos(th), r * np.sin(th)
        inv_sq = 0.5 * (1 - x * x - y * y)
        psi_x = (pdisk.disk_stream_function((x + h, y)) - pdisk.disk_stream_function((x - h, y))) / (2 * h)
        psi_y = (pdisk.disk_stream_function((x, y + h)) - pdisk.disk_stream_function((x, y - h))) / (2 * h)
        u, v = pdisk.disk_velocity((x, y))
        worst_rt = max(worst_rt, abs(-inv_sq * psi_y - u), abs(inv_sq * psi_x - v))
    ok = check(
        "A10",
        residuals_ok and origin_ok and worst_rt < 1e-8,
        f"CR {report['max_cauchy_riemann']:.2e}, div {report['max_divergence']:.2e}, "
        f"vort {report['max_vorticity']:.2e}, |grad u(0)| {grad0:.1e}, "
        f"H eigs {evals.round(12).tolist()}, psi round-trip {worst_rt:.2e}",
    )
    assert ok


# ---------------------------------------------------------------------------
# A11: tangent-equation oracle

def test_a11_tangent_oracle():
    rng = np.random.default_rng(1111)
    samplers = [
        sf.JetSampler(sf.JetParams(mu0=0.1, delta_q=2.0)),
        sf.QuadrupoleSampler(),
        pdisk.DiskJetSampler(),
    ]
    worst = 0.0
    cases = 0
    while cases < 200:
        s = samplers[cases % 3]
        if s.chart.kind == "disk":
            r = np.sqrt(rng.uniform(0, 0.6))
            th = rng.uniform(0, TWO_PI)
            p = (r * np.cos(th), r * np.sin(th))
        else:
            p = (rng.uniform(0, TWO_PI), rng.uniform(-0.85, 0.85))
            if isinstance(s, sf.JetSampler) and abs(p[1] - s.params.mu0) < 0.05:
                continue
        xi = rng.normal(size=2)
        xi /= np.hypot(*xi)
        m = dg.strain_acceleration(s.chart, p, s)
        form = 2.0 * float(xi @ np.array(m, dtype=float) @ xi)
        m_scale = float(np.max(np.abs(m)))
        if abs(form) < 0.05 * m_scale:  # conditioning guard for relative error
            continue
        fd = lg.tangent_norm_second_derivative(s, p, xi, delta=1e-3, dt=1e-4)
        worst = max(worst, abs(fd - form) / abs(form))
        cases += 1
    ok = check("A11", worst < 1e-4, f"worst relative mismatch {worst:.2e} over 200 cases")
    assert ok
