"""Named experiments reproducing the worked examples at desk scale.

Each experiment takes a resolved config dict, writes FieldFile / SeriesFile
outputs plus a manifest under its output directory, and returns the list of
file records.  Everything is deterministic: the torus initial field is the
hardcoded coefficient table, and no experiment draws random numbers.
"""


import numpy as np

from . import diagnostics, fields_io, lagrangian, pdisk, spectral_bounds, sphere_flows, torus_solver
from .geometry import PoincareDiskChart, SphereChart

TWO_PI = 2.0 * np.pi


def sphere_grid(n_lam, n_mu):
    """Cell-centered (lambda, mu) axes covering the sphere."""
    lams = (np.arange(n_lam) + 0.5) * TWO_PI / n_lam
    mus = -1.0 + (np.arange(n_mu) + 0.5) * 2.0 / n_mu
    return lams, mus


# ---------------------------------------------------------------------------
# jet-verify

def jet_consistency_rows(delta_q=2.0, mu0s=(-0.5, 0.0, 0.5), z0s=(-0.5, 0.0, 0.3, 0.8),
                         delta_mu=1e-4, fd_h=0.5):
    """Dual-route check of the strain-acceleration quadratic form.

    For each (mu0, z0): the closed form, the tensor-pipeline value
    <M xi, xi> for the unit frame vector xi = (0, 1), and one half of the
    second time derivative of l(t)^2 from the line-length quadrature,
    normalized by l(0)^2 (unit initial tangent).  l(t)^2 is quadratic in t
    up to O(delta_mu^2), so the central second difference at t = 0 uses the
    evenness of l in t.  The probe segment is centered on z0 (kills the
    O(delta_mu) midpoint offset); if z0 sits on the jet axis the segment
    must stay one-sided, so a much shorter upper-branch segment is used.
    """
    rows = []
    for mu0 in mu0s:
        params = sphere_flows.JetParams(mu0=mu0, delta_q=delta_q)
        sampler = sphere_flows.JetSampler(params)
        for z0 in z0s:
            closed = float(sphere_flows.jet_m_quadratic(params, z0))
            m = diagnostics.strain_acceleration(sampler.chart, (0.0, z0), sampler)
            tensor = float(m[1, 1])
            if abs(z0 - mu0) > delta_mu:
                spec = sphere_flows.JetLineSpec(z0=z0 - 0.5 * delta_mu, delta_mu=delta_mu)
            else:
                spec = sphere_flows.JetLineSpec(z0=z0, delta_mu=1e-3 * delta_mu)
            l0 = sphere_flows.jet_line_length(params, spec, 0.0)
            lh = sphere_flows.jet_line_length(params, spec, fd_h)
            # l(t) is even in t: d^2(l^2)/dt^2 |_0 = 2 (l(h)^2 - l(0)^2)/h^2
            line_fd = (lh**2 - l0**2) / fd_h**2 / l0**2
            rows.append(
                {
                    "mu0": mu0,
                    "z0": z0,
                    "closed_form": closed,
                    "tensor_value": tensor,
                    "rel_err": abs(tensor - closed) / abs(closed),
                    "line_fd": line_fd,
                    "rel_err_line": abs(line_fd - closed) / abs(closed),
                }
            )
    return rows


def run_jet_verify(cfg, outdir):
    rows = jet_consistency_rows(
        delta_q=cfg["delta_q"],
        delta_mu=cfg["delta_mu"],
        fd_h=cfg["fd_h"],
    )
    cols = {k: [r[k] for r in rows] for k in rows[0]}
    path = fields_io.write_series(f"{outdir}/jet_consistency.csv", cols)
    return [{"path": path, "kind": "series", "name": "jet_consistency"}]


# ---------------------------------------------------------------------------
# sphere hyperbolic domain (quadrupole)

def run_sphere_hypb(cfg, outdir):
    lams, mus = sphere_grid(cfg["n_lam"], cfg["n_mu"])
    big_l, big_m = np.meshgrid(lams, mus, indexing="ij")
    sampler = sphere_flows.QuadrupoleSampler()
    q = sphere_flows.quadrupole_vorticity((big_l, big_m))
    field = diagnostics.classify_field(sampler, big_l, big_m, threshold=cfg["threshold"])
    files = []
    # FieldFile payloads are (ny, nx): transpose the (lam, mu)-indexed arrays
    for name, vals in (
        ("sphere_q", q),
        ("hyperbolic_with", field.mask_hyperbolic(True).astype(float)),
        ("hyperbolic_without", field.mask_hyperbolic(False).astype(float)),
    ):
        path = fields_io.write_field(f"{outdir}/{name}.mfe1", name, vals.T, 0.0, "sphere")
        files.append({"path": path, "kind": "field", "name": name})
    return files


# ---------------------------------------------------------------------------
# sphere FTLE

def run_sphere_ftle(cfg, outdir):
    lams, mus = sphere_grid(cfg["n_lam"], cfg["n_mu"])
    sampler = sphere_flows.QuadrupoleSampler()
    ftle = lagrangian.ftle_map(sampler, lams, mus, cfg["t_end"], cfg["dt"])
    path = fields_io.write_field(f"{outdir}/ftle.mfe1", "ftle", ftle.T, cfg["t_end"], "sphere")
    return [{"path": path, "kind": "field", "name": "ftle"}]


# ---------------------------------------------------------------------------
# sphere hyperbolicity times

def run_sphere_hypb_time(cfg, outdir):
    lams, mus = sphere_grid(cfg["n_lam"], cfg["n_mu"])
    sampler = sphere_flows.QuadrupoleSampler()
    maps = lagrangian.hyperbolicity_time_maps(
        sampler, lams, mus, cfg["t_end"], cfg["dt"], threshold=cfg["threshold"]
    )
    files = []
    for name, key in (
        ("hyptime_plain", "plain"),
        ("hyptime_plain_nocurv", "plain_nocurv"),
        ("hyptime_strong", "strong"),
        ("hyptime_strong_nocurv", "strong_nocurv"),
    ):
        path = fields_io.write_field(
            f"{outdir}/{name}.mfe1", name, maps[key].T, cfg["t_end"], "sphere"
        )
        files.append({"path": path, "kind": "field", "name": name})
    return files


# ---------------------------------------------------------------------------
# torus simulation

def _torus_grid(cfg):
    return torus_solver.TorusGrid(nx=cfg["nx"], kmax=cfg["kmax"], alpha=cfg["alpha"])


def run_torus_sim(cfg, outdir):
    grid = _torus_grid(cfg)
    state = torus_solver.initial_condition(grid, nu=cfg["nu"], dt=cfg["dt"])
    alpha = cfg["alpha"]
    files = []

    def add_field(name, vals, t):
        path = fields_io.write_field(f"{outdir}/{name}.mfe1", name, vals, t, "torus", alpha)
        files.append({"path": path, "kind": "field", "name": name})

    diag0 = torus_solver.diagnostic_fields(state)
    add_field("curvature", diag0["curvature"], 0.0)
    add_field("pressure_t0", diag0["pressure"], 0.0)
    add_field("okubo_weiss_t0", diag0["okubo_weiss"], 0.0)
    for panel in ("m_term_hess", "m_term_curv", "m_term_grad", "m_total", "m_total_nocurv"):
        add_field(panel, diag0[panel], 0.0)

    snapshot_times = [float(s) for s in str(cfg["snapshot_times"]).split(",") if s != ""]
    times = [state.t]
    budgets = [torus_solver.budget(state)]
    diss_z = [state.dissipated_enstrophy]
    diss_e = [state.dissipated_energy]
    if 0.0 in snapshot_times:
        add_field("q_t0", state.vorticity_grid(), 0.0)

    sample_every = cfg["sample_every"]
    nsteps = int(round(cfg["t_end"] / cfg["dt"]))
    next_snap = [t for t in sorted(snapshot_times) if t > 0.0]
    for n in range(nsteps):
        state = torus_solver.step_rk4(state)
        if (n + 1) % sample_every == 0 or n == nsteps - 1:
            times.append(state.t)
            budgets.append(torus_solver.budget(state))
            diss_z.append(state.dissipated_enstrophy)
            diss_e.append(state.dissipated_energy)
        while next_snap and state.t >= next_snap[0] - 0.5 * cfg["dt"]:
            t_snap = next_snap.pop(0)
            tag = f"q_t{t_snap:g}".replace(".", "p")
            add_field(tag, state.vorticity_grid(), state.t)

    cols = {
        "t": times,
        "energy": [b.energy for b in budgets],
        "enstrophy": [b.enstrophy for b in budgets],
        "grad_q_sq": [b.grad_q_sq for b in budgets],
        "dissipated_enstrophy": diss_z,
        "dissipated_energy": diss_e,
    }
    path = fields_io.write_series(f"{outdir}/budget.csv", cols)
    files.append({"path": path, "kind": "series", "name": "budget"})
    return files


# ---------------------------------------------------------------------------
# torus material lines

LINE_SEEDS = ((0.25 * TWO_PI, 0.70 * TWO_PI), (0.30 * TWO_PI, 0.70 * TWO_PI),
              (0.35 * TWO_PI, 0.70 * TWO_PI))


def run_torus_lines(cfg, outdir):
    grid = _torus_grid(cfg)
    state = torus_solver.initial_condition(grid, nu=cfg["nu"], dt=cfg["dt"])
    sampler = torus_solver.TorusGridSampler(state)
    lines = [
        lagrangian.init_material_line(sampler, x0, y0, cfg["s0"], cfg["n_segments"])
        for (x0, y0) in LINE_SEEDS
    ]
    files = []

    def add_field(name, vals, t):
        path = fields_io.write_field(
            f"{outdir}/{name}.mfe1", name, vals, t, "torus", cfg["alpha"]
        )
        files.append({"path": path, "kind": "field", "name": name})

    add_field("q_t0", state.vorticity_grid(), 0.0)
    state, records = torus_solver.advect_material_lines(
        state, lines, cfg["t_end"], sample_every=cfg["sample_every"]
    )

    # node snapshots nearest to the requested overlay times
    overlay = [float(s) for s in str(cfg["snapshot_times"]).split(",") if s != ""]
    rec_times = np.array([r["t"] for r in records])
    node_rows = {"t": [], "line": [], "node": [], "x": [], "y": []}
    for t_req in overlay:
        rec = records[int(np.argmin(np.abs(rec_times - t_req)))]
        for li, nodes in enumerate(rec["nodes"]):
            for ni, (x, y) in enumerate(nodes):
                node_rows["t"].append(rec["t"])
                node_rows["line"].append(li)
                node_rows["node"].append(ni)
                node_rows["x"].append(x)
                node_rows["y"].append(y)
    path = fields_io.write_series(f"{outdir}/line_nodes.csv", node_rows)
    files.append({"path": path, "kind": "series", "name": "line_nodes"})

    e0 = records[0]["energy"]
    energy_cols = {"t": [r["t"] for r in records]}
    for li in range(len(lines)):
        energy_cols[f"energy_{li}"] = [r["energy"][li] for r in records]
        energy_cols[f"energy_norm_{li}"] = [r["energy"][li] / e0[li] for r in records]
    path = fields_io.write_series(f"{outdir}/line_energy.csv", energy_cols)
    files.append({"path": path, "kind": "series", "name": "line_energy"})

    add_field(f"q_t{cfg['t_end']:g}".replace(".", "p"), state.vorticity_grid(), state.t)
    return files


# ---------------------------------------------------------------------------
# Poincaré disk

def run_pdisk(cfg, outdir):
    from skimage import measure

    n = cfg["n"]
    xs = np.linspace(-1.0, 1.0, n + 1)[:-1] + 1.0 / n
    X, Y = np.meshgrid(xs, xs)  # (ny, nx) with y outer
    r2 = X * X + Y * Y
    inside = r2 < cfg["r_max"] ** 2
    psi = np.full_like(X, np.nan)
    z = X[inside] + 1j * Y[inside]
    psi[inside] = -2.0 * np.arctan(z).imag
    files = []
    path = fields_io.write_field(f"{outdir}/psi.mfe1", "psi", psi, 0.0, "disk")
    files.append({"path": path, "kind": "field", "name": "psi"})

    levels = [float(s) for s in str(cfg["levels"]).split(",") if s != ""]
    rows = {"level": [], "segment": [], "x": [], "y": []}
    filled = np.where(inside, psi, 0.0)
    h = 2.0 / n
    for level in levels:
        contours = measure.find_contours(filled, level, mask=inside)
        for seg, contour in enumerate(contours):
            # contour indices are (row=y, col=x)
            for iy, ix in contour:
                rows["level"].append(level)
                rows["segment"].append(seg)
                rows["x"].append(-1.0 + 1.0 / n + ix * h)
                rows["y"].append(-1.0 + 1.0 / n + iy * h)
    path = fields_io.write_series(f"{outdir}/streamlines.csv", rows)
    files.append({"path": path, "kind": "series", "name": "streamlines"})

    report = pdisk.disk_flow_checks(n=n, r_max=cfg["r_max"])
    cols = {k: [v] for k, v in report.items()}
    path = fields_io.write_series(f"{outdir}/disk_checks.csv", cols)
    files.append({"path": path, "kind": "series", "name": "disk_checks"})
    return files


# ---------------------------------------------------------------------------
# appendix-b

def run_appendix_b(cfg, outdir):
    alpha, kmax = cfg["alpha"], cfg["kmax"]
    series = spectral_bounds.coeffs_by_series(alpha, kmax)
    fft_tab = spectral_bounds.coeffs_by_fft(alpha, kmax, grid_n=cfg["grid_n"])
    inv_series = spectral_bounds.coeffs_by_series(alpha, kmax, target="g_inverse")
    inv_fft = spectral_bounds.coeffs_by_fft(alpha, kmax, grid_n=cfg["grid_n"], target="g_inverse")

    forbidden = series.parity_forbidden_mask()
    summary = {
        "max_series_fft_diff": [float(np.max(np.abs(series.a - fft_tab.a)))],
        "max_series_fft_diff_inv": [float(np.max(np.abs(inv_series.a - inv_fft.a)))],
        "series_parity_violations": [int(np.count_nonzero(series.a[forbidden]))],
        "fft_parity_max": [float(np.max(np.abs(fft_tab.a[forbidden])))],
        "a00": [float(series.get(0, 0))],
    }

    big = spectral_bounds.coeffs_by_series(alpha, cfg["l_hi"])
    report = spectral_bounds.verify_bound(big, (cfg["l_lo"], cfg["l_hi"]))
    summary["c_observed"] = [report.c_observed]
    summary["bound_holds"] = [float(report.holds)]
    files = []
    path = fields_io.write_series(f"{outdir}/appendix_b_summary.csv", summary)
    files.append({"path": path, "kind": "series", "name": "appendix_b_summary"})

    scan = {
        "L": sorted(report.c_per_l),
        "C_L": [report.c_per_l[l] for l in sorted(report.c_per_l)],
    }
    path = fields_io.write_series(f"{outdir}/bound_scan.csv", scan)
    files.append({"path": path, "kind": "series", "name": "bound_scan"})

    ratio_rows = spectral_bounds.ratio_inequality_report(alpha, min(kmax, 12))
    ratio_cols = {
        "k": [r["k"] for r in ratio_rows],
        "l": [r["l"] for r in ratio_rows],
        "j": [r["j"] for r in ratio_rows],
        "ratio": [r["ratio"] for r in ratio_rows],
        "printed_bound": [r["printed_bound"] for r in ratio_rows],
        "holds": [float(r["holds"]) for r in ratio_rows],
    }
    path = fields_io.write_series(f"{outdir}/ratio_check.csv", ratio_cols)
    files.append({"path": path, "kind": "series", "name": "ratio_check"})
    return files


# ---------------------------------------------------------------------------
# registry

EXPERIMENTS = {
    "jet-verify": (
        {"delta_q": 2.0, "delta_mu": 1e-4, "fd_h": 0.5},
        run_jet_verify,
    ),
    "sphere-hypb": (
        {"n_lam": 720, "n_mu": 360, "threshold": 0.0},
        run_sphere_hypb,
    ),
    "sphere-ftle": (
        {"n_lam": 360, "n_mu": 180, "t_end": 2.0, "dt": 1e-3},
        run_sphere_ftle,
    ),
    "sphere-hypb-time": (
        {"n_lam": 240, "n_mu": 120, "t_end": 2.0, "dt": 1e-3, "threshold": 0.0},
        run_sphere_hypb_time,
    ),
    "torus-sim": (
        {
            "alpha": 1.8,
            "nu": 1e-6,
            "dt": 1e-3,
            "nx": 256,
            "kmax": 85,
            "t_end": 5.0,
            "snapshot_times": "0,1,2,3,4,5",
            "sample_every": 50,
        },
        run_torus_sim,
    ),
    "torus-lines": (
        {
            "alpha": 1.8,
            "nu": 1e-6,
            "dt": 1e-3,
            "nx": 256,
            "kmax": 85,
            "t_end": 2.0,
            "s0": 0.1,
            "n_segments": 100,
            "sample_every": 50,
            "snapshot_times": "0,1,2",
        },
        run_torus_lines,
    ),
    "pdisk": (
        {"n": 200, "r_max": 0.98, "levels": "-1,-0.75,-0.5,-0.25,0,0.25,0.5,0.75,1"},
        run_pdisk,
    ),
    "appendix-b": (
        {"alpha": 1.8, "kmax": 40, "grid_n": 256, "l_lo": 10, "l_hi": 60},
        run_appendix_b,
    ),
}

#: paper-scale overrides applied by the --full flag
FULL_SCALE = {
    "torus-sim": {"nx": 800, "kmax": 199},
    "torus-lines": {"nx": 800, "kmax": 199},
}
