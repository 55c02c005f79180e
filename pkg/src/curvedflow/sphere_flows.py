"""Closed-form steady flows on the unit sphere.

Two fields from the worked examples: a zonal jet driven by a two-level
staircase vorticity field with jump delta_q across the latitude circle
mu = mu0, and a steady quadrupole whose vorticity is a combination of
degree-2 spherical harmonics (Laplace-Beltrami eigenvalue -6).

The jet admits fully explicit tensors and an explicit advected material
line, which makes it the main consistency anchor: the strain-acceleration
quadratic form, the tensor pipeline and the second time derivative of the
squared line length must all agree.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ._kernels import JET, QUADRUPOLE, RIGID
from .diagnostics import VelocitySampler
from .geometry import DomainError, SphereChart

SQRT5 = np.sqrt(5.0)
SQRT30 = np.sqrt(30.0)

#: proximity band around mu0 treated as "on the vorticity jump"
JET_AXIS_TOL = 1e-9

_SPHERE = SphereChart()


@dataclass
class JetParams:
    """Jet axis mu0 in (-1, 1) and vorticity jump delta_q > 0."""

    mu0: float
    delta_q: float = 2.0

    def __post_init__(self):
        if not -1.0 < self.mu0 < 1.0:
            raise ValueError("mu0 must lie in (-1, 1)")
        if self.delta_q <= 0.0:
            raise ValueError("delta_q must be positive")

    @property
    def a_upper(self):
        """Velocity amplitude (delta_q/2)(1 + mu0) of the mu >= mu0 branch."""
        return 0.5 * self.delta_q * (1.0 + self.mu0)

    @property
    def a_lower(self):
        """Velocity amplitude (delta_q/2)(1 - mu0) of the mu < mu0 branch."""
        return 0.5 * self.delta_q * (1.0 - self.mu0)


def jet_velocity(params, p):
    """Frame velocity (u, v) of the jet; v = 0, u per branch of mu vs mu0."""
    _SPHERE.validate(p)
    mu = p[1]
    up = params.a_upper * np.sqrt((1.0 - mu) / (1.0 + mu))
    lo = params.a_lower * np.sqrt((1.0 + mu) / (1.0 - mu))
    u = np.where(mu >= params.mu0, up, lo)
    return u + 0.0, 0.0 * u


def jet_vorticity(params, p):
    mu = p[1]
    return np.where(
        mu >= params.mu0,
        0.5 * (1.0 + params.mu0) * params.delta_q,
        -0.5 * (1.0 - params.mu0) * params.delta_q,
    )


def jet_angular_velocity(params, mu):
    """d(lambda)/dt of a particle at latitude mu (per branch)."""
    return np.where(
        mu >= params.mu0,
        params.a_upper / (1.0 + mu),
        params.a_lower / (1.0 - mu),
    )


def jet_m_quadratic(params, mu):
    """Closed form of <M xi, xi> for the unit frame vector xi = (0, 1).

    Upper branch ((1-mu)/(1+mu))^2 (1+mu0)^2 (delta_q/2)^2 as printed for
    mu >= mu0; the mu < mu0 branch is its mirror image under
    (mu, mu0) -> (-mu, -mu0).
    """
    up = ((1.0 - mu) / (1.0 + mu)) ** 2 * params.a_upper**2
    lo = ((1.0 + mu) / (1.0 - mu)) ** 2 * params.a_lower**2
    return np.where(mu >= params.mu0, up, lo)


def jet_pressure_hessian(params, p):
    """Closed-form pressure Hessian, diagonal per branch.

    mu >= mu0: diag(mu^2, 2 mu - 1) (1+mu0)^2 (dq/2)^2 / (1+mu)^2; the
    mu < mu0 branch is the (mu, mu0) -> (-mu, -mu0) mirror image.
    """
    mu = p[1]
    au2, al2 = params.a_upper**2, params.a_lower**2
    up = mu >= params.mu0
    h11 = np.where(up, mu * mu * au2 / (1.0 + mu) ** 2, mu * mu * al2 / (1.0 - mu) ** 2)
    h22 = np.where(
        up,
        (2.0 * mu - 1.0) * au2 / (1.0 + mu) ** 2,
        -(2.0 * mu + 1.0) * al2 / (1.0 - mu) ** 2,
    )
    zero = 0.0 * h11
    return np.array([[h11, zero], [zero, h22]])


class JetSampler(VelocitySampler):
    """Steady zonal jet; tensors evaluate per-branch (mu = mu0 -> upper)."""

    steady = True
    source = "analytic"

    def __init__(self, params):
        self.params = params
        self.chart = _SPHERE
        self.kernel_spec = (JET, params.mu0, params.delta_q)

    def velocity(self, p):
        return jet_velocity(self.params, p)

    def pressure_hessian(self, p):
        # closed form: the finite-difference stencil would straddle the
        # vorticity jump for points on (or near) the jet axis
        return jet_pressure_hessian(self.params, p)

    def coordinate_partials(self, p):
        mu = p[1]
        pr = self.params
        du_up = -pr.a_upper / ((1.0 + mu) ** 1.5 * np.sqrt(1.0 - mu))
        du_lo = pr.a_lower / ((1.0 - mu) ** 1.5 * np.sqrt(1.0 + mu))
        u_mu = np.where(mu >= pr.mu0, du_up, du_lo)
        zero = 0.0 * u_mu
        return (zero, u_mu), (zero, zero)

    def on_discontinuity(self, p):
        return np.abs(p[1] - self.params.mu0) <= JET_AXIS_TOL


@dataclass
class JetLineSpec:
    """Initial meridional segment [z0, z0 + delta_mu] at lambda = 0.

    The segment must stay inside one vorticity branch; the length closed
    form is per-branch.
    """

    z0: float
    delta_mu: float

    def bounds(self):
        lo, hi = sorted((self.z0, self.z0 + self.delta_mu))
        return lo, hi

    def validate(self, params):
        lo, hi = self.bounds()
        if not (-1.0 < lo and hi < 1.0):
            raise DomainError("material line leaves |mu| < 1")
        if lo < params.mu0 < hi:
            raise ValueError("material line must not cross the jet axis mu0")


def jet_line_length(params, spec, t):
    """Metric length l(t) of the advected meridional segment.

    The particle at latitude mu advances in longitude at the angular rate
    a/(1 + mu) (upper branch) or a/(1 - mu) (lower), so the advected line is
    the graph lambda(mu) = rate(mu) * t and

        l(t) = int sqrt(g_ll (d lambda/d mu)^2 + g_mm) d mu

    evaluated by adaptive quadrature.
    """
    if np.ndim(t):
        return np.array([jet_line_length(params, spec, tt) for tt in t])
    spec.validate(params)
    lo, hi = spec.bounds()
    if lo == hi:
        return 0.0
    upper = lo >= params.mu0
    amp = params.a_upper if upper else params.a_lower

    def integrand(mu):
        omm = 1.0 - mu * mu
        if upper:
            stretch = amp * amp * t * t * (1.0 - mu) / (1.0 + mu) ** 3
        else:
            stretch = amp * amp * t * t * (1.0 + mu) / (1.0 - mu) ** 3
        return np.sqrt(stretch + 1.0 / omm)

    val, err = quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
    if err > 1e-8 * max(abs(val), 1.0):
        raise ArithmeticError(f"line-length quadrature did not converge (err={err})")
    return val


# ---------------------------------------------------------------------------
# quadrupole

def quadrupole_vorticity(p):
    """q = (sqrt5/2)(3 mu^2 - 1) + (sqrt30/2)(1 - mu^2) cos 2 lambda."""
    lam, mu = p
    return 0.5 * SQRT5 * (3.0 * mu * mu - 1.0) + 0.5 * SQRT30 * (1.0 - mu * mu) * np.cos(2.0 * lam)


def quadrupole_psi(p):
    """Stream function psi = -q/6 (eigenfunction relation Delta psi = q)."""
    return -quadrupole_vorticity(p) / 6.0


def quadrupole_velocity(p):
    """Frame velocity u = -sqrt(1-mu^2) psi_mu, v = psi_lambda / sqrt(1-mu^2)."""
    _SPHERE.validate(p)
    lam, mu = p
    r = np.sqrt(1.0 - mu * mu)
    u = mu * r * (0.5 * SQRT5 - (SQRT30 / 6.0) * np.cos(2.0 * lam))
    v = (SQRT30 / 6.0) * r * np.sin(2.0 * lam)
    return u, v


class QuadrupoleSampler(VelocitySampler):
    """Steady quadrupole field; saddles at (0, 0) and (pi, 0)."""

    steady = True
    source = "analytic"

    def __init__(self):
        self.chart = _SPHERE
        self.kernel_spec = (QUADRUPOLE, 0.0, 0.0)

    def velocity(self, p):
        return quadrupole_velocity(p)

    def coordinate_partials(self, p):
        lam, mu = p
        r = np.sqrt(1.0 - mu * mu)
        c2, s2 = np.cos(2.0 * lam), np.sin(2.0 * lam)
        zonal = 0.5 * SQRT5 - (SQRT30 / 6.0) * c2
        u_lam = mu * r * (SQRT30 / 3.0) * s2
        u_mu = (1.0 - 2.0 * mu * mu) / r * zonal
        v_lam = (SQRT30 / 3.0) * r * c2
        v_mu = -(SQRT30 / 6.0) * (mu / r) * s2
        return (u_lam, u_mu), (v_lam, v_mu)


def quadrupole_hessian(p):
    """Pressure Hessian of the steady quadrupole via the tensor pipeline."""
    from .diagnostics import pressure_hessian_steady

    return pressure_hessian_steady(QuadrupoleSampler(), p)


# ---------------------------------------------------------------------------
# simple reference flows used by tests and oracles

class RigidRotationSampler(VelocitySampler):
    """Solid-body rotation u = c sqrt(1 - mu^2): an isometry flow, S = 0."""

    steady = True
    source = "analytic"

    def __init__(self, c=1.0):
        self.c = float(c)
        self.chart = _SPHERE
        self.kernel_spec = (RIGID, float(c), 0.0)

    def velocity(self, p):
        mu = p[1]
        r = np.sqrt(1.0 - mu * mu)
        return self.c * r, 0.0 * r

    def coordinate_partials(self, p):
        mu = p[1]
        r = np.sqrt(1.0 - mu * mu)
        zero = 0.0 * r
        return (zero, -self.c * mu / r), (zero, zero)
