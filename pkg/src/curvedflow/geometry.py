"""Coordinate charts for the unit sphere, the conformally curved torus, and
the Poincaré disk.

Every chart is two-dimensional with a diagonal metric diag(g11, g22).  All
tensors elsewhere in the package are expressed in the pointwise orthonormal
frame e1 = h1^-1 d/dx1, e2 = h2^-1 d/dx2 with h_i = sqrt(g_ii), which makes
norms metric-free.  Chart methods accept scalars or numpy arrays.

Coordinates:
  sphere  -- (lam, mu), lam the longitude, mu the sine of latitude, |mu| < 1
  torus   -- (x, y) on [0, 2pi)^2 with conformal factor g = exp(alpha sin x sin y)
  disk    -- (x, y) with x^2 + y^2 < 1, conformal factor 4 / (1 - |z|^2)^2

Orientation convention: e1 along increasing x1, e2 along increasing x2, so
that the scalar vorticity satisfies q = (grad u)[2,1] - (grad u)[1,2] for the
frame velocity gradient (see diagnostics).
"""

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# rejection band around the sphere poles / disk boundary
POLE_EPS = 1e-12


class DomainError(ValueError):
    """Point (or stencil) outside the chart's valid range."""


@dataclass
class MetricData:
    """Metric, connection and curvature data at a point.

    christoffel holds the six independent symbols as a dict keyed by
    (k, i, j) with i <= j, 1-based indices, Gamma^k_ij symmetric in (i, j).
    r1221 is the single curvature component <R(e1,e2)e2, e1>.
    """

    g11: float
    g22: float
    sqrt_g: float
    christoffel: dict
    r1221: float


class Chart:
    """Base chart; subclasses fill in the metric closed forms."""

    kind = "abstract"

    def validate(self, p):
        """Raise DomainError if p is outside the chart's valid range."""
        raise NotImplementedError

    def scale_factors(self, p):
        """(h1, h2) with h_i = sqrt(g_ii) at p."""
        raise NotImplementedError

    def rotation_coeffs(self, p):
        """Frame rotation coefficients (a, b).

        a = <nabla_{e1} e1, e2> and b = <nabla_{e2} e1, e2>; the full
        connection in the orthonormal frame is nabla_{e_j} e1 = c_j e2,
        nabla_{e_j} e2 = -c_j e1 with (c1, c2) = (a, b).
        """
        raise NotImplementedError

    def curvature(self, p):
        """R1221 at p (closed form)."""
        raise NotImplementedError

    def christoffel(self, p):
        """The six independent Gamma^k_ij values, closed form."""
        raise NotImplementedError

    def wrap(self, p):
        """Reduce coordinates to the chart's fundamental domain."""
        return p

    def metric_at(self, p):
        self.validate(p)
        h1, h2 = self.scale_factors(p)
        return MetricData(
            g11=h1 * h1,
            g22=h2 * h2,
            sqrt_g=h1 * h2,
            christoffel=self.christoffel(p),
            r1221=self.curvature(p),
        )

    def curvature_at(self, p):
        self.validate(p)
        return self.curvature(p)

    def geodesic_normal_step(self, p, v, h):
        """First-order coordinate displacement from p with frame velocity v.

        Moves h * v^i / h_i in each coordinate; consumers apply Christoffel
        corrections explicitly (this only places finite-difference stencils).
        """
        self.validate(p)
        h1, h2 = self.scale_factors(p)
        q = (p[0] + h * v[0] / h1, p[1] + h * v[1] / h2)
        self.validate(q)
        return q


class SphereChart(Chart):
    kind = "sphere"

    def validate(self, p):
        mu = np.asarray(p[1])
        if np.any(np.abs(mu) >= 1.0 - POLE_EPS):
            raise DomainError(f"sphere chart needs |mu| < 1 - {POLE_EPS}, got mu={p[1]}")

    def scale_factors(self, p):
        mu = p[1]
        r = np.sqrt(1.0 - mu * mu)
        return r, 1.0 / r

    def rotation_coeffs(self, p):
        mu = p[1]
        r = np.sqrt(1.0 - mu * mu)
        return mu / r, 0.0 * mu

    def curvature(self, p):
        return 1.0 + 0.0 * p[1]

    def christoffel(self, p):
        mu = p[1]
        omm = 1.0 - mu * mu
        return {
            (1, 1, 1): 0.0 * mu,
            (1, 1, 2): -mu / omm,
            (1, 2, 2): 0.0 * mu,
            (2, 1, 1): mu * omm,
            (2, 1, 2): 0.0 * mu,
            (2, 2, 2): mu / omm,
        }


class _ConformalChart(Chart):
    """Shared machinery for metrics of the form g(x,y) * (dx^2 + dy^2)."""

    def log_g_grad(self, p):
        """(d/dx log g, d/dy log g)."""
        raise NotImplementedError

    def conformal_factor(self, p):
        raise NotImplementedError

    def scale_factors(self, p):
        h = np.sqrt(self.conformal_factor(p))
        return h, h

    def rotation_coeffs(self, p):
        gx, gy = self.log_g_grad(p)
        inv_h = 1.0 / np.sqrt(self.conformal_factor(p))
        return -0.5 * inv_h * gy, 0.5 * inv_h * gx

    def christoffel(self, p):
        gx, gy = self.log_g_grad(p)
        return {
            (1, 1, 1): 0.5 * gx,
            (1, 1, 2): 0.5 * gy,
            (1, 2, 2): -0.5 * gx,
            (2, 1, 1): -0.5 * gy,
            (2, 1, 2): 0.5 * gx,
            (2, 2, 2): 0.5 * gy,
        }


class ConformalTorusChart(_ConformalChart):
    """Torus [0, 2pi)^2 with g = exp(alpha sin x sin y), alpha > 0."""

    kind = "torus"

    def __init__(self, alpha):
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        self.alpha = float(alpha)

    def validate(self, p):
        pass  # every (x, y) is valid

    def wrap(self, p):
        return (np.mod(p[0], TWO_PI), np.mod(p[1], TWO_PI))

    def conformal_factor(self, p):
        return np.exp(self.alpha * np.sin(p[0]) * np.sin(p[1]))

    def log_g_grad(self, p):
        x, y = p
        return self.alpha * np.cos(x) * np.sin(y), self.alpha * np.sin(x) * np.cos(y)

    def curvature(self, p):
        s = self.alpha * np.sin(p[0]) * np.sin(p[1])
        return s * np.exp(-s)


class PoincareDiskChart(_ConformalChart):
    """Open unit disk with g = 4 / (1 - x^2 - y^2)^2, curvature -1."""

    kind = "disk"

    def validate(self, p):
        r2 = np.asarray(p[0]) ** 2 + np.asarray(p[1]) ** 2
        if np.any(r2 >= 1.0 - POLE_EPS):
            raise DomainError(f"disk chart needs x^2+y^2 < 1, got {p}")

    def conformal_factor(self, p):
        omr = 1.0 - p[0] * p[0] - p[1] * p[1]
        return 4.0 / (omr * omr)

    def log_g_grad(self, p):
        omr = 1.0 - p[0] * p[0] - p[1] * p[1]
        return 4.0 * p[0] / omr, 4.0 * p[1] / omr

    def curvature(self, p):
        return -1.0 + 0.0 * p[0]


def metric_at(chart, p):
    return chart.metric_at(p)


def curvature_at(chart, p):
    return chart.curvature_at(p)


def geodesic_normal_step(chart, p, v, h):
    return chart.geodesic_normal_step(p, v, h)
