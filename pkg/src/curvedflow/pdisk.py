"""Steady jet on the Poincaré disk.

The flow u - i v = ((1 - |z|^2)/2) f(z) with f(z) = 2/(z^2 + 1) is
incompressible and irrotational because sqrt(g) (u - i v) = f(z) is
holomorphic on the open disk; its streamlines are geodesics and the poles of
f sit on the boundary circle.
"""

import numpy as np

from .diagnostics import VelocitySampler
from .geometry import PoincareDiskChart

_DISK = PoincareDiskChart()


def _f(z):
    return 2.0 / (z * z + 1.0)


def _fprime(z):
    return -4.0 * z / (z * z + 1.0) ** 2


def disk_velocity(p):
    """Frame velocity (u, v) from u - i v = ((1 - |z|^2)/2) f(z)."""
    _DISK.validate(p)
    x, y = p
    z = x + 1j * y
    w = 0.5 * (1.0 - x * x - y * y) * _f(z)
    return w.real, -w.imag


def disk_stream_function(p):
    """Stream function with u = -g^(-1/2) psi_y, v = g^(-1/2) psi_x.

    psi = -Im(2 arctan z): the complex potential of f is 2 arctan z
    (principal branch, single-valued on the simply connected disk), and the
    sign makes the standard stream-function relations recover the velocity.
    psi = 0 on the real diameter, the geodesic through the origin.
    """
    _DISK.validate(p)
    z = p[0] + 1j * p[1]
    return -2.0 * np.arctan(z).imag


class DiskJetSampler(VelocitySampler):
    """Steady irrotational jet along the +x geodesic of the Poincaré disk."""

    steady = True
    source = "analytic"

    def __init__(self):
        self.chart = _DISK

    def velocity(self, p):
        return disk_velocity(p)

    def coordinate_partials(self, p):
        x, y = p
        z = x + 1j * y
        half = 0.5 * (1.0 - x * x - y * y)
        fz, fp = _f(z), _fprime(z)
        d_dx = -x * fz + half * fp
        d_dy = -y * fz + 1j * half * fp
        return (d_dx.real, d_dy.real), (-d_dx.imag, -d_dy.imag)


def disk_flow_checks(n=200, r_max=0.98, h_scale=1e-3):
    """Residual report over an interior grid.

    Finite-difference (4th order, step shrinking near the boundary) checks
    of the Cauchy-Riemann equations for F = sqrt(g)(u - iv), of the
    conformal divergence and of the vorticity, each normalized by the local
    magnitude scale max(1, |F|).  Returns a dict of maxima.
    """
    xs = np.linspace(-1.0, 1.0, n + 1)[:-1] + 1.0 / n
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    inside = X * X + Y * Y < r_max * r_max
    x, y = X[inside], Y[inside]
    r = np.hypot(x, y)
    h = h_scale * (1.0 - r)

    def big_f(xx, yy):
        u, v = disk_velocity((xx, yy))
        sq = 2.0 / (1.0 - xx * xx - yy * yy)
        return sq * u, -sq * v  # Re F, Im F

    def d_dx(fun, comp):
        acc = 0.0
        for o, wgt in zip((-2, -1, 1, 2), (1.0, -8.0, 8.0, -1.0)):
            acc = acc + wgt * fun(x + o * h, y)[comp]
        return acc / (12.0 * h)

    def d_dy(fun, comp):
        acc = 0.0
        for o, wgt in zip((-2, -1, 1, 2), (1.0, -8.0, 8.0, -1.0)):
            acc = acc + wgt * fun(x, y + o * h)[comp]
        return acc / (12.0 * h)

    fr, fi = big_f(x, y)
    scale = np.maximum(1.0, np.hypot(fr, fi))
    cr1 = d_dx(big_f, 0) - d_dy(big_f, 1)
    cr2 = d_dy(big_f, 0) + d_dx(big_f, 1)
    cauchy_riemann = np.max(np.hypot(cr1, cr2) / scale)

    def sqrtg_uv(xx, yy):
        u, v = disk_velocity((xx, yy))
        sq = 2.0 / (1.0 - xx * xx - yy * yy)
        return sq * u, sq * v

    g = (2.0 / (1.0 - x * x - y * y)) ** 2
    div = (d_dx(sqrtg_uv, 0) + d_dy(sqrtg_uv, 1)) / g
    curl = (d_dx(sqrtg_uv, 1) - d_dy(sqrtg_uv, 0)) / g
    u, v = disk_velocity((x, y))
    vscale = np.maximum(1.0, np.hypot(u, v))
    return {
        "n_points": int(inside.sum()),
        "max_cauchy_riemann": float(cauchy_riemann),
        "max_divergence": float(np.max(np.abs(div) / vscale)),
        "max_vorticity": float(np.max(np.abs(curl) / vscale)),
    }
