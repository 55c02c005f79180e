"""Covariant flow diagnostics in the orthonormal frame.

Implements the velocity-gradient tensor with connection corrections, the
rate-of-strain tensor S, the Okubo-Weiss parameter, the pressure Hessian of
steady flows, the curvature term of the strain-acceleration tensor, the
strain-acceleration tensor

    M = -H(p) - R(., u)u + (grad u)^T (grad u),

whose quadratic form gives (1/2) d^2|xi|^2/dt^2 for a material tangent xi,
and Haller-type pointwise classification into hyperbolic / strongly
hyperbolic / elliptic / degenerate.

All tensors are 2x2 in the frame (e1, e2); functions accept scalar points or
arrays of points (same shapes in, same shapes out), so field-wide maps reuse
the pointwise code.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import Chart

# default coordinate step for finite-difference derivatives of exact fields
FD_STEP = 1e-4

#: classification codes used by the array path
DEGENERATE, ELLIPTIC, HYPERBOLIC, STRONG_HYPERBOLIC = 0, 1, 2, 3

CLASS_NAMES = {
    DEGENERATE: "degenerate",
    ELLIPTIC: "elliptic",
    HYPERBOLIC: "hyperbolic",
    STRONG_HYPERBOLIC: "strong-hyperbolic",
}


class UnsteadyFlowError(ValueError):
    """Steady-flow reduction requested for an unsteady sampler."""


class VelocitySampler:
    """A velocity field on a chart, queried in frame components.

    Subclasses either provide closed-form coordinate partials of (u, v)
    (analytic samplers) or fall back to finite differences placed with
    geodesic_normal_step.  `steady` gates the steady pressure-Hessian
    reduction.  Pure functions of the query point; safe to share across
    threads.
    """

    chart: Chart = None
    steady = False
    source = "generic"

    def velocity(self, p):
        """Frame components (u, v) at p."""
        raise NotImplementedError

    def coordinate_partials(self, p):
        """((u_x1, u_x2), (v_x1, v_x2)) closed forms, or None."""
        return None

    def on_discontinuity(self, p):
        """True where tensor evaluation is flagged (e.g. a vorticity jump)."""
        return np.zeros(np.shape(p[0]), dtype=bool) if np.ndim(p[0]) else False

    def velocity_gradient(self, p):
        return velocity_gradient(self, p)

    def advective_acceleration(self, p):
        """Frame components of nabla_u u."""
        u, v = self.velocity(p)
        g = self.velocity_gradient(p)
        return g[0, 0] * u + g[0, 1] * v, g[1, 0] * u + g[1, 1] * v


def fd_coordinate_steps(chart, p, h=FD_STEP):
    """Safe coordinate steps for stencils, shrunk near chart boundaries."""
    if chart.kind == "sphere":
        return h, np.minimum(h, (1.0 - np.abs(p[1])) / 8.0)
    if chart.kind == "disk":
        hs = np.minimum(h, (1.0 - np.hypot(p[0], p[1])) / 8.0)
        return hs, hs
    return h, h


def frame_gradient(chart, p, u, v, du, dv):
    """Assemble the frame covariant gradient from coordinate partials.

    du = (u_x1, u_x2), dv likewise, for the frame components u, v.  Returns
    the 2x2 array G with G[i-1, j-1] = <nabla_{e_j} u, e_i>.
    """
    h1, h2 = chart.scale_factors(p)
    a, b = chart.rotation_coeffs(p)
    return np.array(
        [
            [du[0] / h1 - v * a, du[1] / h2 - v * b],
            [dv[0] / h1 + u * a, dv[1] / h2 + u * b],
        ]
    )


# 4th-order central first-derivative stencil
_FD4_OFFSETS = (-2, -1, 1, 2)
_FD4_WEIGHTS = (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)


def _fd_partials(f, p, h1s, h2s):
    """4th-order coordinate partials of a vector-valued field f(p) -> (f1, f2)."""
    x1, x2 = p
    f1_x1 = f2_x1 = f1_x2 = f2_x2 = 0.0
    for o, w in zip(_FD4_OFFSETS, _FD4_WEIGHTS):
        a1, a2 = f((x1 + o * h1s, x2))
        f1_x1 = f1_x1 + w * a1
        f2_x1 = f2_x1 + w * a2
        b1, b2 = f((x1, x2 + o * h2s))
        f1_x2 = f1_x2 + w * b1
        f2_x2 = f2_x2 + w * b2
    return (f1_x1 / h1s, f1_x2 / h2s), (f2_x1 / h1s, f2_x2 / h2s)


def velocity_gradient(sampler, p):
    """Frame covariant gradient of the sampled velocity at p.

    Uses closed-form coordinate partials when the sampler provides them,
    otherwise a 4th-order stencil.  Trace is zero (to tolerance) for
    incompressible samplers.
    """
    chart = sampler.chart
    u, v = sampler.velocity(p)
    parts = sampler.coordinate_partials(p)
    if parts is None:
        h1s, h2s = fd_coordinate_steps(chart, p)
        du, dv = _fd_partials(sampler.velocity, p, h1s, h2s)
    else:
        du, dv = parts
    return frame_gradient(chart, p, u, v, du, dv)


def rate_of_strain(grad):
    """Symmetric part of the velocity gradient."""
    return 0.5 * (grad + _transpose22(grad))


def spin(grad):
    """Antisymmetric part of the velocity gradient."""
    return 0.5 * (grad - _transpose22(grad))


def _transpose22(t):
    # transpose of the leading 2x2 axes (entries may be grids)
    return np.array([[t[0, 0], t[1, 0]], [t[0, 1], t[1, 1]]])


def okubo_weiss(grad):
    """Q = (1/2)(|S|^2 - |Omega|^2), Frobenius norms of the split parts."""
    s = rate_of_strain(grad)
    omega = 0.5 * (grad[1, 0] - grad[0, 1])
    s_sq = s[0, 0] ** 2 + s[1, 1] ** 2 + 2.0 * s[0, 1] ** 2
    return 0.5 * (s_sq - 2.0 * omega**2)


def pressure_hessian_steady(sampler, p, h=FD_STEP):
    """H(p) for a steady Euler solution, via grad p = -nabla_u u.

    Samplers with a closed-form `pressure_hessian` (e.g. across a vorticity
    jump, where stencils would straddle the discontinuity) supply it
    directly; otherwise the exact advective acceleration w = nabla_u u is
    differentiated with a 4th-order stencil and -grad(w) returned in frame
    components, symmetric to stencil accuracy because w is exactly a
    gradient for steady flows.
    """
    if not sampler.steady:
        raise UnsteadyFlowError(
            "pressure Hessian via the steady reduction needs a steady sampler; "
            "use the torus solver's pressure_solve for evolving fields"
        )
    closed = getattr(sampler, "pressure_hessian", None)
    if closed is not None:
        return closed(p)
    return pressure_hessian_fd(sampler, p, h)


def pressure_hessian_fd(sampler, p, h=FD_STEP):
    """The finite-difference route for -grad(nabla_u u), always available."""
    chart = sampler.chart
    h1s, h2s = fd_coordinate_steps(chart, p, h)
    dw1, dw2 = _fd_partials(sampler.advective_acceleration, p, h1s, h2s)
    w1, w2 = sampler.advective_acceleration(p)
    return -frame_gradient(chart, p, w1, w2, dw1, dw2)


def curvature_term(chart, p, u):
    """The tensor R(., u)u: quadratic form <R(xi,u)u, xi> = R1221 (xi1 v - xi2 u)^2."""
    r = chart.curvature_at(p) if np.ndim(p[0]) == 0 else chart.curvature(p)
    uu, vv = u
    return np.array([[r * vv * vv, -r * uu * vv], [-r * uu * vv, r * uu * uu]])


def strain_acceleration(chart, p, sampler, hess=None):
    """M = -H(p) - R(., u)u + (grad u)^T (grad u) in frame components."""
    if hess is None:
        hess = pressure_hessian_steady(sampler, p)
    grad = sampler.velocity_gradient(p)
    u = sampler.velocity(p)
    gtg = _matmul22(_transpose22(grad), grad)
    return -hess - curvature_term(chart, p, u) + gtg


def _matmul22(a, b):
    return np.array(
        [
            [a[0, 0] * b[0, 0] + a[0, 1] * b[1, 0], a[0, 0] * b[0, 1] + a[0, 1] * b[1, 1]],
            [a[1, 0] * b[0, 0] + a[1, 1] * b[1, 0], a[1, 0] * b[0, 1] + a[1, 1] * b[1, 1]],
        ]
    )


@dataclass
class StrainEigen:
    """Eigen-system of the (traceless symmetric) rate-of-strain tensor."""

    lam: float
    e_plus: tuple
    e_minus: tuple


def strain_eigensystem(s):
    """StrainEigen for a (numerically) traceless symmetric S.

    Works from the deviatoric entries so a roundoff-level trace residue
    cannot rotate the eigenvectors.
    """
    s1, s2 = 0.5 * (s[0, 0] - s[1, 1]), s[0, 1]
    lam = np.hypot(s1, s2)
    phi = 0.5 * np.arctan2(s2, s1)
    e_plus = (np.cos(phi), np.sin(phi))
    e_minus = (-np.sin(phi), np.cos(phi))
    return StrainEigen(lam=lam, e_plus=e_plus, e_minus=e_minus)


@dataclass
class HyperbolicVerdict:
    """Pointwise Haller classification.

    m_on_z holds <M xi, xi> for xi = e+ + e- and xi = e+ - e- (the two
    zero-strain directions, unnormalized as written).
    """

    klass: str
    m_on_z: tuple
    det_s: float

    @property
    def is_hyperbolic(self):
        return self.klass in ("hyperbolic", "strong-hyperbolic")


def _quadratic_form(m, xi):
    x1, x2 = xi
    return (
        m[0, 0] * x1 * x1 + (m[0, 1] + m[1, 0]) * x1 * x2 + m[1, 1] * x2 * x2
    )


#: forms within this relative band of zero are snapped to exactly zero, so
#: the positive-semidefinite boundary (the zonal jet) classifies stably
FORM_SNAP_REL = 1e-12


def _snap(f, scale):
    return np.where(np.abs(f) <= FORM_SNAP_REL * scale, 0.0, f)


def classify(chart, p, sampler, hess=None, threshold=0.0, tol_degen_rel=1e-10):
    """Classify a point as hyperbolic / strongly hyperbolic / elliptic / degenerate.

    Degenerate when the strain eigenvalue falls below the relative
    tolerance (or the sampler flags a discontinuity); strongly hyperbolic
    when the symmetrized M is positive definite; hyperbolic when
    <M xi, xi> >= threshold on both zero-strain directions, with forms
    snapped to zero inside a tiny relative band: exact-boundary
    (semidefinite) points count as hyperbolic, matching the zonal-jet
    discussion, while any genuinely negative form excludes the point.
    """
    grad = sampler.velocity_gradient(p)
    s = rate_of_strain(grad)
    eig = strain_eigensystem(s)
    scale = 1e-10 if tol_degen_rel is None else tol_degen_rel
    frob = np.sqrt(grad[0, 0] ** 2 + grad[0, 1] ** 2 + grad[1, 0] ** 2 + grad[1, 1] ** 2)
    lam_tol = scale * (frob + 1e-300)
    det_s = -(eig.lam**2)

    if sampler.on_discontinuity(p) or eig.lam <= lam_tol:
        return HyperbolicVerdict(klass="degenerate", m_on_z=(np.nan, np.nan), det_s=0.0)

    m = strain_acceleration(chart, p, sampler, hess)
    m_sym = rate_of_strain(m)  # symmetrize: kills tiny antisymmetric residue
    xi_p = (eig.e_plus[0] + eig.e_minus[0], eig.e_plus[1] + eig.e_minus[1])
    xi_m = (eig.e_plus[0] - eig.e_minus[0], eig.e_plus[1] - eig.e_minus[1])
    m_scale = abs(m_sym[0, 0]) + abs(m_sym[1, 1]) + 2.0 * abs(m_sym[0, 1]) + 1e-300
    f_p = float(_snap(_quadratic_form(m_sym, xi_p), m_scale))
    f_m = float(_snap(_quadratic_form(m_sym, xi_m), m_scale))

    tr_m = m_sym[0, 0] + m_sym[1, 1]
    det_m = m_sym[0, 0] * m_sym[1, 1] - m_sym[0, 1] ** 2
    if tr_m > 0.0 and det_m > 0.0:
        klass = "strong-hyperbolic"
    elif f_p >= threshold and f_m >= threshold:
        klass = "hyperbolic"
    else:
        klass = "elliptic"
    return HyperbolicVerdict(klass=klass, m_on_z=(f_p, f_m), det_s=det_s)


@dataclass
class ClassificationField:
    """Vectorized classification over a grid, with and without curvature.

    code_with/code_without hold DEGENERATE/ELLIPTIC/HYPERBOLIC/
    STRONG_HYPERBOLIC; both derive from one shared S, H(p) and grad u, so
    the hyperbolic-with subset of hyperbolic-without inclusion on positive
    curvature is exact by construction.
    """

    code_with: np.ndarray
    code_without: np.ndarray

    def mask_hyperbolic(self, with_curvature=True):
        code = self.code_with if with_curvature else self.code_without
        return code >= HYPERBOLIC

    def mask_strong(self, with_curvature=True):
        code = self.code_with if with_curvature else self.code_without
        return code == STRONG_HYPERBOLIC


def classify_field(sampler, x1, x2, threshold=0.0, tol_degen_rel=1e-10):
    """Array classification of a steady analytic sampler at points (x1, x2).

    Returns a ClassificationField holding codes with and without the
    curvature term of M.  x1, x2 are broadcastable arrays of chart
    coordinates.
    """
    chart = sampler.chart
    p = (np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    grad = sampler.velocity_gradient(p)
    s11 = 0.5 * (grad[0, 0] - grad[1, 1])
    s12 = 0.5 * (grad[0, 1] + grad[1, 0])
    lam_s = np.hypot(s11, s12)
    phi = 0.5 * np.arctan2(s12, s11)
    ep = (np.cos(phi), np.sin(phi))
    em = (-np.sin(phi), np.cos(phi))

    hess = pressure_hessian_steady(sampler, p)
    u = sampler.velocity(p)
    gtg = _matmul22(_transpose22(grad), grad)
    m_nc = -hess + gtg
    m_wc = m_nc - curvature_term(chart, p, u)

    frob = np.sqrt(grad[0, 0] ** 2 + grad[0, 1] ** 2 + grad[1, 0] ** 2 + grad[1, 1] ** 2)
    degen = lam_s <= tol_degen_rel * (frob + 1e-300)
    degen |= np.broadcast_to(sampler.on_discontinuity(p), degen.shape)

    def codes(m):
        m_sym = rate_of_strain(m)
        xi_p = (ep[0] + em[0], ep[1] + em[1])
        xi_m = (ep[0] - em[0], ep[1] - em[1])
        m_scale = np.abs(m_sym[0, 0]) + np.abs(m_sym[1, 1]) + 2.0 * np.abs(m_sym[0, 1]) + 1e-300
        f_p = _snap(_quadratic_form(m_sym, xi_p), m_scale)
        f_m = _snap(_quadratic_form(m_sym, xi_m), m_scale)
        tr_m = m_sym[0, 0] + m_sym[1, 1]
        det_m = m_sym[0, 0] * m_sym[1, 1] - m_sym[0, 1] ** 2
        code = np.full(np.shape(f_p), ELLIPTIC, dtype=np.int8)
        code[(f_p >= threshold) & (f_m >= threshold)] = HYPERBOLIC
        code[(tr_m > 0.0) & (det_m > 0.0)] = STRONG_HYPERBOLIC
        code[degen] = DEGENERATE
        return code

    return ClassificationField(code_with=codes(m_wc), code_without=codes(m_nc))
