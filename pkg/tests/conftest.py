"""Shared test oracles.

The symbolic oracle derives frame-component tensors from the metric alone
(Levi-Civita symbols via sympy differentiation, coordinate covariant
derivatives, frame conversion), independently of the package's closed-form
assembly, so agreement validates both routes.
"""

import numpy as np
import pytest
import sympy as sp


class SymbolicChartOracle:
    """Frame covariant calculus on a diagonal 2-D metric, by sympy.

    Given g11(x1,x2), g22(x1,x2) and frame velocity components u, v as
    sympy expressions, builds lambdified evaluators for the frame covariant
    gradient of the velocity and of the advective acceleration (hence the
    steady pressure Hessian), plus Christoffels and Gauss curvature.
    """

    def __init__(self, coords, g11, g22, u=None, v=None, scale_factors=None):
        x1, x2 = coords
        self.coords = coords
        g = sp.diag(g11, g22)
        ginv = sp.diag(1 / g11, 1 / g22)
        gamma = [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]
        for k in range(2):
            for i in range(2):
                for j in range(2):
                    expr = 0
                    for l in range(2):
                        expr += ginv[k, l] * (
                            sp.diff(g[i, l], coords[j])
                            + sp.diff(g[j, l], coords[i])
                            - sp.diff(g[i, j], coords[l])
                        )
                    gamma[k][i][j] = sp.simplify(expr / 2)
        self.gamma = gamma
        h = list(scale_factors) if scale_factors else [sp.sqrt(g11), sp.sqrt(g22)]
        self.h = h

        # Gauss curvature R1221 via the coordinate Riemann tensor:
        # R^1_{212} = d1 G^1_22 - d2 G^1_12 + G^1_1m G^m_22 - G^1_2m G^m_12
        r1_212 = sp.diff(gamma[0][2 - 1][2 - 1], x1) - sp.diff(gamma[0][0][1], x2)
        for m in range(2):
            r1_212 += gamma[0][0][m] * gamma[m][1][1] - gamma[0][1][m] * gamma[m][0][1]
        # <R(e1,e2)e2, e1> = g_11 R^1_{212} / (h1^2 h2^2) * h1^2 ... collapse:
        self.r1221_expr = sp.simplify(g11 * r1_212 / (g11 * g22))

        if u is not None:
            ucoord = [u / h[0], v / h[1]]  # contravariant coordinate components
            nabla = [[0, 0], [0, 0]]
            for i in range(2):
                for j in range(2):
                    expr = sp.diff(ucoord[i], coords[j])
                    for k in range(2):
                        expr += gamma[i][j][k] * ucoord[k]
                    nabla[i][j] = expr
            # frame components: (h_i / h_j) * coordinate (1,1) entries
            self.grad_frame_expr = [
                [h[i] / h[j] * nabla[i][j] for j in range(2)] for i in range(2)
            ]
            wcoord = [
                sum(ucoord[j] * sp.diff(ucoord[i], coords[j]) for j in range(2))
                + sum(
                    gamma[i][j][k] * ucoord[j] * ucoord[k]
                    for j in range(2)
                    for k in range(2)
                )
                for i in range(2)
            ]
            nabla_w = [[0, 0], [0, 0]]
            for i in range(2):
                for j in range(2):
                    expr = sp.diff(wcoord[i], coords[j])
                    for k in range(2):
                        expr += gamma[i][j][k] * wcoord[k]
                    nabla_w[i][j] = expr
            self.hess_frame_expr = [
                [-h[i] / h[j] * nabla_w[i][j] for j in range(2)] for i in range(2)
            ]
            self.grad_frame = sp.lambdify(coords, self.grad_frame_expr, "numpy")
            self.hess_frame = sp.lambdify(coords, self.hess_frame_expr, "numpy")

        self.r1221 = sp.lambdify(coords, self.r1221_expr, "numpy")
        flat = {}
        for k in range(2):
            for i in range(2):
                for j in range(i, 2):
                    flat[(k + 1, i + 1, j + 1)] = gamma[k][i][j]
        self.christoffel = {
            key: sp.lambdify(coords, expr, "numpy") for key, expr in flat.items()
        }


@pytest.fixture(scope="session")
def sphere_symbols():
    lam, mu = sp.symbols("lam mu", real=True)
    return (lam, mu), (1 - mu**2), 1 / (1 - mu**2)


@pytest.fixture(scope="session")
def torus_symbols():
    x, y = sp.symbols("x y", real=True)
    alpha = sp.Rational(9, 5)  # 1.8 exactly
    g = sp.exp(alpha * sp.sin(x) * sp.sin(y))
    return (x, y), g, g


@pytest.fixture(scope="session")
def disk_symbols():
    x, y = sp.symbols("x y", real=True)
    g = 4 / (1 - x**2 - y**2) ** 2
    return (x, y), g, g


@pytest.fixture(scope="session")
def sphere_oracle(sphere_symbols):
    coords, g11, g22 = sphere_symbols
    return SymbolicChartOracle(coords, g11, g22)


@pytest.fixture(scope="session")
def torus_oracle(torus_symbols):
    coords, g11, g22 = torus_symbols
    return SymbolicChartOracle(coords, g11, g22)


@pytest.fixture(scope="session")
def disk_oracle(disk_symbols):
    coords, g11, g22 = disk_symbols
    return SymbolicChartOracle(coords, g11, g22)


@pytest.fixture(scope="session")
def quadrupole_oracle(sphere_symbols):
    coords, g11, g22 = sphere_symbols
    lam, mu = coords
    r = sp.sqrt(1 - mu**2)
    u = mu * r * (sp.sqrt(5) / 2 - sp.sqrt(30) / 6 * sp.cos(2 * lam))
    v = sp.sqrt(30) / 6 * r * sp.sin(2 * lam)
    return SymbolicChartOracle(coords, g11, g22, u, v)


@pytest.fixture(scope="session")
def rigid_oracle(sphere_symbols):
    coords, g11, g22 = sphere_symbols
    mu = coords[1]
    c = sp.Rational(7, 10)
    return SymbolicChartOracle(coords, g11, g22, c * sp.sqrt(1 - mu**2), sp.Integer(0))


def rel_err(a, b):
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)
