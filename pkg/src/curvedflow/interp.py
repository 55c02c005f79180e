"""Periodic bicubic B-spline interpolation on uniform 2pi-periodic grids.

Cardinal interpolation: spline coefficients come from deconvolving the
cubic B-spline symbol (2 + cos(2 pi k / n)) / 3 in Fourier space, so the
spline reproduces grid values exactly and interpolates with O(h^4) error.
Used to sample solver velocity fields along particle paths; spectral point
evaluation is the exact (slow) reference.

Arrays are (ny, nx), row-major with y as the outer index.
"""

import numpy as np

from ._accel import USE_NUMBA, njit


def spline_coeffs(field):
    """B-spline coefficient array for a periodic (ny, nx) field."""
    ny, nx = field.shape
    bx = (2.0 + np.cos(2.0 * np.pi * np.fft.rfftfreq(nx))) / 3.0
    by = (2.0 + np.cos(2.0 * np.pi * np.fft.fftfreq(ny))) / 3.0
    f_hat = np.fft.rfft2(field)
    return np.fft.irfft2(f_hat / (by[:, None] * bx[None, :]), s=field.shape)


def _weights(f):
    f2 = f * f
    f3 = f2 * f
    return (
        (1.0 - 3.0 * f + 3.0 * f2 - f3) / 6.0,
        (4.0 - 6.0 * f2 + 3.0 * f3) / 6.0,
        (1.0 + 3.0 * f + 3.0 * f2 - 3.0 * f3) / 6.0,
        f3 / 6.0,
    )


def spline_eval(coeffs, x, y):
    """Evaluate the spline at (x, y) (scalars or arrays, any real values)."""
    ny, nx = coeffs.shape
    tx = np.asarray(x) * (nx / (2.0 * np.pi))
    ty = np.asarray(y) * (ny / (2.0 * np.pi))
    ix = np.floor(tx).astype(np.int64)
    iy = np.floor(ty).astype(np.int64)
    wx = _weights(tx - ix)
    wy = _weights(ty - iy)
    out = np.zeros(np.broadcast(tx, ty).shape)
    for a in range(4):
        row = (iy + a - 1) % ny
        acc = np.zeros_like(out)
        for b in range(4):
            col = (ix + b - 1) % nx
            acc += wx[b] * coeffs[row, col]
        out += wy[a] * acc
    return out


@njit(cache=True)
def spline_eval_scalar(coeffs, x, y):
    """Scalar spline evaluation (hot path inside trajectory kernels)."""
    ny, nx = coeffs.shape
    tx = x * (nx / (2.0 * np.pi))
    ty = y * (ny / (2.0 * np.pi))
    ix = int(np.floor(tx))
    iy = int(np.floor(ty))
    fx = tx - ix
    fy = ty - iy
    wx0 = (1.0 - fx) ** 3 / 6.0
    wx1 = (4.0 - 6.0 * fx * fx + 3.0 * fx**3) / 6.0
    wx2 = (1.0 + 3.0 * fx + 3.0 * fx * fx - 3.0 * fx**3) / 6.0
    wx3 = fx**3 / 6.0
    wy0 = (1.0 - fy) ** 3 / 6.0
    wy1 = (4.0 - 6.0 * fy * fy + 3.0 * fy**3) / 6.0
    wy2 = (1.0 + 3.0 * fy + 3.0 * fy * fy - 3.0 * fy**3) / 6.0
    wy3 = fy**3 / 6.0
    total = 0.0
    wys = (wy0, wy1, wy2, wy3)
    wxs = (wx0, wx1, wx2, wx3)
    for a in range(4):
        row = (iy + a - 1) % ny
        acc = 0.0
        for b in range(4):
            col = (ix + b - 1) % nx
            acc += wxs[b] * coeffs[row, col]
        total += wys[a] * acc
    return total


def spectral_eval(f_hat, shape, x, y):
    """Exact point evaluation of an rfft2 spectrum (reference oracle).

    O(nx*ny) per point; used in tests to bound the spline error.
    """
    ny, nx = shape
    kx = np.arange(nx // 2 + 1)
    ky = np.fft.fftfreq(ny, 1.0 / ny)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    # weight doubling for the implied negative-kx half, except kx = 0 and Nyquist
    wx = np.full(kx.shape, 2.0)
    wx[0] = 1.0
    if nx % 2 == 0:
        wx[-1] = 1.0
    ex = np.exp(1j * np.outer(x, kx)) * wx
    ey = np.exp(1j * np.outer(y, ky))
    vals = np.einsum("pk,pl,lk->p", ex, ey, f_hat, optimize=True)
    return vals.real / (nx * ny)
