"""Incompressible 2D Euler flow analysis on curved surfaces.

Strain-acceleration tensor with curvature term, Haller hyperbolic-domain
classification, closed-form sphere flows, a pseudo-spectral solver on a
conformally curved torus, Lagrangian diagnostics (FTLE, hyperbolicity time,
material-line energy), and the Poincaré-disk jet.
"""

__version__ = "0.1.0"

from .geometry import (
    Chart,
    ConformalTorusChart,
    DomainError,
    MetricData,
    PoincareDiskChart,
    SphereChart,
    curvature_at,
    geodesic_normal_step,
    metric_at,
)

__all__ = [
    "Chart",
    "ConformalTorusChart",
    "DomainError",
    "MetricData",
    "PoincareDiskChart",
    "SphereChart",
    "curvature_at",
    "geodesic_normal_step",
    "metric_at",
    "__version__",
]
