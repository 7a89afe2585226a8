"""Discretized functions on [0, 1] with quadrature-based geometry.

A curve is a vector of values on a shared grid of abscissae in [0, 1].
Inner products and norms use composite-trapezoid quadrature, so they
approximate the corresponding integrals; the trapezoid rule is exact for
piecewise-linear curves and works on non-uniform grids.
"""

from __future__ import annotations

import numpy as np

from .errors import GridMismatch

__all__ = ["Grid", "Curve", "inner_product", "l2_norm", "axpy", "trapezoid_weights"]


def trapezoid_weights(points: np.ndarray) -> np.ndarray:
    """Composite-trapezoid quadrature weights for ordered abscissae."""
    points = np.asarray(points, dtype=float)
    w = np.empty_like(points)
    w[0] = (points[1] - points[0]) / 2.0
    w[-1] = (points[-1] - points[-2]) / 2.0
    if len(points) > 2:
        w[1:-1] = (points[2:] - points[:-2]) / 2.0
    return w


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.flags.writeable = False
    return a


class Grid:
    """Ordered abscissae in [0, 1] plus positive quadrature weights.

    Parameters
    ----------
    points : array-like of shape (m,)
        Strictly increasing, first >= 0, last <= 1, m >= 2.
    weights : array-like of shape (m,), optional
        Quadrature weights. Defaults to composite-trapezoid weights.
        Must be positive and sum to the grid span within 1e-12.
    """

    def __init__(self, points, weights=None):
        points = _readonly(np.array(points, dtype=float))
        if points.ndim != 1 or len(points) < 2:
            raise ValueError("grid needs at least two 1-d points")
        if not np.all(np.isfinite(points)):
            raise ValueError("grid points must be finite")
        if np.any(np.diff(points) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if points[0] < 0.0 or points[-1] > 1.0:
            raise ValueError("grid points must lie in [0, 1]")
        if weights is None:
            weights = trapezoid_weights(points)
        weights = _readonly(np.array(weights, dtype=float))
        if weights.shape != points.shape:
            raise ValueError("weights must match points in length")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        span = points[-1] - points[0]
        if abs(weights.sum() - span) > 1e-12:
            raise ValueError("quadrature weights must sum to the grid span")
        self.points = points
        self.weights = weights

    @classmethod
    def uniform(cls, m: int) -> "Grid":
        """Uniform grid of m points spanning [0, 1]."""
        return cls(np.linspace(0.0, 1.0, m))

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Grid):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.weights, other.weights
        )

    def __repr__(self) -> str:
        return f"Grid(m={len(self)}, span=[{self.points[0]:g}, {self.points[-1]:g}])"


class Curve:
    """A function sampled on a :class:`Grid`.

    Values must be finite and match the grid length. Instances are
    immutable and safe to share across threads.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        values = _readonly(np.array(values, dtype=float))
        if values.shape != grid.points.shape:
            raise ValueError("curve values must match the grid length")
        if not np.all(np.isfinite(values)):
            raise ValueError("curve values must be finite")
        self.grid = grid
        self.values = values

    def __repr__(self) -> str:
        return f"Curve(m={len(self.grid)})"


def _require_same_grid(f: Curve, g: Curve) -> Grid:
    if f.grid is not g.grid and f.grid != g.grid:
        raise GridMismatch("curves live on different grids")
    return f.grid


def inner_product(f: Curve, g: Curve) -> float:
    """Quadrature approximation of the integral of f*g over [0, 1].

    Symmetric and bilinear; raises :class:`GridMismatch` when the curves
    do not share a grid.
    """
    grid = _require_same_grid(f, g)
    return float(np.dot(grid.weights, f.values * g.values))


def l2_norm(f: Curve) -> float:
    """Quadrature L2 norm, sqrt(inner_product(f, f))."""
    sq = np.dot(f.grid.weights, f.values * f.values)
    return float(np.sqrt(max(sq, 0.0)))


def axpy(a: float, x: Curve, y: Curve) -> Curve:
    """Pointwise a*x + y on the shared grid."""
    grid = _require_same_grid(x, y)
    return Curve(grid, a * x.values + y.values)
