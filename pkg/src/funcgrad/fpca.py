"""Functional principal component analysis on densely sampled curves.

Estimates the mean curve, the empirical covariance surface, its
eigendecomposition under the grid quadrature, and per-curve component
scores. Eigenfunctions come out orthonormal with respect to the
quadrature inner product (not the plain Euclidean dot product), which is
what makes score covariances reproduce the eigenvalues exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import (
    AsymmetricMatrix,
    DegenerateSpectrum,
    EmptySample,
    GridMismatch,
    InsufficientSample,
)
from .grid import Curve, Grid

__all__ = [
    "Sample",
    "EigenSystem",
    "mean_function",
    "empirical_covariance",
    "eigendecompose",
    "scores",
    "select_components",
    "fit_eigensystem",
    "FunctionalPCA",
]


class Sample:
    """A set of n curves sharing one grid.

    Parameters
    ----------
    grid : Grid
        Shared abscissae and quadrature weights.
    values : array-like of shape (n, m)
        Curve values, one row per curve.
    ids : sequence of str, optional
        Labels, one per curve.
    time_range : (float, float), optional
        Original time span before rescaling onto [0, 1]; kept as metadata.
    """

    def __init__(self, grid: Grid, values, ids=None, time_range=None):
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[1] != len(grid):
            raise ValueError("curve values must match the grid length")
        if not np.all(np.isfinite(values)):
            raise ValueError("curve values must be finite")
        if ids is not None:
            ids = [str(i) for i in ids]
            if len(ids) != values.shape[0]:
                raise ValueError("ids must match the number of curves")
        self.grid = grid
        self.values = values
        self.values.flags.writeable = False
        self.ids = ids
        self.time_range = tuple(time_range) if time_range is not None else None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def curves(self) -> list[Curve]:
        return [Curve(self.grid, row) for row in self.values]

    def curve(self, i: int) -> Curve:
        return Curve(self.grid, self.values[i])

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class EigenSystem:
    """Spectral summary of a curve sample.

    Fields
    ------
    grid : shared grid of all member curves.
    mean : mean curve, or None when produced from a bare covariance matrix.
    eigenvalues : (K,) descending, nonnegative.
    eigenfunctions : (K, m) rows orthonormal under the grid quadrature.
    scores : (n, K) per-curve projections of centered curves, or None.
    fve : (K,) cumulative fraction of total variance explained.
    """

    grid: Grid
    mean: Curve | None
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    scores: np.ndarray | None
    fve: np.ndarray

    @property
    def n_components(self) -> int:
        return len(self.eigenvalues)

    def eigenfunction(self, j: int) -> Curve:
        """The j-th eigenfunction (1-based) as a curve."""
        return Curve(self.grid, self.eigenfunctions[j - 1])

    def flip_sign(self, j: int) -> "EigenSystem":
        """Copy with the sign of component j (1-based) reversed.

        Flips the eigenfunction and its score column together so the
        system stays internally consistent.
        """
        ef = self.eigenfunctions.copy()
        ef[j - 1] = -ef[j - 1]
        sc = None
        if self.scores is not None:
            sc = self.scores.copy()
            sc[:, j - 1] = -sc[:, j - 1]
        return replace(self, eigenfunctions=ef, scores=sc)


def mean_function(sample: Sample) -> Curve:
    """Pointwise arithmetic mean of the sample curves."""
    if sample.n == 0:
        raise EmptySample("cannot average an empty sample")
    return Curve(sample.grid, sample.values.mean(axis=0))


def empirical_covariance(sample: Sample) -> np.ndarray:
    """Empirical covariance surface on the grid, with divisor n.

    Returns the m x m matrix of centered cross-products averaged over
    curves. Symmetric positive semidefinite by construction.
    """
    if sample.n < 2:
        raise InsufficientSample("covariance estimation needs at least two curves")
    centered = sample.values - sample.values.mean(axis=0)
    return centered.T @ centered / sample.n


def _apply_sign_convention(eigenfunctions: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # Each row gets a deterministic orientation: positive integral, or if the
    # integral is ~0, a positive entry at the location of largest magnitude.
    out = eigenfunctions.copy()
    for row in out:
        s = float(weights @ row)
        if s > 1e-10:
            continue
        if s < -1e-10:
            row *= -1.0
            continue
        k = int(np.argmax(np.abs(row)))
        if row[k] < 0:
            row *= -1.0
    return out


def eigendecompose(cov: np.ndarray, grid: Grid, max_components: int) -> EigenSystem:
    """Eigenpairs of the integral operator with kernel ``cov`` under the grid quadrature.

    Solves the weighted problem by symmetrizing with the square root of
    the quadrature weights and back-scaling the eigenvectors, so the
    returned eigenfunctions are orthonormal in the quadrature inner
    product and applying the discretized operator to eigenfunction j
    reproduces eigenvalue j times that eigenfunction.

    Tiny negative eigenvalues (within -1e-10 of zero, relative to the
    spectral scale) are clamped to 0; anything more negative raises.
    The result carries no mean and no scores.
    """
    cov = np.asarray(cov, dtype=float)
    m = len(grid)
    if cov.shape != (m, m):
        raise ValueError("covariance matrix must be m x m for an m-point grid")
    if np.max(np.abs(cov - cov.T)) > 1e-10:
        raise AsymmetricMatrix("covariance matrix is not symmetric")
    if not 1 <= max_components <= m:
        raise ValueError("max_components must be between 1 and the grid size")

    sw = np.sqrt(grid.weights)
    sym = sw[:, None] * cov * sw[None, :]
    sym = (sym + sym.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1]

    tol = 1e-10 * max(1.0, float(vals[0]) if len(vals) else 1.0)
    if np.any(vals < -tol):
        raise ValueError("covariance matrix is not positive semidefinite")
    vals[vals < 0.0] = 0.0

    eigenfunctions = (vecs / sw[:, None]).T  # rows are eigenfunctions
    eigenfunctions = _apply_sign_convention(eigenfunctions, grid.weights)

    total = float(vals.sum())
    kept = vals[:max_components]
    fve = np.cumsum(kept) / total if total > 0 else np.zeros(max_components)
    return EigenSystem(
        grid=grid,
        mean=None,
        eigenvalues=kept,
        eigenfunctions=eigenfunctions[:max_components],
        scores=None,
        fve=fve,
    )


def scores(sample: Sample, eig: EigenSystem) -> np.ndarray:
    """Project centered sample curves onto the eigenfunctions.

    Entry (i, j) is the quadrature inner product of curve i minus the
    mean with eigenfunction j.
    """
    if eig.mean is None:
        raise ValueError("eigen system carries no mean curve; attach one first")
    if sample.grid is not eig.grid and sample.grid != eig.grid:
        raise GridMismatch("sample and eigen system live on different grids")
    centered = sample.values - eig.mean.values
    return (centered * eig.grid.weights) @ eig.eigenfunctions.T


def select_components(eigenvalues, fve_threshold: float) -> int:
    """Smallest K whose cumulative variance share reaches the threshold."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if not 0.0 < fve_threshold <= 1.0:
        raise ValueError("fve_threshold must be in (0, 1]")
    total = float(eigenvalues.sum())
    if total <= 0.0:
        raise DegenerateSpectrum("all eigenvalues are zero")
    frac = np.cumsum(eigenvalues) / total
    # 1e-12 slack so thresholds like 0.995 are met when the share is exact
    # up to floating-point rounding.
    hits = np.nonzero(frac + 1e-12 >= fve_threshold)[0]
    return int(hits[0]) + 1


def fit_eigensystem(
    sample: Sample,
    fve_threshold: float = 0.995,
    n_components: int | None = None,
) -> EigenSystem:
    """Full pipeline: mean, covariance, eigendecomposition, truncation, scores.

    ``n_components`` overrides the variance-fraction rule when given.
    """
    mean = mean_function(sample)
    cov = empirical_covariance(sample)
    full = eigendecompose(cov, sample.grid, max_components=sample.m)
    if n_components is None:
        n_components = select_components(full.eigenvalues, fve_threshold)
    eig = replace(
        full,
        mean=mean,
        eigenvalues=full.eigenvalues[:n_components],
        eigenfunctions=full.eigenfunctions[:n_components],
        fve=full.fve[:n_components],
    )
    return replace(eig, scores=scores(sample, eig))


class FunctionalPCA(BaseEstimator, TransformerMixin):
    """Principal component decomposition of curve samples.

    Fits the mean curve and the eigenfunctions of the empirical
    covariance operator, then represents curves by their component
    scores.

    Parameters
    ----------
    n_components : int, optional
        Fixed number of components. When None, the count is chosen as the
        smallest K explaining at least ``fve_threshold`` of total variance.
    fve_threshold : float, default=0.995
        Cumulative fraction-of-variance target used when ``n_components``
        is None.

    Attributes
    ----------
    grid_ : Grid
        Grid shared by the training curves.
    eigensystem_ : EigenSystem
        Full fitted decomposition (mean, eigenpairs, scores, FVE).
    mean_ : ndarray of shape (m,)
        Mean curve values.
    eigenvalues_ : ndarray of shape (K,)
    eigenfunctions_ : ndarray of shape (K, m)
    scores_ : ndarray of shape (n, K)
        Scores of the training curves.
    fve_ : ndarray of shape (K,)
        Cumulative variance fractions.
    n_components_ : int
    """

    def __init__(self, n_components: int | None = None, fve_threshold: float = 0.995):
        self.n_components = n_components
        self.fve_threshold = fve_threshold

    def fit(self, X, y=None, *, grid: Grid | None = None):
        """Fit on curves X of shape (n, m); ``grid`` defaults to uniform [0, 1]."""
        sample = self._as_sample(X, grid)
        eig = fit_eigensystem(sample, self.fve_threshold, self.n_components)
        self.grid_ = sample.grid
        self.eigensystem_ = eig
        self.mean_ = eig.mean.values
        self.eigenvalues_ = eig.eigenvalues
        self.eigenfunctions_ = eig.eigenfunctions
        self.scores_ = eig.scores
        self.fve_ = eig.fve
        self.n_components_ = eig.n_components
        return self

    def transform(self, X) -> np.ndarray:
        """Score new curves against the fitted mean and eigenfunctions."""
        check_is_fitted(self, "eigensystem_")
        sample = self._as_sample(X, self.grid_)
        return scores(sample, self.eigensystem_)

    def inverse_transform(self, S) -> np.ndarray:
        """Reconstruct curve values from component scores."""
        check_is_fitted(self, "eigensystem_")
        S = np.atleast_2d(np.asarray(S, dtype=float))
        return self.mean_ + S @ self.eigenfunctions_

    @staticmethod
    def _as_sample(X, grid: Grid | None) -> Sample:
        if isinstance(X, Sample):
            return X
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if grid is None:
            grid = Grid.uniform(X.shape[1])
        return Sample(grid, X)
