"""Kernel regression of a scalar response on a functional predictor.

The regression estimate at a curve x is the kernel-weighted average of
the responses, with weights driven by the quadrature L2 distance between
x and each sample curve. Bandwidths can be fixed or chosen by
leave-one-out cross-validation over a candidate grid anchored to the
pairwise-distance geometry of the data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .errors import EmptyNeighborhood
from .fpca import Sample
from .grid import Curve, Grid

__all__ = [
    "KernelSpec",
    "RegressionFit",
    "kernel_eval",
    "nw_estimate",
    "cv_bandwidth",
    "default_bandwidth_candidates",
    "pairwise_distances",
    "distances_to",
    "FunctionalKernelRegression",
]

KERNEL_FAMILIES = ("uniform", "triangular", "quadratic")


@dataclass(frozen=True)
class KernelSpec:
    """A nonnegative kernel, nonincreasing on its support [0, c].

    family : one of "uniform", "triangular", "quadratic".
    support_c : positive support radius c (default 1).
    """

    family: str = "quadratic"
    support_c: float = 1.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.support_c <= 0:
            raise ValueError("kernel support must be positive")

    def profile(self, u: np.ndarray) -> np.ndarray:
        """Vectorized evaluation for nonnegative scaled arguments."""
        u = np.asarray(u, dtype=float)
        c = self.support_c
        if self.family == "uniform":
            return (u <= c).astype(float)
        if self.family == "triangular":
            return np.maximum(0.0, 1.0 - u / c)
        return np.maximum(0.0, 1.0 - (u / c) ** 2)


def kernel_eval(kernel: KernelSpec, u: float) -> float:
    """Evaluate the kernel at a nonnegative scaled distance u."""
    if u < 0:
        raise ValueError("kernel argument must be nonnegative")
    return float(kernel.profile(u))


@dataclass(frozen=True)
class RegressionFit:
    """Frozen inputs of a kernel regression: sample, responses, kernel, bandwidth."""

    sample: Sample
    responses: np.ndarray
    kernel: KernelSpec
    bandwidth: float

    def __post_init__(self):
        responses = np.asarray(self.responses, dtype=float)
        if responses.ndim != 1 or len(responses) != self.sample.n:
            raise ValueError("responses must be one scalar per sample curve")
        if not np.all(np.isfinite(responses)):
            raise ValueError("responses must be finite")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        object.__setattr__(self, "responses", responses)


def _sq_norms(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (values * values) @ weights


def pairwise_distances(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """All quadrature L2 distances between rows of a curve matrix."""
    g = (values * weights) @ values.T
    s = np.diag(g)
    sq = s[:, None] + s[None, :] - 2.0 * g
    np.fill_diagonal(sq, 0.0)
    return np.sqrt(np.maximum(sq, 0.0))


def distances_to(values: np.ndarray, weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Quadrature L2 distances from each row of ``values`` to the curve ``x``."""
    diff = values - x
    return np.sqrt(np.maximum(_sq_norms(diff, weights), 0.0))


def nw_estimate(fit: RegressionFit, x: Curve) -> float:
    """Kernel-weighted average of the responses at evaluation point x.

    Raises :class:`EmptyNeighborhood` when no sample curve falls inside
    the kernel support, signalling a bandwidth too small for this point.
    """
    d = distances_to(fit.sample.values, fit.sample.grid.weights, x.values)
    w = fit.kernel.profile(d / fit.bandwidth)
    total = w.sum()
    if total <= 0.0:
        raise EmptyNeighborhood("no curve within kernel support of the evaluation point")
    return float(np.dot(w, fit.responses) / total)


def default_bandwidth_candidates(
    sample: Sample, n_candidates: int = 10
) -> np.ndarray:
    """Log-spaced bandwidths between the 1st and 50th percentile of pairwise distances."""
    d = pairwise_distances(sample.values, sample.grid.weights)
    iu = np.triu_indices(sample.n, k=1)
    dv = d[iu]
    lo = max(float(np.percentile(dv, 1)), 1e-12)
    hi = max(float(np.percentile(dv, 50)), lo * (1 + 1e-9))
    return np.geomspace(lo, hi, n_candidates)


def cv_bandwidth(sample: Sample, responses, kernel: KernelSpec, candidates) -> float:
    """Leave-one-out bandwidth selection over a candidate list.

    Each held-out curve is predicted from the others; curves whose
    leave-one-out neighborhood is empty contribute a penalty equal to the
    response variance, so every candidate gets a finite score. Ties go to
    the smaller bandwidth.
    """
    responses = np.asarray(responses, dtype=float)
    candidates = np.asarray(candidates, dtype=float)
    if candidates.size == 0:
        raise ValueError("candidate list must be nonempty")
    if np.any(candidates <= 0):
        raise ValueError("bandwidth candidates must be positive")

    d = pairwise_distances(sample.values, sample.grid.weights)
    penalty = float(np.var(responses))
    best_h = None
    best_score = np.inf
    for h in np.sort(candidates):
        w = kernel.profile(d / h)
        np.fill_diagonal(w, 0.0)
        denom = w.sum(axis=1)
        active = denom > 0.0
        preds = np.full(sample.n, np.nan)
        preds[active] = (w[active] @ responses) / denom[active]
        errs = np.where(active, (responses - preds) ** 2, penalty)
        score = float(errs.sum())
        if score < best_score:
            best_score = score
            best_h = float(h)
    return best_h


class FunctionalKernelRegression(BaseEstimator, RegressorMixin):
    """Scalar-on-function kernel regression with data-driven bandwidth.

    Parameters
    ----------
    kernel : {"uniform", "triangular", "quadratic"}, default="quadratic"
        Kernel family; all are nonincreasing on [0, support].
    support : float, default=1.0
        Kernel support radius.
    bandwidth : float or "auto", default="auto"
        Fixed bandwidth, or "auto" for leave-one-out selection.
    candidates : array-like, optional
        Bandwidth candidates for "auto". Defaults to 10 log-spaced values
        between the 1st and 50th percentile of pairwise curve distances.
    n_candidates : int, default=10
        Size of the default candidate grid.

    Attributes
    ----------
    bandwidth_ : float
        The bandwidth in use after fitting.
    fit_ : RegressionFit
        Frozen training inputs.
    grid_ : Grid
    """

    def __init__(
        self,
        kernel: str = "quadratic",
        support: float = 1.0,
        bandwidth="auto",
        candidates=None,
        n_candidates: int = 10,
    ):
        self.kernel = kernel
        self.support = support
        self.bandwidth = bandwidth
        self.candidates = candidates
        self.n_candidates = n_candidates

    def fit(self, X, y, *, grid: Grid | None = None):
        """Fit on curves X of shape (n, m) and responses y of shape (n,)."""
        sample = X if isinstance(X, Sample) else Sample(
            grid if grid is not None else Grid.uniform(np.atleast_2d(X).shape[1]),
            np.atleast_2d(np.asarray(X, dtype=float)),
        )
        y = np.asarray(y, dtype=float)
        spec = KernelSpec(self.kernel, self.support)
        if self.bandwidth == "auto":
            cands = (
                np.asarray(self.candidates, dtype=float)
                if self.candidates is not None
                else default_bandwidth_candidates(sample, self.n_candidates)
            )
            h = cv_bandwidth(sample, y, spec, cands)
        else:
            h = float(self.bandwidth)
        self.grid_ = sample.grid
        self.fit_ = RegressionFit(sample, y, spec, h)
        self.bandwidth_ = h
        return self

    def predict(self, X) -> np.ndarray:
        """Regression estimates at curves X of shape (n_eval, m)."""
        check_is_fitted(self, "fit_")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array(
            [nw_estimate(self.fit_, Curve(self.grid_, row)) for row in X]
        )

    def predict_curve(self, x: Curve) -> float:
        """Regression estimate at a single curve."""
        check_is_fitted(self, "fit_")
        return nw_estimate(self.fit_, x)
