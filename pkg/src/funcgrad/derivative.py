"""Gradient-field estimation for scalar-on-function regression.

The gradient of the regression functional at a curve x is expanded in
the eigenfunctions of the predictor covariance. Each component is
estimated from response differences of curve pairs that (a) both lie
near x and (b) differ essentially along the target eigenfunction, as
measured by a misalignment statistic. Ratios of response differences to
score differences over such pairs act as directional difference
quotients.

All pair sums run over ordered pairs whose score difference along the
target eigenfunction is strictly positive, so each unordered pair enters
in exactly one orientation and ties contribute nothing. Components whose
pair neighborhood is empty are reported as absent, never as zero: a zero
component is a meaningful statement (a flat direction), absence is lack
of data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import (
    EmptyPairNeighborhood,
    InvalidDirection,
    MissingComponent,
    ZeroDifference,
    ZeroGradient,
)
from .fpca import EigenSystem, Sample, fit_eigensystem
from .grid import Curve, Grid, inner_product, l2_norm
from .regression import KernelSpec, distances_to

__all__ = [
    "DerivBandwidths",
    "DerivativeEstimate",
    "misalignment",
    "pair_weight",
    "gradient_component",
    "gradient_at",
    "directional_derivative",
    "steepest_direction",
    "derivative_generating_function",
    "default_h1",
    "default_h2",
    "FunctionalGradientEstimator",
]

_DENOM_GUARD = 1e-12


@dataclass(frozen=True)
class DerivBandwidths:
    """Bandwidth pair for gradient-component estimation.

    h1 gates how close both curves of a pair must be to the evaluation
    point (L2-norm units); h2 gates how well the pair's difference must
    align with the target eigenfunction (dimensionless, in (0, 1] since
    the misalignment statistic lives in [0, 1]).
    """

    h1: float
    h2: float

    def __post_init__(self):
        if self.h1 <= 0:
            raise ValueError("h1 must be positive")
        if not 0.0 < self.h2 <= 1.0:
            raise ValueError("h2 must lie in (0, 1]")


@dataclass(frozen=True)
class DerivativeEstimate:
    """Estimated gradient components at one evaluation point.

    coeffs[j] is the component along eigenfunction j+1; entries are NaN
    where the component is absent (no usable pairs). pair_counts records
    how many ordered pairs carried positive weight per component.
    """

    at: Curve
    coeffs: np.ndarray
    pair_counts: np.ndarray
    eig: EigenSystem

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        counts = np.asarray(self.pair_counts, dtype=int)
        if coeffs.shape != counts.shape:
            raise ValueError("coeffs and pair_counts must have equal length")
        if np.any(np.isfinite(coeffs) != (counts > 0)):
            raise ValueError("absent components must have pair_count 0 and NaN value")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "pair_counts", counts)

    @property
    def n_components(self) -> int:
        return len(self.coeffs)

    @property
    def absent(self) -> np.ndarray:
        """Boolean mask of components with no usable pair data."""
        return ~np.isfinite(self.coeffs)


def misalignment(diff: Curve, psi: Curve) -> float:
    """Fraction of a difference curve's energy orthogonal to a unit direction.

    Returns 1 - <diff, psi>^2 / ||diff||^2, clamped into [0, 1]. Zero
    means the difference points exactly along psi; one means it is
    orthogonal. ``psi`` must be unit-norm for the energy reading to hold.
    """
    nsq = l2_norm(diff) ** 2
    if nsq <= 0.0:
        raise ZeroDifference("difference curve is zero; alignment undefined")
    q = 1.0 - inner_product(diff, psi) ** 2 / nsq
    return float(min(max(q, 0.0), 1.0))


def pair_weight(
    x: Curve,
    xi1: Curve,
    xi2: Curve,
    psi_j: Curve,
    bw: DerivBandwidths,
    kernel: KernelSpec,
) -> float:
    """Weight of a curve pair for one gradient component.

    Product of three kernel factors: proximity of each pair member to x
    (scaled by h1) and the pair's misalignment with psi_j (scaled by h2).
    Vanishes as soon as either curve leaves the h1 ball around x or the
    pair is too poorly aligned.
    """
    diff = Curve(x.grid, xi1.values - xi2.values)
    q = misalignment(diff, psi_j)  # raises ZeroDifference for identical curves
    d1 = l2_norm(Curve(x.grid, x.values - xi1.values))
    d2 = l2_norm(Curve(x.grid, x.values - xi2.values))
    return float(
        kernel.profile(d1 / bw.h1)
        * kernel.profile(d2 / bw.h1)
        * kernel.profile(q / bw.h2)
    )


def _pair_tables(x_values, j, sample, eig):
    """Score differences, squared pair distances, and distances to x for one component."""
    w = sample.grid.weights
    sc = eig.scores[:, j - 1]
    diff_scores = sc[:, None] - sc[None, :]
    g = (sample.values * w) @ sample.values.T
    s = np.diag(g)
    pair_sq = np.maximum(s[:, None] + s[None, :] - 2.0 * g, 0.0)
    d_to_x = distances_to(sample.values, w, x_values)
    return diff_scores, pair_sq, d_to_x


def _component_sums(x_values, j, sample, responses, eig, bw, kernel):
    diff_scores, pair_sq, d_to_x = _pair_tables(x_values, j, sample, eig)
    kd = kernel.profile(d_to_x / bw.h1)

    mask = diff_scores > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1.0 - diff_scores**2 / pair_sq
    q = np.clip(q, 0.0, 1.0)
    weights = kd[:, None] * kd[None, :] * kernel.profile(q / bw.h2)
    weights = np.where(mask, weights, 0.0)

    resp_diff = responses[:, None] - responses[None, :]
    numer = float(np.sum(resp_diff * weights))
    denom = float(np.sum(diff_scores * weights))
    count = int(np.count_nonzero(weights > 0.0))
    return numer, denom, count


def gradient_component(
    x: Curve,
    j: int,
    sample: Sample,
    responses,
    eig: EigenSystem,
    bw: DerivBandwidths,
    kernel: KernelSpec,
) -> tuple[float, int]:
    """Estimate the gradient component along eigenfunction j (1-based) at x.

    Ratio of pair-weighted response differences to pair-weighted score
    differences over ordered pairs with strictly positive score
    difference. Returns the estimate together with the number of pairs
    that carried positive weight.

    Raises :class:`EmptyPairNeighborhood` when no pair carries weight or
    the denominator falls under the numerical guard, which signals
    bandwidths too small for this evaluation point.
    """
    if not 1 <= j <= eig.n_components:
        raise ValueError("component index out of range")
    responses = np.asarray(responses, dtype=float)
    numer, denom, count = _component_sums(
        x.values, j, sample, responses, eig, bw, kernel
    )
    if count == 0 or denom <= _DENOM_GUARD:
        raise EmptyPairNeighborhood(
            f"no informative pairs for component {j} at this point"
        )
    return numer / denom, count


def default_h1(sample: Sample, eig: EigenSystem, q1: float = 0.5) -> float:
    """Proximity bandwidth: the q1-quantile of curve distances to the mean."""
    d = distances_to(sample.values, sample.grid.weights, eig.mean.values)
    h = float(np.quantile(d, q1))
    if h <= 0:
        raise ValueError("degenerate sample: curves coincide with the mean")
    return h


def default_h2(
    x: Curve,
    j: int,
    sample: Sample,
    eig: EigenSystem,
    h1: float,
    kernel: KernelSpec,
    q2: float = 0.25,
) -> float:
    """Alignment bandwidth: a quantile of misalignment values over gated pairs.

    Considers ordered pairs with positive score difference along
    component j whose members both sit within the kernel support around
    x, and takes the q2-quantile of their misalignment statistics. Falls
    back to 1.0 (no alignment gating) when no pair passes the proximity
    gate, and is floored away from zero so perfectly aligned pairs keep
    positive weight.
    """
    diff_scores, pair_sq, d_to_x = _pair_tables(x.values, j, sample, eig)
    inside = d_to_x <= kernel.support_c * h1
    mask = (diff_scores > 0.0) & inside[:, None] & inside[None, :]
    if not mask.any():
        return 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1.0 - diff_scores**2 / pair_sq
    qv = np.clip(q[mask], 0.0, 1.0)
    return float(min(max(np.quantile(qv, q2), 1e-9), 1.0))


def gradient_at(
    x: Curve,
    sample: Sample,
    responses,
    eig: EigenSystem,
    bw: DerivBandwidths,
    kernel: KernelSpec,
    components: int,
) -> DerivativeEstimate:
    """Estimate the first ``components`` gradient components at x.

    Components with an empty pair neighborhood are recorded as absent
    (NaN coefficient, zero pair count) rather than raising; absence is
    data, not failure.
    """
    if not 1 <= components <= eig.n_components:
        raise ValueError("components out of range for the eigen system")
    responses = np.asarray(responses, dtype=float)
    coeffs = np.full(components, np.nan)
    counts = np.zeros(components, dtype=int)
    for j in range(1, components + 1):
        try:
            coeffs[j - 1], counts[j - 1] = gradient_component(
                x, j, sample, responses, eig, bw, kernel
            )
        except EmptyPairNeighborhood:
            pass
    return DerivativeEstimate(at=x, coeffs=coeffs, pair_counts=counts, eig=eig)


def directional_derivative(est: DerivativeEstimate, e_coeffs) -> float:
    """Derivative along a unit direction given by eigenfunction coefficients.

    The direction must be unit-norm (coefficients squared summing to 1
    within 1e-8) and may not put weight on an absent component.
    """
    e = np.asarray(e_coeffs, dtype=float)
    if e.ndim != 1 or len(e) > est.n_components:
        raise InvalidDirection("direction has more coefficients than components")
    if abs(float(e @ e) - 1.0) > 1e-8:
        raise InvalidDirection("direction coefficients must be unit-norm")
    touched = est.absent[: len(e)] & (e != 0.0)
    if touched.any():
        raise MissingComponent("direction uses a component with no estimate")
    terms = np.where(e != 0.0, e * est.coeffs[: len(e)], 0.0)
    return float(terms.sum())


def steepest_direction(est: DerivativeEstimate) -> np.ndarray:
    """Unit coefficient vector along which the response climbs fastest.

    The search is restricted to the available (non-absent) components;
    absent positions get coefficient zero. Within that span the
    maximizer of the absolute directional derivative is the normalized
    coefficient vector itself.
    """
    available = ~est.absent
    if not available.any():
        raise MissingComponent("no component estimates available")
    g = np.where(available, est.coeffs, 0.0)
    norm = float(np.sqrt(g @ g))
    if norm <= 0.0:
        raise ZeroGradient("gradient vanishes here: a stationary point of the truncated span")
    return g / norm


def derivative_generating_function(est: DerivativeEstimate, components: int) -> Curve:
    """Combine gradient components into a single curve.

    Returns the sum of coefficient times eigenfunction over the first
    ``components`` components; the quadrature inner product of the result
    with any unit direction in the truncated span reproduces the
    directional derivative along it.
    """
    if not 1 <= components <= est.n_components:
        raise ValueError("components out of range for the estimate")
    if est.absent[:components].any():
        raise MissingComponent("cannot build the generating function over absent components")
    values = est.coeffs[:components] @ est.eig.eigenfunctions[:components]
    return Curve(est.eig.grid, values)


class FunctionalGradientEstimator(BaseEstimator):
    """Gradient field of a scalar-on-function regression.

    Fits a principal component decomposition of the predictor curves,
    then estimates gradient components at arbitrary evaluation curves
    from locally aligned curve pairs.

    Parameters
    ----------
    n_components : int, optional
        Number of gradient components. Defaults to the count selected by
        ``fve_threshold`` on the predictor decomposition.
    fve_threshold : float, default=0.995
        Variance-fraction target for the component count.
    kernel : {"uniform", "triangular", "quadratic"}, default="quadratic"
    support : float, default=1.0
        Kernel support radius.
    h1 : float or "auto", default="auto"
        Proximity bandwidth; "auto" anchors it to the q1-quantile of
        curve distances to the mean.
    h2 : float or "auto", default="auto"
        Alignment bandwidth; "auto" adapts per evaluation point and
        component to the q2-quantile of gated misalignment values.
    q1, q2 : float, defaults 0.5 and 0.25
        Quantiles used by the automatic bandwidth rules.

    Attributes
    ----------
    eigensystem_ : EigenSystem
        Decomposition of the training curves.
    sample_ : Sample
    responses_ : ndarray of shape (n,)
    h1_ : float
        Resolved proximity bandwidth.
    """

    def __init__(
        self,
        n_components: int | None = None,
        fve_threshold: float = 0.995,
        kernel: str = "quadratic",
        support: float = 1.0,
        h1="auto",
        h2="auto",
        q1: float = 0.5,
        q2: float = 0.25,
    ):
        self.n_components = n_components
        self.fve_threshold = fve_threshold
        self.kernel = kernel
        self.support = support
        self.h1 = h1
        self.h2 = h2
        self.q1 = q1
        self.q2 = q2

    def fit(self, X, y, *, grid: Grid | None = None):
        """Fit on curves X of shape (n, m) and responses y of shape (n,)."""
        sample = X if isinstance(X, Sample) else Sample(
            grid if grid is not None else Grid.uniform(np.atleast_2d(X).shape[1]),
            np.atleast_2d(np.asarray(X, dtype=float)),
        )
        y = np.asarray(y, dtype=float)
        if y.ndim != 1 or len(y) != sample.n:
            raise ValueError("responses must be one scalar per curve")
        eig = fit_eigensystem(sample, self.fve_threshold, self.n_components)
        self.sample_ = sample
        self.responses_ = y
        self.eigensystem_ = eig
        self.kernel_ = KernelSpec(self.kernel, self.support)
        self.h1_ = (
            default_h1(sample, eig, self.q1) if self.h1 == "auto" else float(self.h1)
        )
        return self

    def bandwidths_for(self, x: Curve, j: int) -> DerivBandwidths:
        """Resolved bandwidth pair for component j at evaluation point x."""
        check_is_fitted(self, "eigensystem_")
        h2 = (
            default_h2(
                x, j, self.sample_, self.eigensystem_, self.h1_, self.kernel_, self.q2
            )
            if self.h2 == "auto"
            else float(self.h2)
        )
        return DerivBandwidths(self.h1_, h2)

    def gradient_at(self, x, components: int | None = None) -> DerivativeEstimate:
        """Gradient estimate at one evaluation curve (array of shape (m,) or Curve)."""
        check_is_fitted(self, "eigensystem_")
        eig = self.eigensystem_
        if not isinstance(x, Curve):
            x = Curve(self.sample_.grid, np.asarray(x, dtype=float))
        k = components if components is not None else eig.n_components
        if not 1 <= k <= eig.n_components:
            raise ValueError("components out of range for the fitted decomposition")
        coeffs = np.full(k, np.nan)
        counts = np.zeros(k, dtype=int)
        for j in range(1, k + 1):
            bw = self.bandwidths_for(x, j)
            try:
                coeffs[j - 1], counts[j - 1] = gradient_component(
                    x, j, self.sample_, self.responses_, eig, bw, self.kernel_
                )
            except EmptyPairNeighborhood:
                pass
        return DerivativeEstimate(at=x, coeffs=coeffs, pair_counts=counts, eig=eig)

    def gradient_field(self, X=None, components: int | None = None) -> list[DerivativeEstimate]:
        """Gradient estimates at each row of X (default: the training curves)."""
        check_is_fitted(self, "eigensystem_")
        values = self.sample_.values if X is None else np.atleast_2d(
            np.asarray(X, dtype=float)
        )
        return [self.gradient_at(row, components) for row in values]

    def gradient_at_mean(self, components: int | None = None) -> DerivativeEstimate:
        """Gradient estimate at the fitted mean curve."""
        check_is_fitted(self, "eigensystem_")
        return self.gradient_at(self.eigensystem_.mean.values, components)
