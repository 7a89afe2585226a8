"""Synthetic functional regression data with known ground truth.

Curves are synthesized from a Fourier eigenbasis with prescribed
eigenvalues and independent unit-variance scores, so projections, true
regression functionals and their analytic gradients are all available in
closed form. This powers every oracle test in the suite.

Randomness is drawn from numpy's seedable PCG64 generator; independent
streams are derived from (seed, purpose) seed sequences so the score
draws and the noise draws never overlap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fpca import Sample
from .grid import Curve, Grid

__all__ = [
    "fourier_basis",
    "ProcessSpec",
    "FunctionalSpec",
    "sample_process",
    "gen_response",
    "evaluate_functional",
    "true_gradient_component",
    "preset_eigenvalues",
    "NORM_MAPS",
]

SCORE_DISTS = ("gaussian", "uniform-symmetric")

_STREAM_SCORES = 0
_STREAM_NOISE = 1


def fourier_basis(grid: Grid, k: int) -> np.ndarray:
    """First k elements of the Fourier basis on [0, 1], one per row.

    Order: constant 1, then sqrt(2)*sin(2*pi*t), sqrt(2)*cos(2*pi*t),
    sqrt(2)*sin(4*pi*t), ... Orthonormal under the grid quadrature for
    frequencies well below the grid resolution.
    """
    t = grid.points
    rows = np.empty((k, len(grid)))
    rows[0] = 1.0
    for j in range(2, k + 1):
        freq = j // 2
        arg = 2.0 * np.pi * freq * t
        rows[j - 1] = np.sqrt(2.0) * (np.sin(arg) if j % 2 == 0 else np.cos(arg))
    return rows


@dataclass(frozen=True)
class ProcessSpec:
    """Curve-process definition: Fourier eigenbasis, eigenvalues, mean, scores.

    eigenvalues must be nonnegative and descending (zeros give a
    degenerate process whose draws collapse onto the mean); the basis
    size equals their count. ``mean`` defaults to the zero curve.
    ``score_dist`` picks the standardized score law (unit variance
    either way).
    """

    grid: Grid
    eigenvalues: np.ndarray
    mean: Curve | None = None
    score_dist: str = "gaussian"
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or len(ev) == 0:
            raise ValueError("eigenvalues must be a nonempty vector")
        if np.any(ev < 0) or np.any(np.diff(ev) > 0):
            raise ValueError("eigenvalues must be nonnegative and descending")
        if self.score_dist not in SCORE_DISTS:
            raise ValueError(f"unknown score distribution {self.score_dist!r}")
        if self.mean is not None and self.mean.grid != self.grid:
            raise ValueError("mean curve must live on the process grid")
        basis = fourier_basis(self.grid, len(ev))
        gram = (basis * self.grid.weights) @ basis.T
        if np.max(np.abs(gram - np.eye(len(ev)))) > 1e-6:
            raise ValueError(
                "basis not orthonormal on this grid; use a finer grid or fewer components"
            )
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "basis", basis)

    @property
    def n_basis(self) -> int:
        return len(self.eigenvalues)

    @property
    def mean_values(self) -> np.ndarray:
        if self.mean is None:
            return np.zeros(len(self.grid))
        return self.mean.values


def _draw_scores(spec: ProcessSpec, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([int(seed), _STREAM_SCORES])
    shape = (n, spec.n_basis)
    if spec.score_dist == "gaussian":
        return rng.standard_normal(shape)
    # symmetric uniform scaled to unit variance
    return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=shape)


def sample_process(spec: ProcessSpec, n: int, seed: int) -> Sample:
    """Draw n curves: mean plus the score-weighted eigenbasis expansion."""
    if n < 1:
        raise ValueError("n must be at least 1")
    eta = _draw_scores(spec, n, seed)
    amplitudes = eta * np.sqrt(spec.eigenvalues)
    values = spec.mean_values + amplitudes @ spec.basis
    return Sample(spec.grid, values)


@dataclass(frozen=True)
class FunctionalSpec:
    """A regression functional with an analytically known gradient.

    kind:
      - "linear": intercept plus the integral of slope times the curve.
      - "quadratic": quadratic form, over basis projections of the
        centered curve, with symmetric coefficient matrix ``quad_coeffs``.
      - "norm-nonlinear": scalar map applied to the squared distance of
        the curve from the process mean; ``norm_map_deriv`` must be the
        derivative of ``norm_map``.
    """

    kind: str
    intercept: float = 0.0
    slope: Curve | None = None
    quad_coeffs: np.ndarray | None = None
    norm_map: Callable[[float], float] | None = None
    norm_map_deriv: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "quadratic", "norm-nonlinear"):
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if self.kind == "linear" and self.slope is None:
            raise ValueError("linear functional needs a slope curve")
        if self.kind == "quadratic":
            w = np.asarray(self.quad_coeffs, dtype=float)
            if w.ndim != 2 or w.shape[0] != w.shape[1]:
                raise ValueError("quadratic coefficients must be a square matrix")
            if np.max(np.abs(w - w.T)) > 1e-12:
                raise ValueError("quadratic coefficients must be symmetric")
            object.__setattr__(self, "quad_coeffs", w)
        if self.kind == "norm-nonlinear" and (
            self.norm_map is None or self.norm_map_deriv is None
        ):
            raise ValueError("norm-nonlinear functional needs the map and its derivative")


def _centered_projections(x_values: np.ndarray, spec: ProcessSpec) -> np.ndarray:
    centered = x_values - spec.mean_values
    return (spec.basis * spec.grid.weights) @ centered


def evaluate_functional(fspec: FunctionalSpec, x_values, spec: ProcessSpec | None = None):
    """Evaluate the functional on one curve (shape (m,)) or many (shape (n, m))."""
    x_values = np.asarray(x_values, dtype=float)
    single = x_values.ndim == 1
    xs = np.atleast_2d(x_values)
    if fspec.kind == "linear":
        w = fspec.slope.grid.weights
        out = fspec.intercept + (xs * w) @ fspec.slope.values
    elif fspec.kind == "quadratic":
        if spec is None:
            raise ValueError("quadratic functional needs the process spec")
        k = fspec.quad_coeffs.shape[0]
        c = np.array([_centered_projections(row, spec)[:k] for row in xs])
        out = np.einsum("nk,kl,nl->n", c, fspec.quad_coeffs, c)
    else:
        if spec is None:
            raise ValueError("norm-nonlinear functional needs the process spec")
        centered = xs - spec.mean_values
        sq = (centered * centered) @ spec.grid.weights
        out = np.array([fspec.norm_map(s) for s in sq])
    return float(out[0]) if single else out


def gen_response(
    sample: Sample,
    fspec: FunctionalSpec,
    sigma: float,
    seed: int,
    process: ProcessSpec | None = None,
) -> np.ndarray:
    """Responses: functional value per curve plus centered Gaussian noise.

    ``process`` is required for the quadratic and norm-nonlinear kinds,
    whose evaluation needs the process mean and basis.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    g = evaluate_functional(fspec, sample.values, process)
    noise = np.random.default_rng([int(seed), _STREAM_NOISE]).standard_normal(sample.n)
    return g + sigma * noise


def true_gradient_component(
    fspec: FunctionalSpec, x: Curve, spec: ProcessSpec, j: int
) -> float:
    """Analytic gradient component along basis element j (1-based) at x.

    linear: integral of slope times basis element (constant in x).
    quadratic: twice the j-th row of the coefficient matrix applied to
    the centered projections of x. norm-nonlinear: twice the map's
    derivative at the squared centered norm times the j-th projection.
    """
    if not 1 <= j <= spec.n_basis:
        raise ValueError("component index out of range for the process basis")
    if fspec.kind == "linear":
        w = spec.grid.weights
        return float((fspec.slope.values * w) @ spec.basis[j - 1])
    c = _centered_projections(x.values, spec)
    if fspec.kind == "quadratic":
        k = fspec.quad_coeffs.shape[0]
        if j > k:
            return 0.0
        return float(2.0 * fspec.quad_coeffs[j - 1] @ c[:k])
    centered = x.values - spec.mean_values
    sq = float((centered * centered) @ spec.grid.weights)
    return float(2.0 * fspec.norm_map_deriv(sq) * c[j - 1])


NORM_MAPS: dict[str, tuple[Callable[[float], float], Callable[[float], float]]] = {
    "identity": (lambda s: s, lambda s: 1.0),
    "sqrt": (lambda s: np.sqrt(s), lambda s: 0.5 / np.sqrt(s)),
    "log1p": (lambda s: np.log1p(s), lambda s: 1.0 / (1.0 + s)),
    "sin": (lambda s: np.sin(s), lambda s: np.cos(s)),
}

_EXP_PRESET = re.compile(r"^expdecay-b(?P<B>\d+(?:\.\d+)?)-beta(?P<beta>\d+(?:\.\d+)?)$")
_POLY_PRESET = re.compile(r"^poly-a(?P<a>\d+(?:\.\d+)?)$")


def preset_eigenvalues(name: str, k: int) -> np.ndarray:
    """Named eigenvalue families for the command line.

    ``expdecay-b{B}-beta{beta}`` gives exp(-B * j**beta); ``poly-a{a}``
    gives j**(-a). Both are evaluated at j = 1..k.
    """
    j = np.arange(1, k + 1, dtype=float)
    m = _EXP_PRESET.match(name)
    if m:
        return np.exp(-float(m.group("B")) * j ** float(m.group("beta")))
    m = _POLY_PRESET.match(name)
    if m:
        return j ** (-float(m.group("a")))
    raise ValueError(
        f"unknown preset {name!r}; expected expdecay-b<B>-beta<beta> or poly-a<a>"
    )
