"""Small-ball probabilities of curve processes with fast-decaying spectra.

For processes whose eigenvalues decay exponentially in j and whose
standardized scores have a density positive near zero, the probability
that the process norm falls below u admits a closed-form asymptotic
envelope as u shrinks, and the attainable mean-square regression rate
decays more slowly than any power of the sample size. This module
evaluates both expressions and provides a Monte Carlo estimate of the
exact probability to compare them against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SmallBallParams", "small_ball_asymptote", "mc_small_ball", "rate_bound"]


@dataclass(frozen=True)
class SmallBallParams:
    """Spectral decay and score-density parameters.

    B, beta : eigenvalue decay, log(theta_j) ~ -B * j**beta.
    b : local growth exponent of P(|eta| <= u) near zero (1 for scores
        with a bounded nonzero density at the origin, e.g. Gaussian).
    """

    B: float
    beta: float
    b: float

    def __post_init__(self):
        if min(self.B, self.beta, self.b) <= 0:
            raise ValueError("B, beta and b must all be positive")


def small_ball_asymptote(u: float, p: SmallBallParams) -> float:
    """Closed-form small-ball envelope at radius u in (0, 1).

    Evaluates exp(-(b*beta/(beta+1)) * (2/B)**(1/beta) * |log u|**((beta+1)/beta)).
    Strictly decreasing as u shrinks and tends to 1 as u approaches 1.
    """
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie strictly between 0 and 1")
    exponent = (
        -(p.b * p.beta / (p.beta + 1.0))
        * (2.0 / p.B) ** (1.0 / p.beta)
        * abs(np.log(u)) ** ((p.beta + 1.0) / p.beta)
    )
    return float(np.exp(exponent))


def mc_small_ball(eigenvalues, n_mc: int, u: float, seed: int) -> float:
    """Monte Carlo estimate of P(process norm <= u) under Gaussian scores.

    Draws the squared norm as a weighted sum of independent chi-square
    variables, one per eigenvalue, and counts draws at or below u**2.
    Each eigenvalue index uses its own substream derived from
    (seed, index), so results are deterministic given the seed and
    enlarging the truncation leaves lower-index draws untouched.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if np.any(eigenvalues <= 0) or np.any(np.diff(eigenvalues) > 0):
        raise ValueError("eigenvalues must be positive and descending")
    if n_mc < 1:
        raise ValueError("n_mc must be at least 1")
    if u < 0:
        raise ValueError("u must be nonnegative")
    total = np.zeros(n_mc)
    for j, theta in enumerate(eigenvalues):
        eta = np.random.default_rng([int(seed), j]).standard_normal(n_mc)
        total += theta * eta * eta
    return float(np.count_nonzero(total <= u * u) / n_mc)


def rate_bound(n, alpha: float, p: SmallBallParams) -> float:
    """Mean-square convergence-rate bound at sample size n.

    Evaluates
    exp(-2*alpha * ((beta+1)/(b*beta))**(beta/(beta+1)) * (B/2)**(1/(beta+1))
        * (log n)**(beta/(beta+1))),
    dropping lower-order terms. Strictly decreasing in n, yet slower than
    any power of 1/n.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    e = p.beta / (p.beta + 1.0)
    exponent = (
        -2.0
        * alpha
        * ((p.beta + 1.0) / (p.b * p.beta)) ** e
        * (p.B / 2.0) ** (1.0 / (p.beta + 1.0))
        * np.log(n) ** e
    )
    return float(np.exp(exponent))
