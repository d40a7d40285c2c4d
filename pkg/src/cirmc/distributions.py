"""Random variate kernels and CDFs for the chain samplers and diagnostics.

All samplers accept scalar or array parameters under numpy broadcasting
rules and stay exact in the regimes the chains actually visit: gamma
shapes far below one and fractional chi-squared degrees of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .rng import as_generator

__all__ = [
    "POSITIVE_FLOOR",
    "NonCentralChiSq",
    "sample_noncentral_chisq",
    "sample_gamma",
    "sample_dirichlet",
    "sample_beta",
    "sample_categorical",
    "cdf_beta",
    "cdf_gamma",
]

# Floor for positive draws. Shapes far below one put real probability mass
# at magnitudes where doubles underflow to zero, and downstream code divides
# by these draws and takes their logs, so exact zeros are not acceptable.
POSITIVE_FLOOR = 1e-300


def _checked(name: str, value, *, minimum="exclusive") -> np.ndarray:
    """Validate that all entries are finite and positive (or nonnegative)."""
    arr = np.asarray(value, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    if minimum == "exclusive" and np.any(arr <= 0):
        raise ValueError(f"{name} must be positive")
    if minimum == "inclusive" and np.any(arr < 0):
        raise ValueError(f"{name} must be nonnegative")
    return arr


@dataclass(frozen=True)
class NonCentralChiSq:
    """Noncentral chi-squared parameters; ``dof`` may be fractional."""

    dof: float
    noncentrality: float

    def __post_init__(self) -> None:
        _checked("dof", self.dof)
        _checked("noncentrality", self.noncentrality, minimum="inclusive")

    @property
    def mean(self):
        return np.asarray(self.dof) + np.asarray(self.noncentrality)

    @property
    def variance(self):
        return 2.0 * (np.asarray(self.dof) + 2.0 * np.asarray(self.noncentrality))


def sample_gamma(rng, shape, rate=1.0, size=None):
    """Draw Gamma(shape, rate) variates, exact for any shape > 0.

    Shapes below one are drawn through the boost identity
    X = Y * U**(1/shape) with Y ~ Gamma(shape + 1): these gammas
    concentrate near zero, and the boosted construction stays exact there
    instead of degrading like small-shape rejection samplers.
    """
    gen = as_generator(rng)
    shape = _checked("shape", shape)
    rate = _checked("rate", rate)
    boosted = np.where(shape < 1.0, shape + 1.0, shape)
    draws = np.asarray(gen.gamma(boosted, size=size), dtype=float)
    small = np.broadcast_to(shape < 1.0, draws.shape)
    if np.any(small):
        u = gen.random(size=draws.shape)
        inv = np.where(small, 1.0 / np.broadcast_to(shape, draws.shape), 1.0)
        draws = draws * np.where(small, u**inv, 1.0)
    out = np.maximum(draws / rate, POSITIVE_FLOOR)
    return float(out) if out.ndim == 0 else out


def sample_noncentral_chisq(rng, dist: NonCentralChiSq, size=None):
    """Draw from a noncentral chi-squared law with fractional dof support.

    Uses the Poisson mixture of central chi-squared laws:
    W ~ chi2(dof + 2K) with K ~ Poisson(noncentrality / 2), the central
    draw realized as 2 * Gamma(dof/2 + K, 1). Exact for every dof > 0,
    where normal-shift constructions do not apply.
    """
    gen = as_generator(rng)
    k = gen.poisson(np.asarray(dist.noncentrality, dtype=float) / 2.0, size=size)
    return sample_gamma(gen, np.asarray(dist.dof, dtype=float) / 2.0 + k, rate=0.5)


def sample_dirichlet(rng, alpha, size=None):
    """Draw from Dirichlet(alpha) by normalizing independent gammas.

    Built on the same boosted gamma kernel so that entries of ``alpha``
    far below one (sparse priors) are handled exactly.
    """
    gen = as_generator(rng)
    alpha = np.atleast_1d(_checked("alpha", alpha))
    if alpha.ndim != 1:
        raise ValueError("alpha must be a vector")
    if size is None:
        x = sample_gamma(gen, alpha)
    else:
        x = sample_gamma(gen, alpha, size=(int(size), alpha.shape[0]))
    return x / np.sum(x, axis=-1, keepdims=True)


def sample_beta(rng, a, b, size=None):
    """Draw Beta(a, b) as X / (X + Y) with X ~ Gamma(a, 1), Y ~ Gamma(b, 1)."""
    gen = as_generator(rng)
    x = sample_gamma(gen, _checked("a", a), size=size)
    y = sample_gamma(gen, _checked("b", b), size=size)
    return x / (x + y)


def sample_categorical(rng, weights, size=None):
    """Draw an index with probability proportional to ``weights``."""
    gen = as_generator(rng)
    w = _checked("weights", weights, minimum="inclusive")
    total = float(np.sum(w))
    if total <= 0.0:
        raise ValueError("weights are all zero: degenerate distribution")
    cum = np.cumsum(w)
    idx = np.searchsorted(cum, gen.random(size=size) * total, side="right")
    # guard against roundoff pushing the draw past the last bucket
    idx = np.minimum(idx, len(w) - 1)
    return int(idx) if np.ndim(idx) == 0 else idx


def cdf_beta(x, a, b):
    """Regularized incomplete beta I_x(a, b); 0 below [0,1], 1 above."""
    _checked("a", a)
    _checked("b", b)
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ValueError("x must not be NaN")
    out = special.betainc(a, b, np.clip(x, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


def cdf_gamma(x, shape, rate=1.0):
    """Regularized lower incomplete gamma P(shape, rate*x); 0 for x <= 0."""
    shape = _checked("shape", shape)
    rate = _checked("rate", rate)
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ValueError("x must not be NaN")
    out = special.gammainc(shape, np.maximum(rate * x, 0.0))
    return float(out) if out.ndim == 0 else out
