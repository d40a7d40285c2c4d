"""Sample-quality diagnostics and predictive metrics.

The headline diagnostic maps simplex samples to the unit cube with the
Dirichlet Rosenblatt transform (successive scaled-Beta conditional CDFs)
and measures per-coordinate Kolmogorov-Smirnov distance to uniformity;
under the true posterior each transformed coordinate is an independent
U(0,1). Predictive metrics cover document-completion perplexity and
mixture log predictive scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .distributions import cdf_beta

__all__ = [
    "KSReport",
    "KS_CSV_HEADER",
    "rosenblatt_transform",
    "ks_uniform",
    "dirichlet_ks_distance",
    "split_for_completion",
    "perplexity",
    "log_predictive",
]

# Entries of the conditional argument may leave [0,1] by a hair through
# roundoff; anything past this slack is a real boundary event and is flagged.
_CLAMP_SLACK = 1e-9

KS_CSV_HEADER = ("seed", "method", "minibatch_fraction", "d_ks", "per_dim_max", "flags")


@dataclass(frozen=True)
class KSReport:
    """Per-dimension KS distances for one batch of simplex samples."""

    per_dim: np.ndarray
    d_ks: float
    n_samples: int
    dim: int
    clamped: int = 0
    degenerate_dims: int = 0

    def __post_init__(self) -> None:
        per_dim = np.asarray(self.per_dim, dtype=float)
        if np.any(per_dim < 0) or np.any(per_dim > 1):
            raise ValueError("KS distances must lie in [0, 1]")
        if abs(float(np.mean(per_dim)) - self.d_ks) > 1e-12:
            raise ValueError("d_ks must be the mean of per-dimension distances")
        object.__setattr__(self, "per_dim", per_dim)

    @property
    def per_dim_max(self) -> float:
        return float(np.max(self.per_dim))

    @property
    def flags(self) -> int:
        return self.clamped + self.degenerate_dims

    def csv_row(self, seed: int, method: str, minibatch_fraction) -> tuple:
        frac = "" if minibatch_fraction is None else minibatch_fraction
        return (seed, method, frac, self.d_ks, self.per_dim_max, self.flags)


def rosenblatt_transform(samples, alpha):
    """Map simplex samples to unit-cube coordinates under Dir(alpha).

    Coordinate k (k = 0..d-2) is cdf_beta of x_k / (1 - sum_{j<k} x_j) with
    parameters (alpha_k, sum_{l>k} alpha_l): the scaled conditional of a
    Dirichlet coordinate given the earlier ones. The last simplex coordinate
    is determined by the rest, so d-1 coordinates come out.

    Accepts one vector or an (M, d) matrix. Returns ``(coords, clamped)``
    where clamped counts entries whose conditional argument left [0, 1]
    numerically (exhausted residual mass) and was clamped.
    """
    x = np.asarray(samples, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    alpha = np.asarray(alpha, dtype=float)
    d = alpha.size
    if d < 2:
        raise ValueError("need at least two categories")
    if x.shape[1] != d:
        raise ValueError("sample dimension does not match alpha")
    if np.any(alpha <= 0):
        raise ValueError("alpha entries must be positive")

    tail = np.cumsum(alpha[::-1])[::-1]  # tail[k] = sum_{l >= k} alpha_l
    out = np.empty((x.shape[0], d - 1))
    residual = np.ones(x.shape[0])
    clamped = 0
    for k in range(d - 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(residual > 0.0, x[:, k] / residual, 1.0)
        clamped += int(np.sum((residual <= 0.0) | (y < -_CLAMP_SLACK) | (y > 1.0 + _CLAMP_SLACK)))
        out[:, k] = cdf_beta(np.clip(y, 0.0, 1.0), alpha[k], tail[k + 1])
        residual = residual - x[:, k]
    return (out[0], clamped) if single else (out, clamped)


def ks_uniform(values) -> float:
    """Exact sup distance between the empirical CDF of ``values`` and U(0,1).

    Evaluated at the order statistics: max_i max(i/M - v_(i), v_(i) - (i-1)/M).
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    m = v.size
    if m == 0:
        raise ValueError("values must be non-empty")
    if np.any(v < 0) or np.any(v > 1):
        raise ValueError("values must lie in [0, 1]")
    i = np.arange(1, m + 1, dtype=float)
    return float(np.max(np.maximum(i / m - v, v - (i - 1.0) / m)))


def dirichlet_ks_distance(samples, alpha, degenerate_tol: float = 1e-12) -> KSReport:
    """Average per-coordinate KS distance of simplex samples against Dir(alpha).

    Applies the Rosenblatt transform row-wise, then ks_uniform per transformed
    column; d_KS is the mean over the d-1 free coordinates. Columns with
    (numerically) zero variance are counted as degenerate in the report flags.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2:
        raise ValueError("samples must be an (M, d) matrix")
    coords, clamped = rosenblatt_transform(samples, alpha)
    per_dim = np.array([ks_uniform(coords[:, j]) for j in range(coords.shape[1])])
    degenerate = int(np.sum(np.ptp(coords, axis=0) <= degenerate_tol))
    return KSReport(
        per_dim=per_dim,
        d_ks=float(np.mean(per_dim)),
        n_samples=samples.shape[0],
        dim=samples.shape[1],
        clamped=clamped,
        degenerate_dims=degenerate,
    )


def split_for_completion(words, counts):
    """Split one document's tokens into estimation/evaluation halves.

    Tokens are enumerated in word-id order with multiplicity; even positions
    form the estimation half, odd positions the evaluation half. Returns
    ((est_words, est_counts), (eval_words, eval_counts)).
    """
    words = np.asarray(words, dtype=np.int64)
    counts = np.asarray(counts, dtype=np.int64)
    order = np.argsort(words, kind="stable")
    tokens = np.repeat(words[order], counts[order])
    halves = []
    for start in (0, 1):
        part = tokens[start::2]
        w, c = np.unique(part, return_counts=True)
        halves.append((w, c))
    return halves[0], halves[1]


def perplexity(heldout_docs, predictive_fn: Callable) -> float:
    """Document-completion perplexity over held-out documents.

    Each doc is a ``(words, counts)`` pair. Its tokens are split into
    halves; ``predictive_fn(est_words, est_counts)`` must return a
    vocabulary probability vector conditioned on the estimation half, and
    the evaluation half is scored against it:
    exp(-sum log p(w) / total evaluation tokens). A zero predictive
    probability yields +inf.
    """
    total_log = 0.0
    total_tokens = 0
    for words, counts in heldout_docs:
        (est_w, est_c), (ev_w, ev_c) = split_for_completion(words, counts)
        if ev_w.size == 0:
            continue
        p = np.asarray(predictive_fn(est_w, est_c), dtype=float)
        probs = p[ev_w]
        if np.any(probs <= 0.0):
            return math.inf
        total_log += float(np.dot(ev_c, np.log(probs)))
        total_tokens += int(np.sum(ev_c))
    if total_tokens == 0:
        raise ValueError("held-out set has no evaluation tokens")
    return math.exp(-total_log / total_tokens)


def _multinomial_loglik(x: np.ndarray, log_theta: np.ndarray) -> np.ndarray:
    """log Multi(x; n, theta_j) for one count vector against J components."""
    n = int(np.sum(x))
    coef = special.gammaln(n + 1) - float(np.sum(special.gammaln(x + 1)))
    return coef + log_theta @ x


def log_predictive(heldout_users, dp_state_samples: Sequence) -> float:
    """Mean over items and posterior samples of the mixture log density.

    ``heldout_users`` holds multinomial count vectors; each posterior sample
    is a ``(weights, thetas)`` pair with thetas of shape (J, d). Weights are
    renormalized over the represented components (a truncated stick always
    leaves a sliver of unrepresented mass).
    """
    samples = list(dp_state_samples)
    if not samples:
        raise ValueError("need at least one posterior sample")
    users = [np.asarray(x, dtype=float) for x in heldout_users]
    if not users:
        raise ValueError("need at least one held-out item")
    per_sample = np.zeros((len(samples), len(users)))
    for s, (weights, thetas) in enumerate(samples):
        w = np.asarray(weights, dtype=float)
        log_w = np.log(w / np.sum(w))
        log_theta = np.log(np.maximum(np.asarray(thetas, dtype=float), 1e-300))
        for i, x in enumerate(users):
            per_sample[s, i] = special.logsumexp(log_w + _multinomial_loglik(x, log_theta))
    return float(np.mean(per_sample))
