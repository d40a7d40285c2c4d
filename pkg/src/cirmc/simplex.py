"""Minibatch samplers on the probability simplex.

Targets are Dir(alpha + counts) posteriors for categorical data. A point
is carried as unnormalized positive coordinates theta (omega = theta /
sum(theta)); coordinates evolve either by exact square-root-diffusion
transitions with minibatch-estimated shapes, or by the mirrored Euler
baseline that those transitions replace. An exact Dirichlet reference
sampler shares the same counts interface.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cir import ShapeEstimate, cir_transition_array
from .distributions import POSITIVE_FLOOR, sample_dirichlet, sample_gamma
from .rng import as_generator

__all__ = [
    "SparseCounts",
    "Minibatch",
    "SimplexChain",
    "check_simplex",
    "estimate_shape",
    "var_ahat_without_replacement",
    "scir_simplex_step",
    "sgrld_simplex_step",
    "sgrld_update_array",
    "exact_dirichlet_posterior",
]

SIMPLEX_TOL = 1e-10


def check_simplex(weights, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a simplex vector: entries >= 0, sum within ``tol`` of 1."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("simplex vector must be a non-empty 1-d array")
    if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > tol:
        raise ValueError("not a simplex vector")
    return w


@dataclass(frozen=True)
class SparseCounts:
    """Per-category totals for a dataset of N items.

    ``totals[j]`` is the summed count of category j over all items. Desk-
    scale dimensions make a dense vector the right store; a mapping-based
    constructor is provided for genuinely sparse inputs.
    """

    dim: int
    totals: np.ndarray
    n_items: int

    def __post_init__(self) -> None:
        totals = np.asarray(self.totals, dtype=np.int64)
        if totals.shape != (self.dim,):
            raise ValueError("totals must have shape (dim,)")
        if np.any(totals < 0):
            raise ValueError("counts must be nonnegative")
        if self.n_items < 1:
            raise ValueError("n_items must be positive")
        object.__setattr__(self, "totals", totals)

    @classmethod
    def from_labels(cls, labels, dim: int) -> "SparseCounts":
        """Counts for single-label items (each item one category draw)."""
        labels = np.asarray(labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a non-empty 1-d array")
        if np.any(labels < 0) or np.any(labels >= dim):
            raise ValueError("labels out of range")
        return cls(dim=dim, totals=np.bincount(labels, minlength=dim), n_items=labels.size)

    @classmethod
    def from_mapping(cls, dim: int, counts: dict, n_items: int) -> "SparseCounts":
        totals = np.zeros(dim, dtype=np.int64)
        for category, count in counts.items():
            totals[int(category)] = int(count)
        return cls(dim=dim, totals=totals, n_items=n_items)


@dataclass(frozen=True)
class Minibatch:
    """Item indices drawn uniformly without replacement."""

    indices: np.ndarray

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("minibatch must be a non-empty index vector")
        if np.unique(idx).size != idx.size:
            raise ValueError("minibatch indices must be distinct")
        object.__setattr__(self, "indices", idx)

    @property
    def n(self) -> int:
        return int(self.indices.size)

    @classmethod
    def sample(cls, rng, n_items: int, n: int) -> "Minibatch":
        if not 1 <= n <= n_items:
            raise ValueError("need 1 <= n <= n_items")
        gen = as_generator(rng)
        return cls(indices=gen.choice(n_items, size=n, replace=False))


@dataclass(frozen=True)
class SimplexChain:
    """Unnormalized positive coordinates plus their Dirichlet prior."""

    theta: np.ndarray
    prior: np.ndarray
    step: int = 0

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=float)
        prior = np.asarray(self.prior, dtype=float)
        if theta.shape != prior.shape or theta.ndim != 1:
            raise ValueError("theta and prior must be 1-d arrays of equal length")
        if np.any(theta <= 0) or np.any(prior <= 0):
            raise ValueError("theta and prior entries must be positive")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "prior", prior)

    @property
    def dim(self) -> int:
        return int(self.theta.size)

    @classmethod
    def initialize(cls, rng, prior, init_shape: float = 1.0) -> "SimplexChain":
        """Fresh chain with coordinates drawn Gamma(init_shape, 1)."""
        prior = np.asarray(prior, dtype=float)
        theta = sample_gamma(rng, np.full(prior.shape, float(init_shape)))
        return cls(theta=theta, prior=prior, step=0)


def estimate_shape(prior_j: float, batch_count_j: float, N: int, n: int) -> ShapeEstimate:
    """Unbiased shape estimate a-hat_j = alpha_j + (N/n) * batch count."""
    if n < 1:
        raise ValueError("minibatch size n must be positive")
    if n > N:
        raise ValueError("minibatch size cannot exceed dataset size")
    if batch_count_j < 0:
        raise ValueError("batch count must be nonnegative")
    return ShapeEstimate(prior_part=float(prior_j), count_part=(N / n) * float(batch_count_j))


def var_ahat_without_replacement(N: int, n: int, total_j: int) -> float:
    """Var[a-hat_j] for uniform without-replacement minibatches.

    The batch count is hypergeometric, so
    Var = (N/n)^2 * n * p(1-p) * (N-n)/(N-1) with p = total_j / N.
    """
    if not 1 <= n <= N:
        raise ValueError("need 1 <= n <= N")
    if N == 1:
        return 0.0
    p = total_j / N
    return (N / n) ** 2 * n * p * (1.0 - p) * (N - n) / (N - 1)


def _batch_shape_totals(chain: SimplexChain, batch: Minibatch, labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    N = labels.size
    if np.any(batch.indices >= N):
        raise ValueError("minibatch index out of range")
    counts = np.bincount(labels[batch.indices], minlength=chain.dim)
    if counts.size > chain.dim:
        raise ValueError("label exceeds chain dimension")
    return chain.prior + (N / batch.n) * counts


def scir_simplex_step(rng, chain: SimplexChain, batch: Minibatch, data, h: float):
    """Advance every coordinate by one exact transition with its a-hat_j.

    ``data`` is the full vector of item category labels; the batch picks
    the rows whose counts enter the shape estimates. Returns the new chain
    and its normalized simplex point.
    """
    ahat = _batch_shape_totals(chain, batch, data)
    theta = cir_transition_array(rng, chain.theta, ahat, h)
    omega = theta / np.sum(theta)
    return replace(chain, theta=theta, step=chain.step + 1), omega


def sgrld_update_array(rng, theta, ahat, h: float):
    """Mirrored Euler update theta <- |theta + h(a-hat - theta) + sqrt(2h theta) eta|.

    The Euler step this implements is exactly the discretization whose
    stepsize bias the exact transition removes; it is kept as the baseline.
    """
    if h < 0:
        raise ValueError("stepsize h must be nonnegative")
    gen = as_generator(rng)
    theta = np.asarray(theta, dtype=float)
    eta = gen.standard_normal(theta.shape)
    proposal = np.abs(theta + h * (ahat - theta) + np.sqrt(2.0 * h * theta) * eta)
    # mirrored updates can land at exact zero; keep sqrt/log downstream defined
    return np.maximum(proposal, POSITIVE_FLOOR)


def sgrld_simplex_step(rng, chain: SimplexChain, batch: Minibatch, data, h: float):
    """Baseline Euler analogue of :func:`scir_simplex_step` (same interface)."""
    ahat = _batch_shape_totals(chain, batch, data)
    theta = sgrld_update_array(rng, chain.theta, ahat, h)
    omega = theta / np.sum(theta)
    return replace(chain, theta=theta, step=chain.step + 1), omega


def exact_dirichlet_posterior(rng, alpha, counts: SparseCounts):
    """One exact draw from the conjugate posterior Dir(alpha + totals)."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (counts.dim,):
        raise ValueError("alpha must match counts.dim")
    return sample_dirichlet(rng, alpha + counts.totals)
