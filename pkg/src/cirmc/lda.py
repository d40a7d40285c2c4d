"""Latent Dirichlet allocation with minibatch chain updates on topic rows.

Each topic's word distribution phi_k is carried as a V-dimensional positive
chain (phi_k = row / sum(row)). A step draws a document minibatch, resamples
token-topic assignments locally with the doc-topic vector collapsed, scales
the resulting topic-word counts up to the corpus, and advances every (k, w)
chain coordinate — either by the exact transition or by the mirrored Euler
baseline. Stepsizes follow the decreasing schedule h_m = h (1 + m/tau)^-kappa.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cir import cir_transition_array
from .rng import as_generator
from .simplex import sgrld_update_array
from .distributions import sample_gamma

__all__ = [
    "LdaState",
    "stepsize_schedule",
    "lda_local_z_sweep",
    "lda_scir_step",
    "lda_sgrld_step",
    "doc_topic_posterior_mean",
]


@dataclass(frozen=True)
class LdaState:
    """Topic-word chains plus hyperparameters.

    ``chains`` is the (K, V) positive matrix of unnormalized topic rows;
    ``doc_topic`` holds the posterior-mean theta_l of the docs in the last
    minibatch (diagnostic only, not part of the chain).
    """

    chains: np.ndarray
    alpha: float
    beta: float
    step: int = 0
    doc_topic: np.ndarray | None = None

    def __post_init__(self) -> None:
        chains = np.asarray(self.chains, dtype=float)
        if chains.ndim != 2 or chains.shape[0] < 1:
            raise ValueError("chains must be a (K, V) matrix with K >= 1")
        if np.any(chains <= 0):
            raise ValueError("chain entries must be positive")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        object.__setattr__(self, "chains", chains)

    @property
    def n_topics(self) -> int:
        return int(self.chains.shape[0])

    @property
    def vocab_size(self) -> int:
        return int(self.chains.shape[1])

    @property
    def phi(self) -> np.ndarray:
        return self.chains / np.sum(self.chains, axis=1, keepdims=True)

    @classmethod
    def initialize(cls, rng, n_topics: int, vocab_size: int, alpha: float, beta: float,
                   init_shape: float = 1.0) -> "LdaState":
        chains = sample_gamma(rng, np.full((n_topics, vocab_size), float(init_shape)))
        return cls(chains=chains, alpha=alpha, beta=beta)


def stepsize_schedule(h: float, tau: float, kappa: float, m: int) -> float:
    """h_m = h * (1 + m/tau)^-kappa."""
    if h <= 0 or tau <= 0 or kappa < 0 or m < 0:
        raise ValueError("invalid schedule parameters")
    return h * (1.0 + m / tau) ** (-kappa)


def lda_local_z_sweep(rng, doc, phi, alpha: float, sweeps: int = 5):
    """Gibbs-resample token-topic assignments of one doc, theta_l collapsed.

    ``doc`` is a (words, counts) pair. Each token's conditional is
    proportional to (alpha + c_k^(-token)) * phi[k, w] where c_k counts the
    doc's other tokens in topic k. Returns the (K, V) count matrix of the
    final assignment state. K = 1 consumes no randomness.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    phi = np.asarray(phi, dtype=float)
    K = phi.shape[0]
    words, counts = doc
    words = np.asarray(words, dtype=np.int64)
    counts = np.asarray(counts, dtype=np.int64)
    out = np.zeros_like(phi)
    if words.size == 0 or int(np.sum(counts)) == 0:
        return out
    tokens = np.repeat(words, counts)
    if K == 1:
        out[0, words] = counts
        return out

    gen = as_generator(rng)
    n_tok = tokens.size
    u = gen.random(size=(sweeps + 1, n_tok))
    # plain-list hot loop: per-token numpy calls dominate runtime otherwise
    phi_cols = phi.T.tolist()
    tok_list = tokens.tolist()
    u_rows = u.tolist()
    alpha = float(alpha)
    c = [0.0] * K
    z = [0] * n_tok
    probs = [0.0] * K
    for sweep in range(sweeps + 1):
        u_row = u_rows[sweep]
        for t in range(n_tok):
            if sweep:
                c[z[t]] -= 1.0
            row = phi_cols[tok_list[t]]
            total = 0.0
            for k in range(K):
                p = (alpha + c[k]) * row[k]
                probs[k] = p
                total += p
            x = u_row[t] * total
            acc = 0.0
            k = 0
            # first bucket with cumulative mass above x; ends at K-1 regardless
            for k in range(K):
                acc += probs[k]
                if acc > x:
                    break
            z[t] = k
            c[k] += 1.0
    np.add.at(out, (np.asarray(z), tokens), 1.0)
    return out


def doc_topic_posterior_mean(topic_counts: np.ndarray, alpha: float) -> np.ndarray:
    """Posterior-mean theta_l given a doc's per-topic token counts."""
    c = np.sum(topic_counts, axis=1)
    return (alpha + c) / np.sum(alpha + c)


def _lda_step(rng, state, doc_minibatch, h_m, n_docs_total, sweeps, update):
    if not doc_minibatch:
        raise ValueError("doc minibatch must be non-empty")
    if n_docs_total < len(doc_minibatch):
        raise ValueError("n_docs_total smaller than the minibatch")
    gen = as_generator(rng)
    phi = state.phi
    batch_counts = np.zeros_like(phi)
    doc_topic = np.empty((len(doc_minibatch), state.n_topics))
    for i, doc in enumerate(doc_minibatch):
        doc_counts = lda_local_z_sweep(gen, doc, phi, state.alpha, sweeps=sweeps)
        batch_counts += doc_counts
        doc_topic[i] = doc_topic_posterior_mean(doc_counts, state.alpha)
    ahat = state.beta + (n_docs_total / len(doc_minibatch)) * batch_counts
    chains = update(gen, state.chains, ahat, h_m)
    return replace(state, chains=chains, step=state.step + 1, doc_topic=doc_topic)


def lda_scir_step(rng, state: LdaState, doc_minibatch, h_m: float, n_docs_total: int,
                  sweeps: int = 5) -> LdaState:
    """One minibatch step advancing all topic rows by exact transitions."""
    return _lda_step(rng, state, doc_minibatch, h_m, n_docs_total, sweeps,
                     cir_transition_array)


def lda_sgrld_step(rng, state: LdaState, doc_minibatch, h_m: float, n_docs_total: int,
                   sweeps: int = 5) -> LdaState:
    """Identical step shape with the mirrored Euler baseline inside."""
    return _lda_step(rng, state, doc_minibatch, h_m, n_docs_total, sweeps,
                     sgrld_update_array)
