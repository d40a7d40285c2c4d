"""Synthetic corpus generators with ground-truth sidecars.

Both generators emit a bag-of-words ``Corpus`` plus a truth dict holding the
generating parameters, so experiments can score learned models against the
process that produced the data. Truth dicts round-trip through ``.npz``.
"""

from __future__ import annotations

import numpy as np

from ..corpus import Corpus
from ..rng import as_generator

__all__ = [
    "generate_lda_corpus",
    "generate_dp_corpus",
    "generate_synthetic_corpus",
    "save_truth",
    "load_truth",
    "truth_sidecar_path",
]


def _doc_from_word_counts(counts):
    words = np.flatnonzero(counts)
    return words.astype(np.int64), counts[words].astype(np.int64)


def generate_lda_corpus(rng, n_topics=3, vocab=100, n_docs=500, doc_len=50,
                        sparsity=0.1, doc_alpha=0.5):
    """Draw an admixture corpus: per-topic word simplices, per-doc mixtures.

    Topics come from a symmetric Dirichlet(sparsity) over the vocabulary and
    each document mixes them with Dirichlet(doc_alpha) proportions; every
    document carries exactly doc_len tokens.
    """
    gen = as_generator(rng)
    phi = gen.dirichlet(np.full(vocab, float(sparsity)), size=n_topics)
    docs = []
    for _ in range(n_docs):
        theta = gen.dirichlet(np.full(n_topics, float(doc_alpha)))
        per_topic = gen.multinomial(doc_len, theta)
        counts = np.zeros(vocab, dtype=np.int64)
        for k in np.flatnonzero(per_topic):
            counts += gen.multinomial(int(per_topic[k]), phi[k])
        docs.append(_doc_from_word_counts(counts))
    truth = {"kind": "lda", "phi": phi, "doc_alpha": float(doc_alpha)}
    return Corpus(docs, vocab), truth


def generate_dp_corpus(rng, clusters=4, dim=20, n_users=200, doc_len=20,
                       sparsity=0.3, weight_conc=5.0):
    """Draw a finite-mixture corpus: each item is one multinomial draw from
    its cluster's word simplex; item lengths are Poisson(doc_len) + 1."""
    gen = as_generator(rng)
    weights = gen.dirichlet(np.full(clusters, float(weight_conc)))
    theta = gen.dirichlet(np.full(dim, float(sparsity)), size=clusters)
    labels = gen.choice(clusters, size=n_users, p=weights)
    docs = []
    for c in labels:
        length = int(gen.poisson(doc_len)) + 1
        counts = gen.multinomial(length, theta[c]).astype(np.int64)
        docs.append(_doc_from_word_counts(counts))
    truth = {
        "kind": "dpmix",
        "weights": weights,
        "theta": theta,
        "labels": labels.astype(np.int64),
    }
    return Corpus(docs, dim), truth


def generate_synthetic_corpus(rng, n_topics, vocab, n_docs, doc_len, sparsity,
                              kind="lda", **kwargs):
    """Dispatching front end used by the gen-data command."""
    if kind == "lda":
        return generate_lda_corpus(rng, n_topics=n_topics, vocab=vocab,
                                   n_docs=n_docs, doc_len=doc_len,
                                   sparsity=sparsity, **kwargs)
    if kind == "dpmix":
        return generate_dp_corpus(rng, clusters=n_topics, dim=vocab,
                                  n_users=n_docs, doc_len=doc_len,
                                  sparsity=sparsity, **kwargs)
    raise ValueError(f"unknown corpus kind {kind!r}")


def truth_sidecar_path(corpus_path) -> str:
    return f"{corpus_path}.truth.npz"


def save_truth(path, truth: dict) -> None:
    arrays = {}
    for key, value in truth.items():
        if isinstance(value, str):
            arrays[key] = np.array(value)
        else:
            arrays[key] = np.asarray(value)
    np.savez(path, **arrays)


def load_truth(path) -> dict:
    out = {}
    with np.load(path, allow_pickle=False) as data:
        for key in data.files:
            arr = data[key]
            if arr.dtype.kind in ("U", "S"):
                out[key] = str(arr)
            elif arr.ndim == 0:
                out[key] = float(arr)
            else:
                out[key] = arr
    return out
