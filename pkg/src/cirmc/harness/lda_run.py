"""Topic-model experiment: held-out perplexity traces per method.

Each (method, seed) cell runs its own chain on minibatches of documents and
evaluates document-completion perplexity on the held-out set every few
steps. Evaluation uses a separate RNG stream so the chain's variates do not
depend on the evaluation cadence. When the corpus was generated here, the
same perplexity under the generating topics is recorded as method "truth"
(seed -1).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus
from ..evaluation import perplexity
from ..lda import (
    LdaState,
    doc_topic_posterior_mean,
    lda_local_z_sweep,
    lda_scir_step,
    lda_sgrld_step,
    stepsize_schedule,
)
from ..rng import RngStream, as_generator
from .config import LdaConfig
from .datagen import generate_lda_corpus, load_truth, truth_sidecar_path
from .records import RunRecord

__all__ = ["resolve_lda_corpus", "phi_predictive", "truth_perplexity", "run_lda"]

TRUTH_SEED = -1  # seed column value for ground-truth reference rows


def resolve_lda_corpus(config: LdaConfig):
    """Return (train_docs, heldout_docs, vocab_size, truth-or-None).

    With a corpus path the last ``heldout_docs`` items are held out; without
    one a desk-scale corpus is generated deterministically from data_seed.
    """
    if config.corpus:
        corpus = Corpus.read(config.corpus)
        truth = None
        try:
            truth = load_truth(truth_sidecar_path(config.corpus))
        except FileNotFoundError:
            pass
        if not 1 <= config.heldout_docs < len(corpus):
            raise ValueError("heldout_docs must be smaller than the corpus")
        split = len(corpus) - config.heldout_docs
    else:
        corpus, truth = generate_lda_corpus(
            RngStream(seed=config.data_seed, stream_id=0),
            n_topics=config.gen_topics, vocab=config.vocab,
            n_docs=config.n_docs, doc_len=config.doc_len,
            sparsity=config.sparsity, doc_alpha=config.doc_alpha)
        split = len(corpus) - config.heldout_docs
    train = corpus.docs[:split]
    heldout = corpus.docs[split:]
    return train, heldout, corpus.vocab_size, truth


def phi_predictive(eval_rng, phi, alpha: float, sweeps: int):
    """Completion predictive p(w | estimation half) under fixed topics.

    The estimation half's topic counts come from the same local sweep the
    samplers use; theta_l is the posterior mean given those counts.
    """
    phi = np.asarray(phi, dtype=float)
    gen = as_generator(eval_rng)

    def predictive(est_words, est_counts):
        counts = lda_local_z_sweep(gen, (est_words, est_counts), phi, alpha,
                                   sweeps=sweeps)
        theta = doc_topic_posterior_mean(counts, alpha)
        return theta @ phi

    return predictive


def truth_perplexity(heldout, truth: dict, config: LdaConfig) -> float:
    """Perplexity of the held-out set under the generating topics."""
    rng = RngStream(seed=config.data_seed, stream_id=1)
    fn = phi_predictive(rng, truth["phi"], float(truth["doc_alpha"]), config.sweeps)
    return perplexity(heldout, fn)


@dataclass(frozen=True)
class _LdaCell:
    config: LdaConfig
    method: str
    seed: int
    chain_stream: int
    eval_stream: int


def _method_params(config: LdaConfig, method: str) -> dict:
    p = {name: getattr(config, f"{method}_{name}")
         for name in ("h", "tau", "kappa", "alpha", "beta")}
    return p


def _run_lda_cell(cell: _LdaCell) -> list:
    config = cell.config
    train, heldout, vocab, _ = resolve_lda_corpus(config)
    params = _method_params(config, cell.method)
    step = lda_scir_step if cell.method == "scir" else lda_sgrld_step
    chain_rng = as_generator(RngStream(seed=cell.seed, stream_id=cell.chain_stream))
    eval_rng = as_generator(RngStream(seed=cell.seed, stream_id=cell.eval_stream))

    state = LdaState.initialize(chain_rng, config.n_topics, vocab,
                                alpha=params["alpha"], beta=params["beta"])
    n_docs = len(train)
    batch_size = min(config.minibatch, n_docs)
    fraction = batch_size / n_docs
    records = []
    for m in range(1, config.iterations + 1):
        h_m = stepsize_schedule(params["h"], params["tau"], params["kappa"], m)
        picks = chain_rng.choice(n_docs, size=batch_size, replace=False)
        batch = [train[i] for i in picks]
        state = step(chain_rng, state, batch, h_m, n_docs, sweeps=config.sweeps)
        if m % config.eval_every == 0 or m == config.iterations:
            fn = phi_predictive(eval_rng, state.phi, params["alpha"], config.sweeps)
            ppx = perplexity(heldout, fn)
            records.append(RunRecord("lda", cell.method, cell.seed, params["h"],
                                     fraction, m, "perplexity", ppx))
    return records


def run_lda(config: LdaConfig):
    """Run all (method, seed) cells plus the truth reference row."""
    cells = []
    for method in ("scir", "sgrld"):
        for seed in config.seeds:
            ordinal = len(cells)
            cells.append(_LdaCell(config, method, seed,
                                  chain_stream=2 * ordinal,
                                  eval_stream=2 * ordinal + 1))
    if config.threads <= 1:
        batches = [_run_lda_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            batches = list(pool.map(_run_lda_cell, cells))
    records = [rec for batch in batches for rec in batch]

    _, heldout, _, truth = resolve_lda_corpus(config)
    if truth is not None and truth.get("kind") == "lda":
        value = truth_perplexity(heldout, truth, config)
        records.append(RunRecord("lda", "truth", TRUTH_SEED, None, None, 0,
                                 "perplexity", value))
    return records
