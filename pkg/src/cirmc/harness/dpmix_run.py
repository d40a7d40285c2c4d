"""Mixture experiment: exact slice sweeps vs the two minibatch sweeps.

Every (method, seed) cell records an active-cluster trace each sweep and a
held-out log-predictive trace every few sweeps, scored with the sweep's
current mixture. The generating mixture's log predictive is recorded as
method "truth" (seed -1) when available.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..cir import cir_transition_array
from ..corpus import Corpus
from ..dpmix import active_cluster_count, dp_init, dp_slice_gibbs_step, dp_slice_stochastic_step
from ..evaluation import log_predictive
from ..rng import RngStream, as_generator
from ..simplex import Minibatch, sgrld_update_array
from .config import DpmixConfig
from .datagen import generate_dp_corpus, load_truth, truth_sidecar_path
from .records import RunRecord

__all__ = ["resolve_dp_corpus", "truth_log_predictive", "run_dpmix"]

TRUTH_SEED = -1

DP_METHODS = ("exact", "scir", "sgrld")


def resolve_dp_corpus(config: DpmixConfig):
    """Return (train matrix, heldout matrix, dim, truth-or-None)."""
    if config.corpus:
        corpus = Corpus.read(config.corpus)
        truth = None
        try:
            truth = load_truth(truth_sidecar_path(config.corpus))
        except FileNotFoundError:
            pass
        if not 1 <= config.heldout_users < len(corpus):
            raise ValueError("heldout_users must be smaller than the corpus")
    else:
        corpus, truth = generate_dp_corpus(
            RngStream(seed=config.data_seed, stream_id=0),
            clusters=config.clusters, dim=config.dim, n_users=config.n_users,
            doc_len=config.doc_len, sparsity=config.sparsity)
    dense = corpus.dense().astype(float)
    split = len(corpus) - config.heldout_users
    return dense[:split], dense[split:], corpus.vocab_size, truth


def truth_log_predictive(heldout, truth: dict) -> float:
    return log_predictive(list(heldout), [(truth["weights"], truth["theta"])])


@dataclass(frozen=True)
class _DpCell:
    config: DpmixConfig
    method: str
    seed: int
    stream_id: int


def _run_dp_cell(cell: _DpCell) -> list:
    config = cell.config
    train, heldout, _, _ = resolve_dp_corpus(config)
    gen = as_generator(RngStream(seed=cell.seed, stream_id=cell.stream_id))
    L = train.shape[0]

    if cell.method == "exact":
        prior_a, k_init = config.exact_prior_a, config.exact_k_init
        h, fraction = None, None
        iterations = config.exact_iterations
    else:
        iterations = config.iterations
        prior_a = getattr(config, f"{cell.method}_prior_a")
        k_init = getattr(config, f"{cell.method}_k_init")
        h = getattr(config, f"{cell.method}_h_theta")
        batch_size = min(config.minibatch, L)
        fraction = batch_size / L
    state = dp_init(gen, train, prior_a=prior_a, alpha=config.alpha_init,
                    k_init=k_init, with_chains=cell.method != "exact")

    records = []
    heldout_list = list(heldout)
    for it in range(1, iterations + 1):
        if cell.method == "exact":
            state = dp_slice_gibbs_step(gen, state, train,
                                        resample_alpha=config.resample_alpha_exact,
                                        b1=config.b1, b2=config.b2)
        else:
            batch = Minibatch.sample(gen, L, batch_size)
            update = cir_transition_array if cell.method == "scir" else sgrld_update_array
            state = dp_slice_stochastic_step(
                gen, state, train, batch,
                h_theta=getattr(config, f"{cell.method}_h_theta"),
                h_dp=getattr(config, f"{cell.method}_h_dp"),
                b1=config.b1, b2=config.b2, update=update)
        records.append(RunRecord("dpmix", cell.method, cell.seed, h, fraction,
                                 it, "active_clusters", float(active_cluster_count(state))))
        if it % config.eval_every == 0 or it == iterations:
            lp = log_predictive(heldout_list, [state.mixture()])
            records.append(RunRecord("dpmix", cell.method, cell.seed, h, fraction,
                                     it, "log_predictive", lp))
    return records


def run_dpmix(config: DpmixConfig):
    """Run all method/seed cells plus the truth reference row."""
    cells = []
    for method in DP_METHODS:
        for seed in config.seeds:
            cells.append(_DpCell(config, method, seed, stream_id=len(cells)))
    if config.threads <= 1:
        batches = [_run_dp_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            batches = list(pool.map(_run_dp_cell, cells))
    records = [rec for batch in batches for rec in batch]

    _, heldout, _, truth = resolve_dp_corpus(config)
    if truth is not None and truth.get("kind") == "dpmix":
        records.append(RunRecord("dpmix", "truth", TRUTH_SEED, None, None, 0,
                                 "log_predictive", truth_log_predictive(heldout, truth)))
    return records
