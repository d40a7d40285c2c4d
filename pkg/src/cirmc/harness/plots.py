"""Figure rendering for experiment records.

Every report path writes figures next to its delimited output; all
functions take the in-memory records plus the output stem and return the
list of files written. The Agg backend keeps this headless-safe.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_synthetic", "plot_lda", "plot_dpmix", "plot_theory"]

_COLORS = {"scir": "tab:blue", "sgrld": "tab:orange", "exact": "tab:green",
           "truth": "black"}


def _stem(out) -> Path:
    out = Path(out)
    return out.with_suffix("") if out.suffix else out


def _select(records, **fields):
    out = records
    for key, value in fields.items():
        out = [r for r in out if getattr(r, key) == value]
    return out


def plot_synthetic(records, out) -> list:
    """KS-vs-fraction curves and tracked-coordinate boxplots per posterior."""
    written = []
    stem = _stem(out)
    experiments = sorted({r.experiment for r in records if r.experiment.startswith("synthetic")})
    for experiment in experiments:
        posterior = experiment.split("-", 1)[1]
        recs = _select(records, experiment=experiment)
        fractions = sorted({r.n_fraction for r in recs if r.n_fraction is not None})

        fig, ax = plt.subplots(figsize=(6, 4))
        for method in ("scir", "sgrld", "exact"):
            ys = []
            for f in fractions:
                vals = [r.value for r in _select(recs, method=method,
                                                 n_fraction=f, metric="d_ks_best")]
                ys.append(np.mean(vals) if vals else np.nan)
            ax.plot(fractions, ys, marker="o", label=method, color=_COLORS[method])
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("minibatch fraction")
        ax.set_ylabel("KS distance (mean over seeds, best stepsize)")
        ax.set_title(f"{posterior} posterior")
        ax.legend()
        fig.tight_layout()
        path = Path(f"{stem}_{posterior}_ks.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

        # boxplot of the tracked coordinate from recorded quantiles
        fig, ax = plt.subplots(figsize=(7, 4))
        stats = []
        positions = []
        colors = []
        for fi, f in enumerate(fractions):
            for mi, method in enumerate(("scir", "sgrld", "exact")):
                qs = {}
                for pct in (5, 25, 50, 75, 95):
                    vals = [r.value for r in _select(recs, method=method, n_fraction=f,
                                                     metric=f"omega5_q{pct:02d}")]
                    if vals:
                        qs[pct] = float(np.mean(vals))
                if len(qs) == 5:
                    stats.append({
                        "med": qs[50], "q1": qs[25], "q3": qs[75],
                        "whislo": qs[5], "whishi": qs[95], "fliers": [],
                        "label": f"{method}\n{f:g}",
                    })
                    positions.append(fi * 4 + mi)
                    colors.append(_COLORS[method])
        if stats:
            artists = ax.bxp(stats, positions=positions, showfliers=False,
                             patch_artist=True)
            for patch, color in zip(artists["boxes"], colors):
                patch.set_facecolor(color)
                patch.set_alpha(0.5)
        ax.set_yscale("log")
        ax.set_ylabel("fifth coordinate")
        ax.set_title(f"{posterior} posterior: tracked-coordinate spread")
        ax.tick_params(axis="x", labelsize=7)
        fig.tight_layout()
        path = Path(f"{stem}_{posterior}_omega5.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def _trace_plot(ax, records, metric, ylabel):
    methods = sorted({r.method for r in records if r.metric == metric and r.method != "truth"})
    for method in methods:
        recs = _select(records, method=method, metric=metric)
        iters = sorted({r.iteration for r in recs})
        means = [np.mean([r.value for r in recs if r.iteration == it]) for it in iters]
        ax.plot(iters, means, label=method, color=_COLORS.get(method))
    truth = [r.value for r in records if r.method == "truth" and r.metric == metric]
    if truth:
        ax.axhline(truth[0], linestyle="--", color=_COLORS["truth"], label="truth")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    ax.legend()


def plot_lda(records, out) -> list:
    stem = _stem(out)
    fig, ax = plt.subplots(figsize=(6, 4))
    _trace_plot(ax, records, "perplexity", "held-out perplexity")
    ax.set_title("document completion (mean over seeds)")
    fig.tight_layout()
    path = Path(f"{stem}_perplexity.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def plot_dpmix(records, out) -> list:
    stem = _stem(out)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    _trace_plot(ax1, records, "log_predictive", "held-out log predictive")
    _trace_plot(ax2, records, "active_clusters", "active clusters")
    fig.tight_layout()
    path = Path(f"{stem}_predictive.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def plot_theory(records, out) -> list:
    stem = _stem(out)
    margins = [r for r in records if r.metric.endswith(("_margin_se", "_max_dev", "_dev"))]
    fig, ax = plt.subplots(figsize=(8, 4))
    labels = [f"{r.method}:{r.metric}[{r.iteration}]" for r in margins]
    values = [max(r.value, 1e-17) for r in margins]
    ax.barh(range(len(margins)), values, color="tab:blue")
    ax.set_yticks(range(len(margins)))
    ax.set_yticklabels(labels, fontsize=6)
    ax.set_xscale("log")
    ax.set_xlabel("margin (SE units or absolute deviation)")
    ax.set_title("closed-form checks")
    fig.tight_layout()
    path = Path(f"{stem}_margins.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
