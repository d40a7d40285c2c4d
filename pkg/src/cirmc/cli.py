"""Command-line front end.

Subcommands run one experiment each and write a sorted CSV of records plus
figures next to it (suppress with --no-plots). gen-data materializes a
synthetic corpus together with its ground-truth sidecar.
"""

from __future__ import annotations

import argparse
import sys

from .harness.config import load_config
from .harness.records import write_ks_csv, write_records_csv
from .rng import RngStream

EXPERIMENTS = ("synthetic", "lda", "dpmix", "theory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cirmc",
        description="simplex samplers built on exact gamma-process transitions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synthetic", "sparse/dense Dirichlet-posterior benchmark"),
        ("lda", "topic model held-out perplexity"),
        ("dpmix", "mixture model with stick-breaking slice sampler"),
        ("theory", "closed-form moment/MGF/identity checks"),
        ("gen-data", "write a synthetic corpus plus truth sidecar"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="flat key=value config file")
        cmd.add_argument("--out", help="output path (CSV, or corpus for gen-data)")
        cmd.add_argument("--seeds", help="comma-separated seed list override")
        cmd.add_argument("--threads", type=int, help="worker processes")
        if name == "gen-data":
            cmd.add_argument("--kind", choices=("lda", "dpmix"),
                             help="corpus generator override")
        else:
            cmd.add_argument("--no-plots", action="store_true",
                             help="skip figure rendering")
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.seeds is not None:
        out["seeds"] = args.seeds
    if args.threads is not None:
        out["threads"] = args.threads
    if getattr(args, "kind", None) is not None:
        out["kind"] = args.kind
    return out


def _run_gen_data(config, out_path) -> list:
    from .harness.datagen import generate_synthetic_corpus, save_truth, truth_sidecar_path

    rng = RngStream(seed=config.seeds[0], stream_id=0)
    if config.kind == "lda":
        corpus, truth = generate_synthetic_corpus(
            rng, config.gen_topics, config.vocab, config.n_docs,
            config.doc_len, config.sparsity, kind="lda",
            doc_alpha=config.doc_alpha)
    else:
        corpus, truth = generate_synthetic_corpus(
            rng, config.clusters, config.dim, config.n_users,
            config.doc_len, config.sparsity, kind="dpmix")
    corpus.write(out_path)
    sidecar = truth_sidecar_path(out_path)
    save_truth(sidecar, truth)
    return [str(out_path), str(sidecar)]


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    config = load_config(command, args.config, _overrides(args))

    if command == "gen-data":
        written = _run_gen_data(config, args.out or "corpus.txt")
        for path in written:
            print(path)
        return 0

    out = args.out or f"{command}.csv"
    stem = out[:-4] if out.endswith(".csv") else out
    written = []

    if command == "synthetic":
        from .harness.synthetic import run_synthetic

        records, ks_rows = run_synthetic(config)
        if len(ks_rows) == 1:
            only = next(iter(ks_rows.values()))
            write_ks_csv(f"{stem}_ks.csv", only)
            written.append(f"{stem}_ks.csv")
        else:
            for posterior, rows in sorted(ks_rows.items()):
                path = f"{stem}_{posterior}_ks.csv"
                write_ks_csv(path, rows)
                written.append(path)
    elif command == "lda":
        from .harness.lda_run import run_lda

        records = run_lda(config)
    elif command == "dpmix":
        from .harness.dpmix_run import run_dpmix

        records = run_dpmix(config)
    else:
        from .harness.theory import run_theory

        records = run_theory(config)

    write_records_csv(out, records)
    written.insert(0, out)

    if not args.no_plots:
        from .harness.plots import plot_dpmix, plot_lda, plot_synthetic, plot_theory

        plot_fn = {"synthetic": plot_synthetic, "lda": plot_lda,
                   "dpmix": plot_dpmix, "theory": plot_theory}[command]
        written.extend(str(p) for p in plot_fn(records, stem))

    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
