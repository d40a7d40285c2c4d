"""End-to-end tests for configs, records, data generation, and runners."""

import numpy as np
import pytest

from cirmc import cli
from cirmc.evaluation import perplexity
from cirmc.harness.config import (
    CONFIG_CLASSES,
    DpmixConfig,
    LdaConfig,
    SyntheticConfig,
    TheoryConfig,
    load_config,
    parse_config_text,
)
from cirmc.harness.datagen import (
    generate_dp_corpus,
    generate_lda_corpus,
    load_truth,
    save_truth,
    truth_sidecar_path,
)
from cirmc.harness.dpmix_run import run_dpmix
from cirmc.harness.lda_run import resolve_lda_corpus, run_lda
from cirmc.harness.records import (
    RECORD_COLUMNS,
    RunRecord,
    read_records_csv,
    write_ks_csv,
    write_records_csv,
)
from cirmc.harness.synthetic import run_synthetic
from cirmc.harness.theory import run_theory
from cirmc.rng import RngStream


def test_parse_config_text():
    parsed = parse_config_text("seeds = 0,1\n# note\niterations = 50\n\nposterior = dense\n")
    assert parsed == {"seeds": "0,1", "iterations": "50", "posterior": "dense"}


def test_parse_config_text_reports_line():
    with pytest.raises(ValueError, match="line 2"):
        parse_config_text("a = 1\nbroken line\n")


def test_load_config_coercion():
    cfg = load_config("synthetic", overrides={"seeds": "3", "fractions": "0.1,0.5",
                                              "iterations": "50", "burn_in": "10"})
    assert isinstance(cfg, SyntheticConfig)
    assert cfg.seeds == (3,)
    assert cfg.fractions == (0.1, 0.5)
    assert cfg.iterations == 50
    dp = load_config("dpmix", overrides={"resample_alpha_exact": "false",
                                         "scir_h_theta": "0.25"})
    assert dp.resample_alpha_exact is False
    assert dp.scir_h_theta == 0.25


def test_load_config_errors():
    with pytest.raises(ValueError, match="unknown experiment"):
        load_config("nope")
    with pytest.raises(ValueError, match="unknown config key"):
        load_config("synthetic", overrides={"bogus": "1"})
    with pytest.raises(ValueError, match="posterior"):
        load_config("synthetic", overrides={"posterior": "weird"})
    with pytest.raises(ValueError):
        load_config("synthetic", overrides={"iterations": "5", "burn_in": "9"})
    assert set(CONFIG_CLASSES) == {"synthetic", "lda", "dpmix", "theory", "gen-data"}


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("seeds = 1,2\niterations = 40\nburn_in = 20\n")
    cfg = load_config("synthetic", path=path)
    assert cfg.seeds == (1, 2)
    assert cfg.iterations == 40


def test_records_csv_round_trip(tmp_path):
    records = [
        RunRecord("synthetic-sparse", "scir", 1, 0.5, 0.01, 100, "d_ks", 0.25),
        RunRecord("synthetic-sparse", "exact", 1, None, None, 100, "d_ks", 0.02),
    ]
    path = tmp_path / "records.csv"
    write_records_csv(path, records)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(RECORD_COLUMNS)
    # None renders as an empty field
    assert ",,," in text
    back = read_records_csv(path)
    assert sorted(back, key=repr) == sorted(records, key=repr)


def test_records_csv_output_is_deterministic(tmp_path):
    records = [
        RunRecord("x", "b", 2, 0.1, None, 5, "m", 1.0),
        RunRecord("x", "a", 1, None, 0.5, 3, "m", 2.0),
        RunRecord("x", "a", 1, 0.2, None, 3, "m", 3.0),
    ]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_records_csv(p1, records)
    write_records_csv(p2, list(reversed(records)))
    assert p1.read_bytes() == p2.read_bytes()


def test_read_records_rejects_foreign_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("foo,bar\n1,2\n")
    with pytest.raises(ValueError):
        read_records_csv(path)


def test_ks_csv_sorted_by_method_then_fraction(tmp_path):
    rows = [
        (1, "sgrld", 0.1, 0.5, 0.6, 0),
        (0, "exact", "", 0.01, 0.02, 0),
        (0, "scir", 0.5, 0.03, 0.04, 0),
        (0, "scir", 0.1, 0.05, 0.06, 0),
        (1, "scir", 0.1, 0.04, 0.05, 0),
    ]
    path = tmp_path / "ks.csv"
    write_ks_csv(path, rows)
    lines = path.read_text().splitlines()
    methods = [ln.split(",")[1] for ln in lines[1:]]
    assert methods == ["exact", "scir", "scir", "scir", "sgrld"]
    # within a method, fraction ascends before seed
    assert lines[2].split(",")[2] == "0.1" and lines[2].split(",")[0] == "0"
    assert lines[3].split(",")[2] == "0.1" and lines[3].split(",")[0] == "1"
    assert lines[4].split(",")[2] == "0.5"


def test_generated_corpora_shapes_and_truth():
    corpus, truth = generate_lda_corpus(RngStream(seed=1), n_topics=2, vocab=8,
                                        n_docs=12, doc_len=6)
    assert len(corpus) == 12
    assert corpus.vocab_size == 8
    assert truth["kind"] == "lda"
    assert truth["phi"].shape == (2, 8)
    assert np.allclose(truth["phi"].sum(axis=1), 1.0)

    users, dp_truth = generate_dp_corpus(RngStream(seed=2), clusters=3, dim=5,
                                         n_users=10, doc_len=6)
    assert len(users) == 10
    assert dp_truth["kind"] == "dpmix"
    assert dp_truth["theta"].shape == (3, 5)
    assert dp_truth["labels"].shape == (10,)
    assert dp_truth["weights"].shape == (3,)
    # every user has at least one token
    assert all(int(np.sum(c)) >= 1 for _, c in users.docs)


def test_truth_sidecar_round_trip(tmp_path):
    truth = {"kind": "lda", "phi": np.array([[0.5, 0.5], [0.1, 0.9]]), "doc_alpha": 0.5}
    corpus_path = tmp_path / "toy.txt"
    sidecar = truth_sidecar_path(corpus_path)
    assert str(sidecar).endswith("toy.txt.truth.npz")
    save_truth(sidecar, truth)
    back = load_truth(sidecar)
    assert back["kind"] == "lda"
    assert np.allclose(back["phi"], truth["phi"])
    assert float(back["doc_alpha"]) == 0.5


def test_run_synthetic_is_reproducible_and_thread_invariant():
    base = dict(seeds=(0,), fractions=(0.1,), scir_grid=(0.5,), sgrld_grid=(0.1,),
                iterations=80, burn_in=40)
    r1, k1 = run_synthetic(SyntheticConfig(**base))
    r2, k2 = run_synthetic(SyntheticConfig(**base))
    assert r1 == r2 and k1 == k2
    r3, k3 = run_synthetic(SyntheticConfig(**base, threads=2))
    assert r1 == r3 and k1 == k3


def test_run_synthetic_orders_methods_by_quality():
    """At a small minibatch fraction the exact-transition sampler must beat
    the Euler baseline by a wide margin on the grid-best KS distance."""
    cfg = SyntheticConfig(seeds=(0, 1), fractions=(0.01,), scir_grid=(0.5, 0.1, 0.05),
                          sgrld_grid=(0.1, 0.01, 0.005), iterations=2000, burn_in=1000)
    records, ks_rows = run_synthetic(cfg)
    rows = ks_rows["sparse"]
    exact = {row[0]: row[3] for row in rows if row[1] == "exact"}
    for seed in (0, 1):
        assert exact[seed] < 0.1
        scir = next(r[3] for r in rows if r[1] == "scir" and r[0] == seed)
        sgrld = next(r[3] for r in rows if r[1] == "sgrld" and r[0] == seed)
        assert scir < sgrld
        # measured about 13x and 16x with these seeds
        assert sgrld / exact[seed] > 5.0
    methods = {r.method for r in records}
    assert methods == {"exact", "scir", "sgrld"}


def test_run_lda_schema_and_truth_row():
    cfg = LdaConfig(seeds=(0,), iterations=20, eval_every=10, n_topics=2,
                    gen_topics=2, vocab=12, n_docs=30, heldout_docs=6, doc_len=8,
                    minibatch=5)
    records = run_lda(cfg)
    assert {r.method for r in records} == {"scir", "sgrld", "truth"}
    assert {r.metric for r in records} == {"perplexity"}
    truth_rows = [r for r in records if r.method == "truth"]
    assert len(truth_rows) == 1
    assert truth_rows[0].seed == -1
    assert truth_rows[0].iteration == 0
    assert np.isfinite(truth_rows[0].value)
    per_method = [r for r in records if r.method == "scir"]
    assert sorted(r.iteration for r in per_method) == [10, 20]


def test_run_lda_single_topic_matches_unigram_baseline():
    """A one-topic model is a smoothed unigram model; both samplers must land
    within a few percent of the closed-form unigram completion perplexity."""
    cfg = LdaConfig(seeds=(0,), iterations=60, eval_every=20, n_topics=1)
    train, heldout, vocab, _ = resolve_lda_corpus(cfg)
    counts = np.zeros(vocab)
    for words, cnts in train:
        counts[words] += cnts
    p = (counts + 0.5) / (counts + 0.5).sum()
    reference = perplexity(heldout, lambda w, c: p)
    records = run_lda(cfg)
    for method in ("scir", "sgrld"):
        final = next(r.value for r in records
                     if r.method == method and r.iteration == 60)
        assert abs(final - reference) / reference < 0.05


def test_run_dpmix_schema():
    cfg = DpmixConfig(seeds=(0,), iterations=30, burn_in=10, exact_iterations=60,
                      exact_burn_in=20, eval_every=10, clusters=2, dim=6, n_users=20,
                      heldout_users=5, doc_len=10, minibatch=8,
                      exact_k_init=4, scir_k_init=4, sgrld_k_init=4)
    records = run_dpmix(cfg)
    assert {r.method for r in records} == {"exact", "scir", "sgrld", "truth"}
    assert {r.metric for r in records} == {"active_clusters", "log_predictive"}
    truth_rows = [r for r in records if r.method == "truth"]
    assert len(truth_rows) == 1 and truth_rows[0].metric == "log_predictive"
    exact_rows = [r for r in records if r.method == "exact"]
    assert all(r.h is None and r.n_fraction is None for r in exact_rows)
    scir_lp = [r for r in records if r.method == "scir" and r.metric == "log_predictive"]
    assert all(np.isfinite(r.value) for r in scir_lp)


def test_run_theory_tiny_config_passes():
    cfg = TheoryConfig(n_settings=2, n_chains=2000, mgf_chains=5000, lemma_trials=5)
    records = run_theory(cfg)
    passes = [r for r in records if r.metric.endswith("_pass")]
    assert passes and all(r.value == 1.0 for r in passes)
    assert {r.method for r in records} == {"moments", "mgf", "lemmas"}
    zero_dev = next(r for r in records if r.metric == "mgf_at_zero_dev")
    assert zero_dev.value == 0.0


def write_cfg(path, text):
    path.write_text(text)
    return str(path)


def test_cli_gen_data_and_synthetic(tmp_path):
    corpus = tmp_path / "toy.txt"
    gen_cfg = write_cfg(tmp_path / "gen.cfg",
                        "kind = lda\nvocab = 12\nn_docs = 20\ndoc_len = 6\ngen_topics = 2\n")
    assert cli.main(["gen-data", "--config", gen_cfg, "--out", str(corpus)]) == 0
    assert corpus.exists()
    assert (tmp_path / "toy.txt.truth.npz").exists()

    syn_cfg = write_cfg(tmp_path / "syn.cfg",
                        "seeds = 0\nfractions = 0.1\nscir_grid = 0.5\n"
                        "sgrld_grid = 0.1\niterations = 60\nburn_in = 30\n")
    out = tmp_path / "syn.csv"
    assert cli.main(["synthetic", "--config", syn_cfg, "--out", str(out)]) == 0
    assert out.exists()
    assert (tmp_path / "syn_ks.csv").exists()
    # figures are emitted unless suppressed
    assert (tmp_path / "syn_sparse_ks.png").exists()
    rows = read_records_csv(out)
    assert rows and {r.experiment for r in rows} == {"synthetic-sparse"}


def test_cli_lda_dpmix_theory_no_plots(tmp_path):
    lda_cfg = write_cfg(tmp_path / "lda.cfg",
                        "seeds = 0\niterations = 10\neval_every = 5\nn_topics = 2\n"
                        "gen_topics = 2\nvocab = 12\nn_docs = 30\nheldout_docs = 6\n"
                        "doc_len = 8\nminibatch = 5\n")
    out = tmp_path / "lda.csv"
    assert cli.main(["lda", "--config", lda_cfg, "--out", str(out), "--no-plots"]) == 0
    assert out.exists()
    assert not list(tmp_path.glob("lda*.png"))

    dp_cfg = write_cfg(tmp_path / "dp.cfg",
                       "seeds = 0\niterations = 20\nburn_in = 5\nexact_iterations = 40\n"
                       "exact_burn_in = 10\neval_every = 10\nclusters = 2\ndim = 6\n"
                       "n_users = 20\nheldout_users = 5\ndoc_len = 10\nminibatch = 8\n"
                       "exact_k_init = 4\nscir_k_init = 4\nsgrld_k_init = 4\n")
    out = tmp_path / "dp.csv"
    assert cli.main(["dpmix", "--config", dp_cfg, "--out", str(out), "--no-plots"]) == 0
    assert read_records_csv(out)

    th_cfg = write_cfg(tmp_path / "th.cfg",
                       "n_settings = 1\nn_chains = 2000\nmgf_chains = 5000\nlemma_trials = 3\n")
    out = tmp_path / "theory.csv"
    assert cli.main(["theory", "--config", th_cfg, "--out", str(out), "--no-plots"]) == 0
    assert read_records_csv(out)


def test_cli_seed_override(tmp_path):
    syn_cfg = write_cfg(tmp_path / "syn.cfg",
                        "fractions = 0.1\nscir_grid = 0.5\nsgrld_grid = 0.1\n"
                        "iterations = 60\nburn_in = 30\n")
    out = tmp_path / "syn.csv"
    rc = cli.main(["synthetic", "--config", syn_cfg, "--out", str(out),
                   "--seeds", "7", "--no-plots"])
    assert rc == 0
    rows = read_records_csv(out)
    assert {r.seed for r in rows} == {7}
