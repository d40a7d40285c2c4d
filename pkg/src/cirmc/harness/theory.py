"""Closed-form-vs-Monte-Carlo checks, emitted as records.

Three families: finite-step mean/variance of the minibatch chain against
simulated ensembles at random settings, the conditional MGF against a fixed
shape-estimate sequence, and the composition/telescoping identities of the
MGF-argument map. Margins are reported in standard-error units (or absolute
deviation for the exact identities) so the pass thresholds are explicit.
"""

from __future__ import annotations

import numpy as np

from ..cir import (
    TheoryParams,
    ShapeEstimate,
    cir_transition_array,
    lemma2_product,
    mgf_scir,
    r_composed,
    r_map,
    scir_mean,
    scir_variance,
)
from ..distributions import sample_gamma
from ..rng import RngStream, as_generator
from .config import TheoryConfig
from .records import RunRecord

__all__ = ["simulate_scir_chains", "random_setting", "run_theory",
           "MGF_S_VALUES", "MGF_AHAT_SEQUENCE", "MGF_SETTING"]

# fixed conditional-MGF test point: moderate stepsize, three steps, shape
# estimates straddling the true shape
MGF_SETTING = dict(a=2.0, theta0=1.0, h=0.5, M=3)
MGF_AHAT_SEQUENCE = (3.0, 1.0, 2.0)
MGF_S_VALUES = (-0.5, 0.2, 0.4)


def simulate_scir_chains(rng, tp: TheoryParams, n_chains: int, fixed_ahat=None):
    """Final values of n_chains independent minibatch chains from theta0.

    With ``fixed_ahat`` (length-M scalars) every chain sees that shape
    sequence; otherwise each chain independently draws its per-step shape
    from a Gamma with mean a and variance tp.var_ahat (degenerate at a when
    the variance is zero).
    """
    gen = as_generator(rng)
    theta = np.full(int(n_chains), float(tp.theta0))
    for m in range(tp.M):
        if fixed_ahat is not None:
            ahat = float(fixed_ahat[m])
        elif tp.var_ahat > 0.0:
            shape = tp.a ** 2 / tp.var_ahat
            ahat = sample_gamma(gen, np.full(theta.shape, shape), rate=tp.a / tp.var_ahat)
        else:
            ahat = tp.a
        theta = cir_transition_array(gen, theta, ahat, tp.h)
    return theta


def random_setting(gen) -> TheoryParams:
    """One random (a, theta0, h, M, var_ahat) test point."""
    a = float(gen.uniform(0.3, 5.0))
    theta0 = float(gen.uniform(0.1, 5.0))
    h = float(gen.uniform(0.05, 1.5))
    M = int(gen.integers(1, 11))
    var_ahat = float(gen.uniform(0.0, 1.5) * a ** 2)
    return TheoryParams(a=a, theta0=theta0, h=h, M=M, var_ahat=var_ahat)


def _variance_se(x: np.ndarray) -> float:
    """Standard error of the sample variance via the fourth central moment."""
    n = x.size
    m = np.mean(x)
    s2 = float(np.var(x, ddof=1))
    m4 = float(np.mean((x - m) ** 4))
    inner = m4 - s2 * s2 * (n - 3) / (n - 1)
    return float(np.sqrt(max(inner, 0.0) / n))


def run_theory(config: TheoryConfig):
    """Run every check; one margin row and one pass row per quantity."""
    seed = config.seeds[0]
    records = []

    def emit(method, iteration, metric, value):
        records.append(RunRecord("theory", method, seed, None, None,
                                 iteration, metric, float(value)))

    setting_gen = as_generator(RngStream(seed=seed, stream_id=0))
    for i in range(config.n_settings):
        tp = random_setting(setting_gen)
        theta = simulate_scir_chains(RngStream(seed=seed, stream_id=100 + i),
                                     tp, config.n_chains)
        mean_se = float(np.std(theta, ddof=1) / np.sqrt(theta.size))
        mean_margin = abs(float(np.mean(theta)) - scir_mean(tp)) / mean_se
        var_se = _variance_se(theta)
        var_margin = abs(float(np.var(theta, ddof=1)) - scir_variance(tp)) / var_se
        emit("moments", i, "mean_margin_se", mean_margin)
        emit("moments", i, "mean_pass", 1.0 if mean_margin < config.moment_se_limit else 0.0)
        emit("moments", i, "var_margin_se", var_margin)
        emit("moments", i, "var_pass", 1.0 if var_margin < config.moment_se_limit else 0.0)

    tp = TheoryParams(var_ahat=0.0, **MGF_SETTING)
    ahat_seq = [ShapeEstimate(prior_part=v) for v in MGF_AHAT_SEQUENCE]
    theta = simulate_scir_chains(RngStream(seed=seed, stream_id=1),
                                 tp, config.mgf_chains, fixed_ahat=MGF_AHAT_SEQUENCE)
    for i, s in enumerate(MGF_S_VALUES):
        values = np.exp(s * theta)
        se = float(np.std(values, ddof=1) / np.sqrt(values.size))
        margin = abs(float(np.mean(values)) - mgf_scir(tp, s, ahat_seq)) / se
        emit("mgf", i, "mgf_margin_se", margin)
        emit("mgf", i, "mgf_pass", 1.0 if margin < config.mgf_se_limit else 0.0)
    emit("mgf", len(MGF_S_VALUES), "mgf_at_zero_dev",
         abs(mgf_scir(tp, 0.0, ahat_seq) - 1.0))

    lemma_gen = as_generator(RngStream(seed=seed, stream_id=2))
    worst_comp = 0.0
    worst_prod = 0.0
    for _ in range(config.lemma_trials):
        h = float(lemma_gen.uniform(0.05, 2.0))
        n = int(lemma_gen.integers(1, 51))
        bound = 1.0 / -np.expm1(-n * h)
        s = float(lemma_gen.uniform(-1.0, 0.9 * bound))
        iterated = s
        for _ in range(n):
            iterated = r_map(iterated, h)
        worst_comp = max(worst_comp, abs(iterated - r_composed(s, h, n)))
        closed = 1.0 - s * -np.expm1(-n * h)
        worst_prod = max(worst_prod, abs(lemma2_product(s, h, n) - closed))
    emit("lemmas", 0, "composition_max_dev", worst_comp)
    emit("lemmas", 0, "composition_pass",
         1.0 if worst_comp <= config.lemma_tolerance else 0.0)
    emit("lemmas", 1, "telescope_max_dev", worst_prod)
    emit("lemmas", 1, "telescope_pass",
         1.0 if worst_prod <= config.lemma_tolerance else 0.0)
    return records
