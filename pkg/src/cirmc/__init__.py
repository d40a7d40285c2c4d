"""Discretization-free stochastic-gradient MCMC on the probability simplex.

The core object is the square-root diffusion whose transition law is known
in closed form, so a chain can be advanced by sampling that law directly at
any stepsize instead of discretizing the dynamics. Minibatch versions
substitute an unbiased shape estimate per step. Built on top: Dirichlet
posterior sampling, a topic model, a stick-breaking mixture, closed-form
moment/MGF oracles, and an experiment harness with a CLI.
"""

from .cir import (
    CIRChainState,
    ShapeEstimate,
    TheoryParams,
    cir_transition,
    cir_transition_array,
    lemma2_product,
    mgf_cir,
    mgf_scir,
    r_composed,
    r_map,
    scir_mean,
    scir_step,
    scir_variance,
    transform_to_generalized_gamma,
)
from .distributions import (
    POSITIVE_FLOOR,
    NonCentralChiSq,
    cdf_beta,
    cdf_gamma,
    sample_beta,
    sample_categorical,
    sample_dirichlet,
    sample_gamma,
    sample_noncentral_chisq,
)
from .evaluation import (
    KSReport,
    dirichlet_ks_distance,
    ks_uniform,
    log_predictive,
    perplexity,
    rosenblatt_transform,
    split_for_completion,
)
from .corpus import Corpus
from .dpmix import (
    DPState,
    active_cluster_count,
    dp_init,
    dp_slice_gibbs_step,
    dp_slice_stochastic_step,
    stick_weights,
)
from .lda import (
    LdaState,
    doc_topic_posterior_mean,
    lda_local_z_sweep,
    lda_scir_step,
    lda_sgrld_step,
    stepsize_schedule,
)
from .rng import RngStream, as_generator
from .simplex import (
    Minibatch,
    SimplexChain,
    SparseCounts,
    check_simplex,
    estimate_shape,
    exact_dirichlet_posterior,
    scir_simplex_step,
    sgrld_simplex_step,
    sgrld_update_array,
    var_ahat_without_replacement,
)

__version__ = "0.1.0"

__all__ = [
    "CIRChainState",
    "ShapeEstimate",
    "TheoryParams",
    "cir_transition",
    "cir_transition_array",
    "lemma2_product",
    "mgf_cir",
    "mgf_scir",
    "r_composed",
    "r_map",
    "scir_mean",
    "scir_step",
    "scir_variance",
    "transform_to_generalized_gamma",
    "POSITIVE_FLOOR",
    "NonCentralChiSq",
    "cdf_beta",
    "cdf_gamma",
    "sample_beta",
    "sample_categorical",
    "sample_dirichlet",
    "sample_gamma",
    "sample_noncentral_chisq",
    "KSReport",
    "dirichlet_ks_distance",
    "ks_uniform",
    "log_predictive",
    "perplexity",
    "rosenblatt_transform",
    "split_for_completion",
    "Corpus",
    "DPState",
    "active_cluster_count",
    "dp_init",
    "dp_slice_gibbs_step",
    "dp_slice_stochastic_step",
    "stick_weights",
    "LdaState",
    "doc_topic_posterior_mean",
    "lda_local_z_sweep",
    "lda_scir_step",
    "lda_sgrld_step",
    "stepsize_schedule",
    "RngStream",
    "as_generator",
    "Minibatch",
    "SimplexChain",
    "SparseCounts",
    "check_simplex",
    "estimate_shape",
    "exact_dirichlet_posterior",
    "scir_simplex_step",
    "sgrld_simplex_step",
    "sgrld_update_array",
    "var_ahat_without_replacement",
    "__version__",
]
