"""Exact transitions for the square-root diffusion and their closed-form theory.

The diffusion d(theta) = (a - theta) dt + sqrt(2 theta) dW has Gamma(a, 1)
as its stationary law and a noncentral chi-squared transition over any time
step h, so chains built on it carry no discretization error. The stochastic
variant replaces the shape a at each step with an unbiased minibatch
estimate a-hat; the moment and MGF functions below describe the law of the
resulting chain exactly and serve as test oracles for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .distributions import POSITIVE_FLOOR, sample_gamma
from .rng import as_generator

__all__ = [
    "CIRChainState",
    "ShapeEstimate",
    "TheoryParams",
    "cir_transition",
    "cir_transition_array",
    "scir_step",
    "mgf_cir",
    "mgf_scir",
    "scir_mean",
    "scir_variance",
    "r_map",
    "r_composed",
    "lemma2_product",
    "transform_to_generalized_gamma",
]


@dataclass(frozen=True)
class CIRChainState:
    """State of one chain coordinate: current value, step count, last stepsize."""

    theta: float
    step: int = 0
    stepsize: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.theta) and self.theta > 0):
            raise ValueError("theta must be positive and finite")
        if self.step < 0:
            raise ValueError("step must be nonnegative")
        if not (np.isfinite(self.stepsize) and self.stepsize > 0):
            raise ValueError("stepsize must be positive and finite")


@dataclass(frozen=True)
class ShapeEstimate:
    """Minibatch shape estimate a-hat = prior_part + count_part.

    ``count_part`` is the scaled minibatch sufficient statistic
    (N/n * batch count); the total is the shape fed to the transition.
    """

    prior_part: float
    count_part: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.prior_part) and self.prior_part > 0):
            raise ValueError("prior_part must be positive and finite")
        if not (np.isfinite(self.count_part) and self.count_part >= 0):
            raise ValueError("count_part must be nonnegative and finite")

    @property
    def total(self) -> float:
        return self.prior_part + self.count_part


@dataclass(frozen=True)
class TheoryParams:
    """Parameters (a, theta0, h, M, Var[a-hat]) for the closed-form chain law."""

    a: float
    theta0: float
    h: float
    M: int
    var_ahat: float = 0.0

    def __post_init__(self) -> None:
        for name in ("a", "theta0", "h"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite")
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        if not (np.isfinite(self.var_ahat) and self.var_ahat >= 0):
            raise ValueError("var_ahat must be nonnegative and finite")


def cir_transition_array(rng, theta, a, h):
    """Advance positive coordinates through one exact transition of duration h.

    theta' = ((1 - e^-h)/2) * W  with  W ~ chi2(2a, 2 theta e^-h / (1 - e^-h)).

    ``theta`` and ``a`` broadcast elementwise; h is a positive scalar
    (h = +inf is allowed and yields an exact stationary Gamma(a, 1) draw).
    The chi-squared draw is realized via its Poisson-gamma mixture, so
    fractional dof 2a < 1 is exact, and outputs are strictly positive.
    """
    if not h > 0:
        raise ValueError("stepsize h must be positive")
    gen = as_generator(rng)
    theta = np.asarray(theta, dtype=float)
    a = np.asarray(a, dtype=float)
    if np.any(theta <= 0) or np.any(a <= 0):
        raise ValueError("theta and a must be positive")
    decay = math.exp(-h)
    width = -math.expm1(-h)  # 1 - e^-h, accurate for small h
    out_shape = np.broadcast_shapes(theta.shape, a.shape)
    # Poisson rate = noncentrality / 2 = theta * e^-h / (1 - e^-h)
    lam = np.broadcast_to(theta * (decay / width), out_shape)
    k = gen.poisson(lam) if out_shape else gen.poisson(float(lam))
    # ((1-e^-h)/2) * chi2(2a + 2k) = Gamma(a + k, rate 1/(1-e^-h))
    return sample_gamma(gen, a + k, rate=1.0 / width)


def cir_transition(rng, state: CIRChainState, a: float, h: float) -> CIRChainState:
    """One exact transition of the chain with true shape ``a``."""
    if not (np.isfinite(h) and h > 0):
        raise ValueError("stepsize h must be positive and finite")
    theta = cir_transition_array(rng, state.theta, a, h)
    return replace(state, theta=float(theta), step=state.step + 1, stepsize=h)


def scir_step(rng, state: CIRChainState, ahat: ShapeEstimate, h: float) -> CIRChainState:
    """One transition with the shape replaced by the minibatch estimate.

    Identical to :func:`cir_transition` with a = ahat.total; that
    substitution is the entire stochastic-gradient mechanism.
    """
    return cir_transition(rng, state, ahat.total, h)


def _growth(s: float, mh: float) -> float:
    """1 - s(1 - e^-mh), the recurring MGF denominator."""
    return 1.0 - s * (-math.expm1(-mh))


def mgf_cir(tp: TheoryParams, s: float) -> float:
    """Closed-form MGF of the exact chain after M steps of size h.

    E[e^{s theta_M}] = [1 - s(1-e^-Mh)]^-a * exp[theta0 s e^-Mh / (1 - s(1-e^-Mh))].
    """
    mh = tp.M * tp.h
    denom = _growth(s, mh)
    if denom <= 0.0:
        raise ValueError(f"s={s} outside MGF domain: requires s(1-e^-Mh) < 1")
    return denom ** (-tp.a) * math.exp(tp.theta0 * s * math.exp(-mh) / denom)


def mgf_scir(tp: TheoryParams, s: float, ahat_sequence: Sequence[ShapeEstimate]) -> float:
    """MGF of the stochastic chain conditional on a fixed a-hat sequence.

    ``ahat_sequence`` is chronological: entry m is the estimate used for the
    transition into theta_m. Multiplies the exact-chain MGF by one factor
    per step, [(1 - s(1-e^-mh)) / (1 - s(1-e^-(m-1)h))]^-(ahat - a).
    Unrolling the one-step conditional MGF from the final step backwards
    shows the factor at index m carries the estimate from step M-m+1: the
    last step's estimate lands on the innermost (m=1) factor. The pairing
    only matters for non-exchangeable sequences; it is what the conditional
    Monte Carlo oracle verifies.
    """
    if len(ahat_sequence) != tp.M:
        raise ValueError(f"ahat_sequence must have length M={tp.M}")
    value = mgf_cir(tp, s)
    prev = _growth(s, 0.0)  # = 1
    for m, ahat in enumerate(reversed(list(ahat_sequence)), start=1):
        cur = _growth(s, m * tp.h)
        if cur <= 0.0:
            raise ValueError(f"s={s} outside MGF domain at factor m={m}")
        value *= (cur / prev) ** (-(ahat.total - tp.a))
        prev = cur
    return value


def scir_mean(tp: TheoryParams) -> float:
    """E[theta_M] = theta0 e^-Mh + a (1 - e^-Mh); independent of Var[a-hat]."""
    mh = tp.M * tp.h
    return tp.theta0 * math.exp(-mh) + tp.a * (-math.expm1(-mh))


def scir_variance(tp: TheoryParams) -> float:
    """Exact-chain variance plus the minibatch-noise inflation term.

    Var = 2 theta0 (e^-Mh - e^-2Mh) + a (1-e^-Mh)^2
          + (1-e^-2Mh) * (1-e^-h)/(1+e^-h) * Var[a-hat].
    """
    mh = tp.M * tp.h
    d = math.exp(-mh)
    g = -math.expm1(-mh)
    exact = 2.0 * tp.theta0 * (d - d * d) + tp.a * g * g
    inflation = (
        (-math.expm1(-2.0 * mh))
        * (-math.expm1(-tp.h))
        / (1.0 + math.exp(-tp.h))
        * tp.var_ahat
    )
    return exact + inflation


def r_map(s: float, h: float) -> float:
    """One application of the MGF-argument map r(s) = s e^-h / (1 - s(1-e^-h))."""
    denom = _growth(s, h)
    if denom == 0.0:
        raise ValueError(f"pole: 1 - s(1-e^-h) = 0 at s={s}, h={h}")
    return s * math.exp(-h) / denom


def r_composed(s: float, h: float, n: int) -> float:
    """Closed form of the n-fold composition: r^(n)(s) = s e^-nh / (1 - s(1-e^-nh))."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    denom = _growth(s, n * h)
    if denom == 0.0:
        raise ValueError(f"pole in n-fold composition at s={s}, h={h}, n={n}")
    return s * math.exp(-n * h) / denom


def lemma2_product(s: float, h: float, n: int) -> float:
    """prod_{i=0}^{n-1} [1 - r^(i)(s)(1 - e^-h)], built by explicit iteration.

    Telescopes to 1 - s(1 - e^-nh); tests verify the identity against this
    direct product.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    width = -math.expm1(-h)
    value = 1.0
    r = s  # r^(0)(s) := s
    for i in range(n):
        value *= 1.0 - r * width
        if i + 1 < n:
            r = r_map(r, h)
    return value


def transform_to_generalized_gamma(theta):
    """Map chain values to the generalized-gamma scale U = 2 sqrt(theta).

    Under the stationary Gamma(a, 1) law, U has density proportional to
    u^{2a-1} e^{-u^2/4}; the inverse map is theta = U^2 / 4.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise ValueError("theta must be positive")
    out = 2.0 * np.sqrt(theta)
    return float(out) if out.ndim == 0 else out
