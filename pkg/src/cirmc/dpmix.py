"""Dirichlet-process multinomial mixture via slice sampling.

The infinite stick-breaking mixture is made finite per sweep by slice
variables u_i < omega_{z_i}: only components whose stick weight clears a
slice can host an item, and sticks are extended from the prior exactly as
far as the smallest slice requires. One sweep is available in two forms:
the exact Gibbs version (every conditional sampled in closed form) and the
minibatch version, where stick and component conditionals are advanced by
positive-chain kernels (exact transitions or the mirrored Euler baseline)
driven by scaled minibatch counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cir import cir_transition_array
from .distributions import sample_beta, sample_gamma
from .rng import as_generator
from .simplex import Minibatch

__all__ = [
    "DPState",
    "stick_weights",
    "dp_init",
    "dp_slice_gibbs_step",
    "dp_slice_stochastic_step",
    "active_cluster_count",
]

# Sticks can brush 1 when a component holds nearly all items; keep log(1-v)
# finite for the concentration update.
_STICK_CAP = 1.0 - 1e-15


def stick_weights(v: np.ndarray) -> np.ndarray:
    """omega_j = v_j * prod_{l<j} (1 - v_l)."""
    v = np.asarray(v, dtype=float)
    lead = np.concatenate(([1.0], np.cumprod(1.0 - v)[:-1]))
    return v * lead


@dataclass(frozen=True)
class DPState:
    """Sticks, component parameters, allocations, and slice variables.

    ``stick_chains`` (J, 2) and ``comp_chains`` (J, d) carry the positive
    chains behind v and theta for the minibatch sweeps; the exact sweep
    leaves them None. ``u_star`` records min u over the items updated last.
    """

    v: np.ndarray
    theta: np.ndarray
    z: np.ndarray
    u: np.ndarray
    alpha: float
    prior_a: float
    stick_chains: np.ndarray | None = None
    comp_chains: np.ndarray | None = None
    u_star: float = np.nan
    step: int = 0

    def __post_init__(self) -> None:
        v = np.minimum(np.asarray(self.v, dtype=float), _STICK_CAP)
        theta = np.asarray(self.theta, dtype=float)
        if v.ndim != 1 or theta.ndim != 2 or theta.shape[0] != v.size:
            raise ValueError("v must be (J,) and theta (J, d)")
        if np.any(v <= 0) or np.any(theta <= 0):
            raise ValueError("sticks and component parameters must be positive")
        if self.alpha <= 0 or self.prior_a <= 0:
            raise ValueError("alpha and prior_a must be positive")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "z", np.asarray(self.z, dtype=np.int64))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))

    @property
    def omega(self) -> np.ndarray:
        return stick_weights(self.v)

    @property
    def n_components(self) -> int:
        return int(self.v.size)

    @property
    def z_star(self) -> int:
        """Count of leading components containing every allocation."""
        return int(self.z.max()) + 1

    def mixture(self):
        """(weights, thetas) pair for predictive scoring."""
        return self.omega, self.theta


def active_cluster_count(state: DPState) -> int:
    """Number of components with at least one allocated item."""
    return int(np.unique(state.z).size)


def dp_init(rng, data, prior_a: float, alpha: float, k_init: int,
            with_chains: bool) -> DPState:
    """Prior-draw initialization with k_init represented components."""
    if k_init < 1:
        raise ValueError("k_init must be >= 1")
    gen = as_generator(rng)
    X = np.asarray(data, dtype=float)
    L, d = X.shape
    stick_chains = np.column_stack([
        sample_gamma(gen, np.ones(k_init)),
        sample_gamma(gen, np.full(k_init, float(alpha))),
    ])
    comp_chains = sample_gamma(gen, np.full((k_init, d), float(prior_a)))
    v = stick_chains[:, 0] / stick_chains.sum(axis=1)
    theta = comp_chains / comp_chains.sum(axis=1, keepdims=True)
    omega = stick_weights(v)
    probs = omega / omega.sum()
    z = np.searchsorted(np.cumsum(probs), gen.random(L), side="right")
    z = np.minimum(z, k_init - 1)
    u = gen.random(L) * omega[z]
    return DPState(
        v=v, theta=theta, z=z, u=u, alpha=float(alpha), prior_a=float(prior_a),
        stick_chains=stick_chains if with_chains else None,
        comp_chains=comp_chains if with_chains else None,
        u_star=float(u.min()),
    )


def _extend_from_prior(gen, v_rows, theta_rows, stick_rows, comp_rows, alpha, prior_a,
                       u_star, d, with_chains):
    """Append prior sticks/components until sum(omega) exceeds 1 - u_star.

    Coverage in stick form: sum_{j<=k} omega_j = 1 - prod_{j<=k}(1 - v_j),
    so extend while the leftover product is >= u_star.
    """
    leftover = float(np.prod(1.0 - np.asarray(v_rows)))
    while leftover >= u_star:
        a_draw = sample_gamma(gen, 1.0)
        b_draw = sample_gamma(gen, float(alpha))
        v_new = min(a_draw / (a_draw + b_draw), _STICK_CAP)
        comp_new = sample_gamma(gen, np.full(d, float(prior_a)))
        v_rows.append(v_new)
        theta_rows.append(comp_new / comp_new.sum())
        if with_chains:
            stick_rows.append((a_draw, b_draw))
            comp_rows.append(comp_new)
        leftover *= 1.0 - v_new


def _coverage_index(v: np.ndarray, u_star: float) -> int:
    """Smallest k with sum_{j<=k} omega_j > 1 - u_star (1-based count)."""
    leftover = np.cumprod(1.0 - v)
    hits = np.nonzero(leftover < u_star)[0]
    if hits.size == 0:
        raise ValueError("sticks do not cover the slice; extension failed")
    return int(hits[0]) + 1


def _resample_allocations(gen, X, omega, log_theta, u):
    """z_i proportional to 1(omega_j > u_i) * f(x_i | theta_j), vectorized."""
    loglik = X @ log_theta.T  # multinomial coefficient is constant in j
    masked = np.where(omega[None, :] > u[:, None], loglik, -np.inf)
    rowmax = masked.max(axis=1, keepdims=True)
    probs = np.exp(masked - rowmax)
    cum = np.cumsum(probs, axis=1)
    r = gen.random(X.shape[0]) * cum[:, -1]
    # sum(cum <= r) lands on the first bucket with cum > r, skipping any
    # zero-probability prefix; clip guards the r == cum[-1] roundoff edge
    return np.minimum((cum <= r[:, None]).sum(axis=1), cum.shape[1] - 1)


def dp_slice_gibbs_step(rng, state: DPState, data, resample_alpha: bool = False,
                        b1: float = 1.0, b2: float = 1.0) -> DPState:
    """One exact sweep over all conditionals.

    Order: slice variables u; stick extension/truncation to the coverage
    index k*; allocations z; component parameters theta (conjugate Dirichlet
    draws); sticks v; weights recomputed; optionally the concentration alpha.
    """
    gen = as_generator(rng)
    X = np.asarray(data, dtype=float)
    L, d = X.shape
    if state.z.size != L:
        raise ValueError("data size does not match allocations")

    omega = state.omega
    u = gen.random(L) * omega[state.z]
    u_star = float(u.min())

    v_rows = list(state.v)
    theta_rows = list(state.theta)
    _extend_from_prior(gen, v_rows, theta_rows, None, None, state.alpha, state.prior_a,
                       u_star, d, with_chains=False)
    v = np.asarray(v_rows)
    k_star = _coverage_index(v, u_star)
    v = v[:k_star]
    theta = np.asarray(theta_rows)[:k_star]
    omega = stick_weights(v)

    z = _resample_allocations(gen, X, omega, np.log(theta), u)

    counts = np.zeros((k_star, d))
    np.add.at(counts, z, X)
    rows = sample_gamma(gen, state.prior_a + counts)
    theta = rows / rows.sum(axis=1, keepdims=True)

    m = np.bincount(z, minlength=k_star).astype(float)
    trailing = np.sum(m) - np.cumsum(m)  # sum_{l>j} m_l
    v = np.minimum(sample_beta(gen, 1.0 + m, state.alpha + trailing), _STICK_CAP)

    alpha = state.alpha
    if resample_alpha:
        # Condition on the occupied-prefix sticks only. The retained count
        # k* depends on where the smallest slice happened to fall, so the
        # number of trailing unoccupied sticks is informative about alpha;
        # conditioning on them without that selection factor biases alpha
        # upward. max(z)+1 is a function of z alone, so it is safe. The
        # trailing sticks are dropped; the next sweep's extension rebuilds
        # them under the new alpha.
        j_occ = int(z.max()) + 1
        v = v[:j_occ]
        theta = theta[:j_occ]
        rate = b2 - float(np.sum(np.log1p(-v)))
        alpha = sample_gamma(gen, b1 + j_occ, rate=rate)

    return replace(state, v=v, theta=theta, z=z, u=u, alpha=float(alpha),
                   u_star=u_star, step=state.step + 1)


def dp_slice_stochastic_step(rng, state: DPState, data, minibatch: Minibatch,
                             h_theta: float, h_dp: float, b1: float = 1.0,
                             b2: float = 1.0, update=cir_transition_array) -> DPState:
    """One minibatch sweep with chain-advanced stick and component updates.

    Steps, in order: recompute Z* and the minibatch; scaled counts
    m-hat_j = (N/n) sum_{i in S} 1(z_i = j); advance the two-gamma stick
    chains toward Beta(1 + m-hat_j, alpha + sum_{l>j} m-hat_l); recompute
    omega; advance component chains toward Dir(prior_a + scaled counts);
    redraw slices u_i for i in S; resample alpha; extend/truncate to the
    coverage index; resample z_i for i in S. ``update`` is the positive-
    chain kernel (exact transition by default, mirrored Euler baseline as
    the alternative).
    """
    if state.stick_chains is None or state.comp_chains is None:
        raise ValueError("stochastic sweep needs a chain-initialized state")
    gen = as_generator(rng)
    X = np.asarray(data, dtype=float)
    L, d = X.shape
    S = minibatch.indices
    if np.any(S >= L):
        raise ValueError("minibatch index out of range")
    scale = L / minibatch.n

    z_star = state.z_star
    z_batch = state.z[S]
    m_hat = scale * np.bincount(z_batch, minlength=z_star).astype(float)[:z_star]
    trailing = np.sum(m_hat) - np.cumsum(m_hat)

    stick_chains = np.array(state.stick_chains, dtype=float)
    stick_chains[:z_star, 0] = update(gen, stick_chains[:z_star, 0], 1.0 + m_hat, h_dp)
    stick_chains[:z_star, 1] = update(gen, stick_chains[:z_star, 1],
                                      state.alpha + trailing, h_dp)
    v = np.array(state.v, dtype=float)
    v[:z_star] = np.minimum(stick_chains[:z_star, 0] / stick_chains[:z_star].sum(axis=1),
                            _STICK_CAP)
    omega = stick_weights(v)

    batch_counts = np.zeros((z_star, d))
    np.add.at(batch_counts, z_batch, X[S])
    comp_chains = np.array(state.comp_chains, dtype=float)
    comp_chains[:z_star] = update(gen, comp_chains[:z_star],
                                  state.prior_a + scale * batch_counts, h_theta)
    theta = comp_chains / comp_chains.sum(axis=1, keepdims=True)

    u = np.array(state.u, dtype=float)
    u[S] = gen.random(S.size) * omega[state.z[S]]

    rate = b2 - float(np.sum(np.log1p(-v[:z_star])))
    alpha = sample_gamma(gen, b1 + z_star, rate=rate)

    u_star = float(u[S].min())
    v_rows = list(v)
    theta_rows = list(theta)
    stick_rows = list(map(tuple, stick_chains))
    comp_rows = list(comp_chains)
    _extend_from_prior(gen, v_rows, theta_rows, stick_rows, comp_rows, alpha,
                       state.prior_a, u_star, d, with_chains=True)
    v = np.asarray(v_rows)
    k_star = _coverage_index(v, u_star)
    keep = max(k_star, int(state.z.max()) + 1)
    v = v[:keep]
    theta = np.asarray(theta_rows)[:keep]
    stick_chains = np.asarray(stick_rows)[:keep]
    comp_chains = np.asarray(comp_rows)[:keep]
    omega = stick_weights(v)

    z = np.array(state.z, dtype=np.int64)
    z[S] = _resample_allocations(gen, X[S], omega[:k_star], np.log(theta[:k_star]), u[S])

    return replace(state, v=v, theta=theta, z=z, u=u, alpha=float(alpha),
                   stick_chains=stick_chains, comp_chains=comp_chains,
                   u_star=u_star, step=state.step + 1)
