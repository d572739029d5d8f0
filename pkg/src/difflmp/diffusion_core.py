"""Diffusion, global and non-cooperative least-mean-p-power recursions.

Estimates are stored as arrays of shape (..., N, M); leading batch axes let a
single pass advance several independent runs (for example one per power
order p) on shared data.
"""

import logging
from dataclasses import dataclass

import numpy as np

from difflmp.errors import ParameterError, StructuralError

__all__ = [
    "LmpConfig",
    "NetworkState",
    "lmp_gain",
    "diffusion_update",
    "diffusion_lmp_step",
    "global_update",
    "global_lmp_step",
    "noncooperative_lmp_step",
]

log = logging.getLogger(__name__)


def _check_p(p):
    p_arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p_arr)) or np.any(p_arr <= 0.0) or np.any(p_arr > 2.0):
        raise ParameterError(f"power order p must lie in (0, 2], got {p!r}")
    return p_arr


@dataclass(frozen=True)
class LmpConfig:
    """Power order ``p`` and step size(s) ``mu`` (scalar or one per node)."""

    p: float
    mu: object = 0.005

    def __post_init__(self):
        _check_p(self.p)
        mu = np.asarray(self.mu, dtype=float)
        if mu.ndim > 1 or not np.all(np.isfinite(mu)) or np.any(mu <= 0.0):
            raise ParameterError(f"step sizes must be positive, got {self.mu!r}")
        if self.p <= 1.0:
            log.warning("p=%g <= 1: the LMP gain is non-smooth at zero error", self.p)

    def mu_vector(self, n_nodes):
        mu = np.asarray(self.mu, dtype=float)
        if mu.ndim == 0:
            return np.full(n_nodes, float(mu))
        if mu.shape != (n_nodes,):
            raise StructuralError(f"expected {n_nodes} step sizes, got {mu.shape[0]}")
        return mu


@dataclass(frozen=True)
class NetworkState:
    """Per-node estimates and the intermediates of the latest round.

    Shapes are (N, M). ``iteration`` is the index n of the last completed
    round; the initial state is all zeros at n = -1.
    """

    estimates: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    iteration: int = -1

    @classmethod
    def zeros(cls, n_nodes, filter_len):
        z = np.zeros((n_nodes, filter_len))
        return cls(estimates=z, phi=z.copy(), psi=z.copy(), iteration=-1)


def lmp_gain(e, p):
    """Error nonlinearity ``|e|**(p-2) * e``, written as ``sign(e) * |e|**(p-1)``.

    Zero at ``e == 0`` for every p. ``p`` may be an array broadcastable
    against ``e``.
    """
    p_arr = _check_p(p)
    e_arr = np.asarray(e, dtype=float)
    mag = np.abs(e_arr)
    nz = mag > 0.0
    powered = np.power(np.where(nz, mag, 1.0), p_arr - 1.0)
    out = np.where(nz, np.sign(e_arr) * powered, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def diffusion_update(w, u, d, a1, a2, c, p, mu):
    """One synchronous diffusion LMP round on raw arrays.

    Parameters
    ----------
    w : ndarray, shape (..., N, M)
        Estimates from the previous round.
    u : ndarray, shape (N, M)
        Regressors at this time.
    d : ndarray, shape (N,)
        Desired samples at this time.
    a1, a2, c : ndarray, shape (N, N)
        Column-stochastic weights indexed [l, k].
    p : float or ndarray broadcastable to the batch shape ``w.shape[:-2]``
    mu : ndarray, shape (N,)

    Returns
    -------
    phi, psi, w_new : ndarray, shape (..., N, M)
    """
    p = np.asarray(p, dtype=float)[..., None, None]
    # phi_k = sum_l a1[l, k] w_l
    phi = a1.T @ w
    c_diag = np.diagonal(c)
    if np.count_nonzero(c) == np.count_nonzero(c_diag):
        # no measurement exchange: only e_{k,n} against phi_k is needed
        err = d - np.sum(phi * u, axis=-1)
        g = lmp_gain(err[..., None], p)[..., 0] * c_diag
        psi = phi + (mu * g)[..., None] * u
    else:
        # err[..., k, l] = d_l - phi_k^T u_l
        err = d - phi @ u.T
        g = lmp_gain(err, p) * c.T
        psi = phi + mu[:, None] * (g @ u)
    w_new = a2.T @ psi
    return phi, psi, w_new


def diffusion_lmp_step(state, u, d, weights, cfg):
    """Advance a :class:`NetworkState` by one diffusion LMP round.

    All intermediate estimates phi are formed before any adaptation, and all
    adapted estimates psi before the final combination.
    """
    w = np.asarray(state.estimates, dtype=float)
    u = np.asarray(u, dtype=float)
    d = np.asarray(d, dtype=float)
    n, m = w.shape
    if u.shape != (n, m) or d.shape != (n,) or weights.n_nodes != n:
        raise StructuralError(
            f"state {w.shape}, regressors {u.shape}, desired {d.shape} "
            f"and {weights.n_nodes}-node weights are inconsistent"
        )
    phi, psi, w_new = diffusion_update(
        w, u, d, weights.a1, weights.a2, weights.c, cfg.p, cfg.mu_vector(n)
    )
    return NetworkState(estimates=w_new, phi=phi, psi=psi, iteration=state.iteration + 1)


def noncooperative_lmp_step(state, u, d, cfg):
    """Each node adapts on its own data only (all weights identity)."""
    n = state.estimates.shape[0]
    eye = np.eye(n)
    w = np.asarray(state.estimates, dtype=float)
    u = np.asarray(u, dtype=float)
    d = np.asarray(d, dtype=float)
    if u.shape != w.shape or d.shape != (n,):
        raise StructuralError(f"state {w.shape}, regressors {u.shape}, desired {d.shape}")
    phi, psi, w_new = diffusion_update(w, u, d, eye, eye, eye, cfg.p, cfg.mu_vector(n))
    return NetworkState(estimates=w_new, phi=phi, psi=psi, iteration=state.iteration + 1)


def global_update(w, u, d, p, mu):
    """Centralized steepest-descent LMP update on raw arrays.

    ``w`` has shape (..., M); ``u`` (N, M); ``d`` (N,); ``mu`` (N,).
    """
    p = np.asarray(p, dtype=float)[..., None]
    err = d - w @ u.T
    return w + (mu * lmp_gain(err, p)) @ u


def global_lmp_step(w, u, d, cfg):
    """``w_n = w_{n-1} + sum_k mu_k * lmp_gain(e_k, p) * u_k``, with
    ``e_k = d_k - w_{n-1}^T u_k``."""
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)
    d = np.asarray(d, dtype=float)
    if w.ndim != 1 or u.ndim != 2 or u.shape[1] != w.shape[0] or d.shape != (u.shape[0],):
        raise StructuralError(
            f"estimate {w.shape}, regressors {u.shape} and desired {d.shape} are inconsistent"
        )
    return global_update(w, u, d, cfg.p, cfg.mu_vector(u.shape[0]))
