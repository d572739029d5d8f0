"""Synthetic measurement streams for d = w_o^T u + v.

Each node drives a tapped delay line with its own white Gaussian input; the
regressor at time n holds the M most recent input samples (newest first,
zeros before the line fills). Measurement noise is alpha-stable.
"""

import csv
from dataclasses import dataclass

import numpy as np

from difflmp.errors import ParameterError, StructuralError
from difflmp.stable_noise import dispersion_for_gsnr, sample_stable

__all__ = [
    "GroundTruth",
    "NodeStream",
    "draw_ground_truth",
    "tapped_delay_regressors",
    "generate_streams",
    "stack_streams",
    "write_streams_csv",
]


@dataclass(frozen=True)
class GroundTruth:
    """Unknown parameter vector shared by every node."""

    w_o: np.ndarray

    @property
    def filter_len(self):
        return self.w_o.shape[0]


@dataclass(frozen=True)
class NodeStream:
    """Time series observed by one node.

    ``regressors`` has shape (n_iters, M); ``desired`` and ``noise`` have
    shape (n_iters,). ``signal_power`` is the empirical power of the noiseless
    output, pooled over all nodes of the batch the stream was generated in.
    ``dispersion`` is the noise gamma actually used.
    """

    regressors: np.ndarray
    desired: np.ndarray
    noise: np.ndarray
    signal_power: float
    dispersion: float

    def __len__(self):
        return self.desired.shape[0]


def draw_ground_truth(filter_len, rng):
    """Draw ``w_o`` with i.i.d. standard-uniform entries."""
    if int(filter_len) != filter_len or filter_len < 1:
        raise ParameterError(f"filter_len must be a positive integer, got {filter_len!r}")
    return GroundTruth(w_o=rng.uniform(0.0, 1.0, size=int(filter_len)))


def tapped_delay_regressors(x, filter_len):
    """Stack delay-line windows of the input sequence ``x``.

    Row ``n`` is ``[x[n], x[n-1], ..., x[n-M+1]]`` with zeros for negative
    time indices.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    padded = np.concatenate([np.zeros(filter_len - 1), x])
    # row n covers padded[n : n + M], reversed so the newest sample is first
    idx = np.arange(n)[:, None] + np.arange(filter_len - 1, -1, -1)[None, :]
    return padded[idx]


def generate_streams(truth, n_nodes, n_iters, noise_params, rng, gsnr_db=None):
    """Generate one measurement stream per node.

    Parameters
    ----------
    truth : GroundTruth
    n_nodes, n_iters : int
    noise_params : StableParams
        Noise law. When ``gsnr_db`` is given its ``gamma`` is replaced by the
        dispersion that yields that GSNR for the measured signal power.
    rng : numpy.random.Generator
        Parent source; each node draws from its own child generator spawned
        from it, so node streams are independent and individually reproducible.
    gsnr_db : float, optional

    Returns
    -------
    list of NodeStream
    """
    if int(n_nodes) != n_nodes or n_nodes < 1:
        raise ParameterError(f"n_nodes must be a positive integer, got {n_nodes!r}")
    if int(n_iters) != n_iters or n_iters < 1:
        raise ParameterError(f"n_iters must be a positive integer, got {n_iters!r}")
    noise_params.validate()
    m = truth.filter_len
    children = rng.spawn(int(n_nodes))

    regs = [tapped_delay_regressors(g.standard_normal(int(n_iters)), m) for g in children]
    clean = [u @ truth.w_o for u in regs]
    power = float(np.mean(np.concatenate(clean) ** 2))

    params = noise_params
    if gsnr_db is not None:
        params = noise_params.with_gamma(dispersion_for_gsnr(power, gsnr_db))

    streams = []
    for g, u, y in zip(children, regs, clean):
        v = sample_stable(params, g, size=int(n_iters))
        streams.append(
            NodeStream(
                regressors=u,
                desired=y + v,
                noise=v,
                signal_power=power,
                dispersion=params.gamma,
            )
        )
    return streams


def stack_streams(streams):
    """Pack node streams into arrays ``U`` (n_iters, N, M) and ``D`` (n_iters, N)."""
    lengths = {len(s) for s in streams}
    if len(lengths) != 1:
        raise StructuralError(f"streams have unequal lengths: {sorted(lengths)}")
    u = np.stack([s.regressors for s in streams], axis=1)
    d = np.stack([s.desired for s in streams], axis=1)
    return u, d


def write_streams_csv(streams, path):
    """Dump streams as rows ``node, n, u_0..u_{M-1}, d, v`` for debugging."""
    m = streams[0].regressors.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "n"] + [f"u{i}" for i in range(m)] + ["d", "v"])
        for k, s in enumerate(streams):
            for n in range(len(s)):
                row = [k, n] + [repr(x) for x in s.regressors[n].tolist()]
                w.writerow(row + [repr(float(s.desired[n])), repr(float(s.noise[n]))])
