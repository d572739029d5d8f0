"""Network mean-square deviation and learning-curve summaries."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from difflmp.errors import ParameterError, StructuralError

__all__ = [
    "DB_FLOOR",
    "MsdCurve",
    "msd_linear",
    "to_db",
    "network_msd",
    "average_curves",
    "write_curve_csv",
    "read_curve_csv",
    "write_steady_csv",
    "read_steady_csv",
]

DB_FLOOR = -320.0


def to_db(x):
    """``10*log10(x)`` floored at :data:`DB_FLOOR` (also for x == 0)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.maximum(10.0 * np.log10(x), DB_FLOOR)
    if out.ndim == 0:
        return float(out)
    return out


def msd_linear(estimates, w_o):
    """Mean over nodes of ``||w_o - w_k||**2``; leading batch axes are kept.

    ``estimates`` has shape (..., N, M) and ``w_o`` shape (M,).
    """
    est = np.asarray(estimates, dtype=float)
    w_o = np.asarray(w_o, dtype=float)
    if est.ndim < 2 or w_o.ndim != 1 or est.shape[-1] != w_o.shape[0] or est.shape[-2] < 1:
        raise StructuralError(f"estimates {est.shape} incompatible with w_o {w_o.shape}")
    dev = est - w_o
    return np.mean(np.sum(dev * dev, axis=-1), axis=-1)


def network_msd(estimates, w_o):
    """Network MSD in dB for estimates of shape (N, M)."""
    return to_db(msd_linear(estimates, w_o))


@dataclass(frozen=True)
class MsdCurve:
    """Averaged learning curve in dB with its steady-state summary."""

    per_iteration_db: np.ndarray
    steady_state_db: float
    window_fraction: float

    @staticmethod
    def steady_window(length, window_fraction):
        return max(1, math.ceil(window_fraction * length))

    def __len__(self):
        return self.per_iteration_db.shape[0]


def steady_state(per_iteration_db, window_fraction):
    """Mean of the trailing ``ceil(window_fraction * length)`` dB values."""
    if not 0.0 < window_fraction <= 1.0:
        raise ParameterError(f"window_fraction must lie in (0, 1], got {window_fraction!r}")
    curve = np.asarray(per_iteration_db, dtype=float)
    n = MsdCurve.steady_window(curve.shape[0], window_fraction)
    return float(np.mean(curve[-n:]))


def average_curves(curves, window_fraction=0.1):
    """Average per-trial linear MSD sequences and convert to dB.

    Parameters
    ----------
    curves : sequence of 1-D array_like
        Linear-domain network MSD per iteration, one sequence per trial.
    window_fraction : float, optional
        Trailing fraction used for the steady-state value.

    Returns
    -------
    MsdCurve
    """
    curves = list(curves)
    if not curves:
        raise StructuralError("need at least one curve to average")
    lengths = {len(c) for c in curves}
    if len(lengths) != 1:
        raise StructuralError(f"curves have unequal lengths: {sorted(lengths)}")
    # accumulate in trial order so results are reproducible bit for bit
    total = np.zeros(lengths.pop())
    for c in curves:
        total = total + np.asarray(c, dtype=float)
    db = to_db(total / len(curves))
    db = np.atleast_1d(db)
    return MsdCurve(
        per_iteration_db=db,
        steady_state_db=steady_state(db, window_fraction),
        window_fraction=float(window_fraction),
    )


def _write_header(fh, header_lines):
    for line in header_lines:
        fh.write(f"# {line}\n")


def _data_rows(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    return rows[0], rows[1:]


def write_curve_csv(curve, path, header_lines=()):
    """Write ``iteration,msd_db`` rows with shortest round-trip float text."""
    with open(path, "w", newline="") as fh:
        _write_header(fh, header_lines)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "msd_db"])
        for n, v in enumerate(np.asarray(curve.per_iteration_db).tolist()):
            w.writerow([n, repr(v)])


def read_curve_csv(path):
    """Inverse of :func:`write_curve_csv`; returns the dB values."""
    header, rows = _data_rows(path)
    if header != ["iteration", "msd_db"]:
        raise StructuralError(f"unexpected curve header {header}")
    return np.array([float(r[1]) for r in rows])


def write_steady_csv(rows, path, header_lines=()):
    """Write ``alpha,p,steady_db`` summary rows."""
    with open(path, "w", newline="") as fh:
        _write_header(fh, header_lines)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "p", "steady_db"])
        for alpha, p, db in rows:
            w.writerow([repr(float(alpha)), repr(float(p)), repr(float(db))])


def read_steady_csv(path):
    header, rows = _data_rows(path)
    if header != ["alpha", "p", "steady_db"]:
        raise StructuralError(f"unexpected summary header {header}")
    return [tuple(float(x) for x in r) for r in rows]
