"""Alpha-stable noise: sampler and exact characteristic function.

The parameterization is

    f(t) = exp{ j*delta*t - gamma*|t|**alpha * [1 + j*beta*sgn(t)*S(t, alpha)] }

with S(t, alpha) = tan(alpha*pi/2) for alpha != 1 and (2/pi)*log|t| for
alpha == 1. ``gamma`` is the dispersion, so the scale of the law is
gamma**(1/alpha). For alpha == 2 the law is Gaussian with variance 2*gamma.

Samples are drawn with the Chambers-Mallows-Stuck transform.
"""

from dataclasses import dataclass

import numpy as np

from difflmp.errors import ParameterError

__all__ = [
    "StableParams",
    "characteristic_fn",
    "sample_stable",
    "dispersion_for_gsnr",
    "empirical_cf",
]


@dataclass(frozen=True)
class StableParams:
    """Parameters (alpha, beta, gamma, delta) of an alpha-stable law.

    Defaults give the symmetric, zero-location case used throughout the
    simulations.
    """

    alpha: float
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        if not np.isfinite(a) or not 0.0 < a <= 2.0:
            raise ParameterError(f"alpha must lie in (0, 2], got {a!r}")
        if not np.isfinite(b) or not -1.0 <= b <= 1.0:
            raise ParameterError(f"beta must lie in [-1, 1], got {b!r}")
        if not np.isfinite(g) or not g > 0.0:
            raise ParameterError(f"gamma must be positive, got {g!r}")
        if not np.isfinite(d):
            raise ParameterError(f"delta must be finite, got {d!r}")

    @property
    def scale(self):
        """Scale parameter gamma**(1/alpha)."""
        return self.gamma ** (1.0 / self.alpha)

    def with_gamma(self, gamma):
        return StableParams(self.alpha, self.beta, gamma, self.delta)


def characteristic_fn(params, t):
    """Evaluate the characteristic function of the stable law at ``t``.

    Parameters
    ----------
    params : StableParams
    t : float or array_like

    Returns
    -------
    complex or ndarray of complex
    """
    params.validate()
    t_arr = np.asarray(t, dtype=float)
    abs_t = np.abs(t_arr)
    sgn = np.sign(t_arr)
    if params.alpha == 1.0:
        # sgn(0) * log|0| is taken as 0 so that f(0) = 1
        safe = np.where(abs_t > 0.0, abs_t, 1.0)
        skew = sgn * (2.0 / np.pi) * np.log(safe)
    else:
        skew = sgn * np.tan(params.alpha * np.pi / 2.0)
    exponent = (
        1j * params.delta * t_arr
        - params.gamma * abs_t**params.alpha * (1.0 + 1j * params.beta * skew)
    )
    out = np.exp(exponent)
    if out.ndim == 0:
        return complex(out)
    return out


def _standard_cms(alpha, beta, rng, size):
    """Chambers-Mallows-Stuck draws of a unit-scale, zero-location stable law.

    ``beta`` follows the Samorodnitsky-Taqqu sign convention here.
    """
    v = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size=size)
    w = rng.standard_exponential(size=size)
    if alpha == 1.0:
        half_pi_bv = np.pi / 2.0 + beta * v
        return (2.0 / np.pi) * (
            half_pi_bv * np.tan(v)
            - beta * np.log((np.pi / 2.0) * w * np.cos(v) / half_pi_bv)
        )
    zeta = beta * np.tan(np.pi * alpha / 2.0)
    b = np.arctan(zeta) / alpha
    s = (1.0 + zeta**2) ** (1.0 / (2.0 * alpha))
    av = alpha * (v + b)
    return (
        s
        * np.sin(av)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - av) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_stable(params, rng, size=None):
    """Draw alpha-stable samples whose law has the characteristic function
    returned by :func:`characteristic_fn`.

    Parameters
    ----------
    params : StableParams
    rng : numpy.random.Generator
        Seeded random source; identical generator states yield identical draws.
    size : int or tuple of int, optional
        Output shape. ``None`` returns a single float.

    Returns
    -------
    float or ndarray
    """
    params.validate()
    alpha, beta = params.alpha, params.beta
    sigma = params.scale
    if alpha == 1.0:
        x = _standard_cms(1.0, beta, rng, size)
        x = sigma * x + (2.0 / np.pi) * beta * sigma * np.log(sigma) + params.delta
    else:
        # the +j*beta sign in the exponent is opposite to the S1 convention
        x = sigma * _standard_cms(alpha, -beta, rng, size) + params.delta
    if size is None:
        return float(x)
    return x


def dispersion_for_gsnr(signal_power, gsnr_db):
    """Noise dispersion giving the requested generalized SNR.

    GSNR is signal power divided by dispersion, so
    ``gamma = signal_power / 10**(gsnr_db / 10)``.
    """
    if not np.isfinite(signal_power) or signal_power <= 0.0:
        raise ParameterError(f"signal_power must be positive, got {signal_power!r}")
    return float(signal_power / 10.0 ** (gsnr_db / 10.0))


def empirical_cf(samples, t):
    """Monte Carlo estimate of E[exp(j t X)] with per-component standard errors.

    Returns
    -------
    estimate : ndarray of complex, shape (len(t),)
    stderr_real, stderr_imag : ndarray, shape (len(t),)
    """
    x = np.asarray(samples, dtype=float).ravel()
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tx = np.outer(t, x)
    c, s = np.cos(tx), np.sin(tx)
    n = x.size
    est = c.mean(axis=1) + 1j * s.mean(axis=1)
    return est, c.std(axis=1, ddof=1) / np.sqrt(n), s.std(axis=1, ddof=1) / np.sqrt(n)
