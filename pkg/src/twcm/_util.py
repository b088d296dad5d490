"""Shared numerical helpers: angle wrapping, the wrapped Cauchy kernel,
and a vectorized monotone-CDF inverter."""

from __future__ import annotations

import numpy as np

from .errors import SingularKernelError

TWO_PI = 2.0 * np.pi

# |concentration| closer to 1 than this is treated as singular.
_UNIT_CONC_TOL = 1e-12


def wrap_angle(x):
    """Reduce angles to [0, 2*pi). Accepts scalars or arrays."""
    return np.mod(x, TWO_PI)


def as_rng(seed_or_rng) -> np.random.Generator:
    """Coerce ``None``, an integer seed, or a Generator into a Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def effective_concentration(conc):
    """Map a kernel concentration to its representative in (-1, 1).

    The kernel ``|1 - a^2| / (1 + a^2 - 2 a cos(x - c))`` defines the same
    density for ``a`` and ``1/a``, so any ``|a| != 1`` has an equivalent
    representative inside the unit interval.
    """
    a = np.asarray(conc, dtype=float)
    if np.any(np.abs(np.abs(a) - 1.0) <= _UNIT_CONC_TOL):
        raise SingularKernelError(
            "wrapped Cauchy kernel is singular at unit concentration"
        )
    big = np.abs(a) > 1.0
    out = np.where(big, np.divide(1.0, a, out=np.zeros_like(a), where=big), a)
    return out if out.ndim else float(out)


def wc_kernel_log_density(x, center, conc):
    """Log of the wrapped Cauchy kernel with arbitrary concentration.

    ``(1/2pi) |1 - a^2| / (1 + a^2 - 2 a cos(x - center))``, a proper
    circular density for every ``|a| != 1``.
    """
    a = effective_concentration(conc)
    a = np.asarray(a, dtype=float)
    num = np.log1p(-a * a)  # a in (-1, 1) after canonicalization
    den = np.log((1.0 + a * a) - 2.0 * a * np.cos(np.asarray(x) - center))
    out = num - den - np.log(TWO_PI)
    return out if out.ndim else float(out)


def wc_kernel_density(x, center, conc):
    return np.exp(wc_kernel_log_density(x, center, conc))


def wc_kernel_sample(center, conc, rng: np.random.Generator, size=None):
    """Draw from the wrapped Cauchy kernel by the Moebius transform of a
    fresh uniform angle.  ``center``/``conc`` broadcast against ``size``."""
    xi = np.asarray(effective_concentration(conc), dtype=float)
    if size is None:
        size = np.broadcast(np.asarray(center), xi).shape
    u = TWO_PI * rng.random(size)
    b = (1.0 - xi) / (1.0 + xi)
    # atan2 form of mu + 2*arctan(b*tan(u/2)), continuous across u = pi
    draw = center + 2.0 * np.arctan2(b * np.sin(u / 2.0), np.cos(u / 2.0))
    return wrap_angle(draw)


def invert_monotone_cdf(cdf, p, lo, hi, iters=80):
    """Vectorized bisection for a nondecreasing ``cdf`` on [lo, hi].

    Resolves the root of ``cdf(x) = p`` to interval width
    ``(hi - lo) * 2**-iters``, far below 1e-10 for one period.
    """
    p = np.asarray(p, dtype=float)
    scalar = p.ndim == 0
    flat = np.atleast_1d(p).astype(float).ravel()
    lo_arr = np.full(flat.shape, lo, dtype=float)
    hi_arr = np.full(flat.shape, hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo_arr + hi_arr)
        below = np.asarray(cdf(mid)).ravel() < flat
        lo_arr = np.where(below, mid, lo_arr)
        hi_arr = np.where(below, hi_arr, mid)
    mid = 0.5 * (lo_arr + hi_arr)
    return float(mid[0]) if scalar else mid.reshape(p.shape)


def periodic_grid(n):
    """Midpoint grid for spectrally-accurate quadrature on [0, 2*pi)."""
    return TWO_PI * (np.arange(n) + 0.5) / n
