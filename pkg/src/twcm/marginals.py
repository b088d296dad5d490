"""Univariate marginal families: circular uniform, wrapped Cauchy,
von Mises, cardioid (all on [0, 2*pi)) and Weibull (on (0, inf)).

Every family exposes pdf, cdf (with an explicit circular origin),
quantile, sampling by inverse transform, and weighted maximum-likelihood
fitting.  The circular CDF origin is the location parameter mu, so the
copula pseudo-observations u = 2*pi*F(theta) are well defined and
reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import i0e, i1e, ive

from ._util import TWO_PI, as_rng, invert_monotone_cdf, wrap_angle
from .errors import DomainError, InvalidParameterError

KAPPA_MAX = 1e6
XI_MAX = 1.0 - 1e-9
RHO_C_MAX = 0.5 - 1e-9

CIRCULAR = "circular"
LINEAR = "linear"


def _weights_or_ones(data, weights):
    data = np.asarray(data, dtype=float)
    if data.ndim != 1 or data.size == 0:
        raise DomainError("data must be a nonempty 1-D array")
    if weights is None:
        w = np.ones_like(data)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != data.shape:
            raise DomainError("weights must match data length")
        if np.any(w < 0) or w.sum() <= 0:
            raise DomainError("weights must be nonnegative with positive sum")
    return data, w


def _weighted_circular_moment(theta, w):
    """Weighted mean direction and mean resultant length."""
    z = np.sum(w * np.exp(1j * theta)) / w.sum()
    return wrap_angle(np.angle(z)), np.abs(z)


class Marginal:
    """Base marginal; subclasses are frozen dataclasses."""

    family: ClassVar[str]
    domain: ClassVar[str]
    n_params: ClassVar[int]

    # -- evaluation ------------------------------------------------------
    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def logpdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def _check_quantile_arg(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0.0) | (p >= 1.0)):
            raise DomainError("quantile argument must lie in [0, 1)")
        return p

    @property
    def origin(self):
        """Start of the CDF's accumulation (circular families only)."""
        return None

    # -- sampling and likelihood ----------------------------------------
    def sample(self, n: int, seed=None):
        """Inverse-transform sampling; deterministic for a fixed seed."""
        rng = as_rng(seed)
        return self.quantile(rng.random(n))

    def loglik(self, data, weights=None) -> float:
        data, w = _weights_or_ones(data, weights)
        return float(np.sum(w * self.logpdf(data)))

    # -- serialization ---------------------------------------------------
    def params_dict(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params_dict(),
            "origin": self.origin,
            "domain": self.domain,
        }

    @classmethod
    def fit(cls, data, weights=None) -> "Marginal":
        raise NotImplementedError


@dataclass(frozen=True)
class CircularUniform(Marginal):
    """Uniform law on the circle; the copula's native marginal."""

    family: ClassVar[str] = "uniform"
    domain: ClassVar[str] = CIRCULAR
    n_params: ClassVar[int] = 0

    @property
    def origin(self):
        return 0.0

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, -np.log(TWO_PI))
        return out if out.ndim else float(out)

    def cdf(self, x):
        out = wrap_angle(np.asarray(x, dtype=float)) / TWO_PI
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_quantile_arg(p)
        out = TWO_PI * p
        return out if out.ndim else float(out)

    def params_dict(self):
        return {}

    @classmethod
    def fit(cls, data, weights=None):
        _weights_or_ones(data, weights)
        return cls()


@dataclass(frozen=True)
class WrappedCauchy(Marginal):
    """Wrapped Cauchy with location mu and concentration xi in (-1, 1).

    CDF and quantile are closed forms; sampling is the Moebius transform
    of a uniform angle.
    """

    mu: float
    xi: float

    family: ClassVar[str] = "wrapped_cauchy"
    domain: ClassVar[str] = CIRCULAR
    n_params: ClassVar[int] = 2

    def __post_init__(self):
        if not (np.isfinite(self.mu) and abs(self.xi) < 1.0):
            raise InvalidParameterError(
                f"wrapped Cauchy requires finite mu and |xi| < 1, got {self}"
            )
        object.__setattr__(self, "mu", float(wrap_angle(self.mu)))

    @property
    def origin(self):
        return self.mu

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        xi = self.xi
        out = (
            np.log1p(-xi * xi)
            - np.log(TWO_PI)
            - np.log(1.0 + xi * xi - 2.0 * xi * np.cos(x - self.mu))
        )
        return out if out.ndim else float(out)

    def cdf(self, x):
        y = wrap_angle(np.asarray(x, dtype=float) - self.mu)
        a = (1.0 + self.xi) / (1.0 - self.xi)
        # atan2 form of (1/pi) arctan(a tan(y/2)) + 1{y > pi}, continuous
        out = np.arctan2(a * np.sin(y / 2.0), np.cos(y / 2.0)) / np.pi
        out = np.where(out < 0.0, out + 2.0, out)  # guard y just below 2*pi
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_quantile_arg(p)
        b = (1.0 - self.xi) / (1.0 + self.xi)
        out = wrap_angle(
            self.mu + 2.0 * np.arctan2(b * np.sin(np.pi * p), np.cos(np.pi * p))
        )
        return out if out.ndim else float(out)

    def params_dict(self):
        return {"mu": self.mu, "xi": self.xi}

    @classmethod
    def fit(cls, data, weights=None):
        theta, w = _weights_or_ones(data, weights)
        mu0, rbar = _weighted_circular_moment(theta, w)
        if rbar >= XI_MAX:
            warnings.warn(
                "degenerate circular data: wrapped Cauchy xi capped", RuntimeWarning
            )
            return cls(mu=mu0, xi=XI_MAX)
        # derivative-free search over (mu, atanh(xi))
        z_cap = np.arctanh(XI_MAX)

        def nll(params):
            mu, z = params
            xi = np.tanh(np.clip(z, -z_cap, z_cap))
            return -np.sum(
                w
                * (
                    np.log1p(-xi * xi)
                    - np.log(1.0 + xi * xi - 2.0 * xi * np.cos(theta - mu))
                )
            )

        x0 = np.array([mu0, np.arctanh(np.clip(rbar, -0.999, 0.999))])
        res = minimize(nll, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-10, "maxiter": 2000})
        mu_hat = wrap_angle(res.x[0])
        xi_hat = float(np.tanh(np.clip(res.x[1], -z_cap, z_cap)))
        return cls(mu=float(mu_hat), xi=xi_hat)


def _vonmises_cdf_terms(kappa: float) -> int:
    return int(max(32, kappa + 12.0 * np.sqrt(kappa + 1.0) + 20.0))


@dataclass(frozen=True)
class VonMises(Marginal):
    """Von Mises with location mu and concentration kappa >= 0.

    The CDF is the exact integral of the Fourier expansion from the origin
    mu; the quantile inverts it by bracketed bisection.
    """

    mu: float
    kappa: float

    family: ClassVar[str] = "von_mises"
    domain: ClassVar[str] = CIRCULAR
    n_params: ClassVar[int] = 2

    def __post_init__(self):
        if not (np.isfinite(self.mu) and 0.0 <= self.kappa <= KAPPA_MAX):
            raise InvalidParameterError(
                f"von Mises requires finite mu and 0 <= kappa <= {KAPPA_MAX:g}"
            )
        object.__setattr__(self, "mu", float(wrap_angle(self.mu)))

    @property
    def origin(self):
        return self.mu

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        # log(2*pi*I0(k)) = log(2*pi*i0e(k)) + k, stable for large kappa
        out = (
            self.kappa * (np.cos(x - self.mu) - 1.0)
            - np.log(TWO_PI * i0e(self.kappa))
        )
        return out if out.ndim else float(out)

    def cdf(self, x):
        y = wrap_angle(np.asarray(x, dtype=float) - self.mu)
        n_terms = _vonmises_cdf_terms(self.kappa)
        k = np.arange(1, n_terms + 1)
        ratios = ive(k, self.kappa) / i0e(self.kappa)
        out = y / TWO_PI + (ratios / k) @ np.sin(np.outer(k, y)) / np.pi
        out = np.clip(out, 0.0, 1.0)
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_quantile_arg(p)
        n_terms = _vonmises_cdf_terms(self.kappa)
        k = np.arange(1, n_terms + 1)
        ratios = ive(k, self.kappa) / i0e(self.kappa)

        def cdf_offset(y):
            return y / TWO_PI + (ratios / k) @ np.sin(np.outer(k, np.atleast_1d(y))) / np.pi

        out = invert_monotone_cdf(cdf_offset, p, 0.0, TWO_PI)
        out = wrap_angle(self.mu + out)
        return out if np.ndim(out) else float(out)

    def params_dict(self):
        return {"mu": self.mu, "kappa": self.kappa}

    @classmethod
    def fit(cls, data, weights=None):
        theta, w = _weights_or_ones(data, weights)
        mu_hat, rbar = _weighted_circular_moment(theta, w)
        kappa_hat = _solve_vonmises_kappa(rbar)
        return cls(mu=float(mu_hat), kappa=kappa_hat)


def _vonmises_a1(kappa):
    return i1e(kappa) / i0e(kappa)


def _solve_vonmises_kappa(rbar: float) -> float:
    """Solve A1(kappa) = rbar by Newton from the standard starting value."""
    if rbar <= 0.0:
        return 0.0
    if rbar >= 1.0 - 1e-12:
        warnings.warn(
            "degenerate circular data: von Mises kappa capped", RuntimeWarning
        )
        return KAPPA_MAX
    kappa = rbar * (2.0 - rbar**2) / (1.0 - rbar**2)
    for _ in range(100):
        a1 = _vonmises_a1(kappa)
        # d A1 / d kappa
        deriv = 1.0 - a1 * a1 - a1 / max(kappa, 1e-12)
        if deriv <= 0.0:
            break
        step = (a1 - rbar) / deriv
        kappa -= step
        if kappa <= 0.0:
            kappa = 1e-8
        if abs(step) < 1e-12 * max(1.0, kappa):
            break
    if kappa > KAPPA_MAX:
        warnings.warn(
            "degenerate circular data: von Mises kappa capped", RuntimeWarning
        )
        kappa = KAPPA_MAX
    return float(kappa)


@dataclass(frozen=True)
class Cardioid(Marginal):
    """Cardioid density (1/2pi)(1 + 2 rho_c cos(x - mu)), |rho_c| < 1/2."""

    mu: float
    rho_c: float

    family: ClassVar[str] = "cardioid"
    domain: ClassVar[str] = CIRCULAR
    n_params: ClassVar[int] = 2

    def __post_init__(self):
        if not (np.isfinite(self.mu) and abs(self.rho_c) < 0.5):
            raise InvalidParameterError(
                f"cardioid requires finite mu and |rho_c| < 1/2, got {self}"
            )
        object.__setattr__(self, "mu", float(wrap_angle(self.mu)))

    @property
    def origin(self):
        return self.mu

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.log1p(2.0 * self.rho_c * np.cos(x - self.mu)) - np.log(TWO_PI)
        return out if out.ndim else float(out)

    def cdf(self, x):
        y = wrap_angle(np.asarray(x, dtype=float) - self.mu)
        out = y / TWO_PI + self.rho_c * np.sin(y) / np.pi
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_quantile_arg(p)
        out = invert_monotone_cdf(
            lambda y: y / TWO_PI + self.rho_c * np.sin(y) / np.pi, p, 0.0, TWO_PI
        )
        out = wrap_angle(self.mu + out)
        return out if np.ndim(out) else float(out)

    def params_dict(self):
        return {"mu": self.mu, "rho_c": self.rho_c}

    @classmethod
    def fit(cls, data, weights=None):
        theta, w = _weights_or_ones(data, weights)
        mu0, rbar = _weighted_circular_moment(theta, w)
        z_cap = np.arctanh(2.0 * RHO_C_MAX)

        def nll(params):
            mu, z = params
            rc = 0.5 * np.tanh(np.clip(z, -z_cap, z_cap))
            return -np.sum(w * np.log1p(2.0 * rc * np.cos(theta - mu)))

        rc0 = np.clip(rbar, -0.45, 0.45)
        x0 = np.array([mu0, np.arctanh(2.0 * rc0)])
        res = minimize(nll, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-10, "maxiter": 2000})
        rc_hat = float(0.5 * np.tanh(np.clip(res.x[1], -z_cap, z_cap)))
        if abs(rc_hat) >= RHO_C_MAX:
            warnings.warn(
                "cardioid concentration at its cap: data too peaked for the family",
                RuntimeWarning,
            )
        return cls(mu=float(wrap_angle(res.x[0])), rho_c=rc_hat)


@dataclass(frozen=True)
class Weibull(Marginal):
    """Weibull on (0, inf) with shape nu > 0 and scale lam > 0."""

    shape: float
    scale: float

    family: ClassVar[str] = "weibull"
    domain: ClassVar[str] = LINEAR
    n_params: ClassVar[int] = 2

    def __post_init__(self):
        if not (self.shape > 0.0 and self.scale > 0.0):
            raise InvalidParameterError(
                f"Weibull requires positive shape and scale, got {self}"
            )

    def _check_domain(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
            raise DomainError("Weibull observations must be positive and finite")
        return x

    def logpdf(self, x):
        x = self._check_domain(x)
        nu, lam = self.shape, self.scale
        z = x / lam
        with np.errstate(over="ignore"):  # z**nu -> inf means logpdf -> -inf
            out = np.log(nu / lam) + (nu - 1.0) * np.log(z) - z**nu
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = self._check_domain(x)
        with np.errstate(over="ignore"):
            out = -np.expm1(-((x / self.scale) ** self.shape))
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = self._check_quantile_arg(p)
        out = self.scale * (-np.log1p(-p)) ** (1.0 / self.shape)
        return out if out.ndim else float(out)

    def params_dict(self):
        return {"shape": self.shape, "scale": self.scale}

    @classmethod
    def fit(cls, data, weights=None):
        x, w = _weights_or_ones(data, weights)
        if np.any(x <= 0.0):
            raise DomainError("Weibull data must be positive")
        logx = np.log(x)
        wsum = w.sum()
        mean_logx = np.dot(w, logx) / wsum

        def profile_eq(nu):
            xw = x**nu
            s = np.dot(w, xw)
            return np.dot(w, xw * logx) / s - mean_logx - 1.0 / nu

        def profile_deriv(nu):
            xw = x**nu
            s = np.dot(w, xw)
            s1 = np.dot(w, xw * logx)
            s2 = np.dot(w, xw * logx * logx)
            return (s2 * s - s1 * s1) / (s * s) + 1.0 / (nu * nu)

        # moment-style start, then Newton on the profile shape equation
        sd_logx = np.sqrt(max(np.dot(w, (logx - mean_logx) ** 2) / wsum, 1e-12))
        nu = float(np.clip((np.pi / np.sqrt(6.0)) / sd_logx, 1e-3, 1e3))
        converged = False
        for _ in range(100):
            g = profile_eq(nu)
            step = g / profile_deriv(nu)
            nu_new = nu - step
            if nu_new <= 0.0:
                nu_new = nu / 2.0
            if abs(nu_new - nu) < 1e-12 * max(1.0, nu):
                nu = nu_new
                converged = True
                break
            nu = nu_new
        if not converged and abs(profile_eq(nu)) > 1e-8:
            # bracketed fallback for hard cases
            lo, hi = 1e-3, 1e3
            if profile_eq(lo) * profile_eq(hi) < 0:
                nu = brentq(profile_eq, lo, hi, xtol=1e-12)
        lam = float((np.dot(w, x**nu) / wsum) ** (1.0 / nu))
        return cls(shape=float(nu), scale=lam)


FAMILIES: dict[str, type[Marginal]] = {
    cls.family: cls
    for cls in (CircularUniform, WrappedCauchy, VonMises, Cardioid, Weibull)
}


def marginal_from_dict(d: dict) -> Marginal:
    cls = FAMILIES[d["family"]]
    return cls(**d.get("params", {}))


def fit_mle(family, data, weights=None) -> Marginal:
    """Weighted maximum-likelihood fit for a family given by tag or class.

    Uniform weights reproduce the plain MLE; integer weights k reproduce
    the fit on k-fold replicated data.
    """
    if isinstance(family, str):
        try:
            cls = FAMILIES[family]
        except KeyError:
            raise InvalidParameterError(
                f"unknown marginal family {family!r}; choose from {sorted(FAMILIES)}"
            ) from None
    elif isinstance(family, type) and issubclass(family, Marginal):
        cls = family
    else:
        cls = type(family)
        if not issubclass(cls, Marginal):
            raise InvalidParameterError(f"not a marginal family: {family!r}")
    return cls.fit(data, weights)
