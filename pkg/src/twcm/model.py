"""The full trivariate model: copula dependence plus arbitrary marginals.

An observation triple (theta1, theta2, theta3) lives on the torus, a
hyper-cylinder, or any mix of circular and positive-linear coordinates;
the coordinate type is carried entirely by each marginal's domain tag.
The joint density composes the copula with the probability-integral
transforms u_i = 2*pi*F_i(theta_i).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._util import TWO_PI, as_rng, wc_kernel_density
from .copula import (
    ConditionalWCSpec,
    RhoVector,
    conditional_phi,
    constants,
    copula_sample,
    normalize_rho,
    pairwise_phi,
    require_valid,
)
from .errors import DegenerateDataError, DomainError, InvalidParameterError
from .marginals import CIRCULAR, Marginal, WrappedCauchy, marginal_from_dict


@dataclass(frozen=True)
class TwcmModel:
    """Copula parameters plus exactly three marginals.

    The stored rho is always the identifiable representative (product 1);
    construction normalizes it, which leaves the density unchanged.
    """

    rho: RhoVector
    marginals: tuple[Marginal, Marginal, Marginal]

    def __post_init__(self):
        if len(self.marginals) != 3:
            raise InvalidParameterError("a model needs exactly 3 marginals")
        require_valid(self.rho)
        # skip rescaling when already identifiable so that save/load
        # round-trips are bit-identical
        if not self.rho.identifiable:
            object.__setattr__(self, "rho", normalize_rho(self.rho))
        object.__setattr__(self, "marginals", tuple(self.marginals))

    @property
    def domains(self) -> tuple[str, str, str]:
        return tuple(m.domain for m in self.marginals)

    @property
    def n_free_params(self) -> int:
        """2 copula parameters (product-1 manifold) plus the marginals'."""
        return 2 + sum(m.n_params for m in self.marginals)

    # -- data handling ----------------------------------------------------
    def validate_data(self, data) -> np.ndarray:
        """Check an (n, 3) array against the per-coordinate domains.

        Raises :class:`DomainError` naming the offending rows.
        """
        data = np.atleast_2d(np.asarray(data, dtype=float))
        if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] == 0:
            raise DomainError("data must be a nonempty (n, 3) array")
        bad = ~np.isfinite(data).all(axis=1)
        for i, m in enumerate(self.marginals):
            if m.domain != CIRCULAR:
                bad |= data[:, i] <= 0.0
        if bad.any():
            rows = np.flatnonzero(bad)
            raise DomainError(
                f"rows outside the model domain: {rows.tolist()[:20]}"
                + ("..." if rows.size > 20 else "")
            )
        return data

    def pseudo_observations(self, data) -> np.ndarray:
        """Copula-scale data u_i = 2*pi*F_i(theta_i), shape (n, 3)."""
        data = self.validate_data(data)
        return np.column_stack(
            [TWO_PI * m.cdf(data[:, i]) for i, m in enumerate(self.marginals)]
        )

    # -- densities ---------------------------------------------------------
    def log_density(self, theta):
        """Joint log density at one triple or an (n, 3) block."""
        theta = np.asarray(theta, dtype=float)
        single = theta.ndim == 1
        data = self.validate_data(theta)
        u = self.pseudo_observations(data)
        cc = constants(self.rho)
        bracket = cc.c1 + 2.0 * (
            self.rho.rho12 * np.cos(u[:, 0] - u[:, 1])
            + self.rho.rho13 * np.cos(u[:, 0] - u[:, 2])
            + self.rho.rho23 * np.cos(u[:, 1] - u[:, 2])
        )
        out = 3.0 * np.log(TWO_PI) + np.log(cc.c2) - np.log(bracket)
        for i, m in enumerate(self.marginals):
            out = out + m.logpdf(data[:, i])
        return float(out[0]) if single else out

    def density(self, theta):
        return np.exp(self.log_density(theta))

    def loglik(self, data) -> float:
        """Sum of log densities; raises on rows with vanishing density."""
        values = self.log_density(np.atleast_2d(np.asarray(data, dtype=float)))
        finite = np.isfinite(values)
        if not finite.all():
            rows = np.flatnonzero(~finite)
            raise DegenerateDataError(
                f"zero density at rows {rows.tolist()[:20]}", rows=rows
            )
        return float(values.sum())

    # -- marginal and conditional laws --------------------------------------
    def bivariate_density(self, pair: tuple[int, int], x_i, x_j):
        """Bivariate marginal density of coordinates ``pair`` (1-based)."""
        i, j = pair
        phi = pairwise_phi(self.rho, pair)
        mi, mj = self.marginals[i - 1], self.marginals[j - 1]
        ui = TWO_PI * np.asarray(mi.cdf(x_i))
        uj = TWO_PI * np.asarray(mj.cdf(x_j))
        kern = wc_kernel_density(ui - uj, 0.0, phi.phi) / TWO_PI  # t_2
        out = 4.0 * np.pi**2 * kern * mi.pdf(x_i) * mj.pdf(x_j)
        return out if np.ndim(out) else float(out)

    def cond_density_2given1(self, theta, given: int):
        """Density of the two remaining coordinates given coordinate
        ``given`` (1-based); ``theta`` holds the full triple(s)."""
        theta = np.asarray(theta, dtype=float)
        single = theta.ndim == 1
        data = self.validate_data(theta)
        out = np.exp(self.log_density(data)) / self.marginals[given - 1].pdf(
            data[:, given - 1]
        )
        return float(out[0]) if single else out

    def cond_density_1given1(self, i: int, x_i, j: int, x_j):
        """Density of coordinate i at ``x_i`` given coordinate j at ``x_j``."""
        phi = pairwise_phi(self.rho, (min(i, j), max(i, j)))
        mi, mj = self.marginals[i - 1], self.marginals[j - 1]
        ui = TWO_PI * np.asarray(mi.cdf(x_i))
        uj = TWO_PI * np.asarray(mj.cdf(x_j))
        out = TWO_PI * wc_kernel_density(ui, uj, phi.phi) * mi.pdf(x_i)
        return out if np.ndim(out) else float(out)

    def conditional_spec(self, i: int, theta_j, theta_k) -> ConditionalWCSpec:
        """Kernel parameters of coordinate i given the other two, whose
        values are passed in increasing coordinate order."""
        j, k = sorted({1, 2, 3} - {i})
        uj = TWO_PI * float(self.marginals[j - 1].cdf(theta_j))
        uk = TWO_PI * float(self.marginals[k - 1].cdf(theta_k))
        ph = complex(conditional_phi(self.rho, i, uj, uk))
        return ConditionalWCSpec(eta=float(np.angle(ph) % TWO_PI), delta=abs(ph))

    def cond_density_1given2(self, theta, i: int):
        """Density of coordinate i given the other two; ``theta`` holds the
        full triple(s)."""
        theta = np.asarray(theta, dtype=float)
        single = theta.ndim == 1
        data = self.validate_data(theta)
        u = self.pseudo_observations(data)
        j, k = sorted({1, 2, 3} - {i})
        ph = conditional_phi(self.rho, i, u[:, j - 1], u[:, k - 1])
        mi = self.marginals[i - 1]
        out = (
            TWO_PI
            * wc_kernel_density(u[:, i - 1], np.angle(ph), np.abs(ph))
            * mi.pdf(data[:, i - 1])
        )
        return float(out[0]) if single else out

    # -- sampling -----------------------------------------------------------
    def sample(self, n: int, seed=None) -> np.ndarray:
        """Exact sampling: copula draw, then theta_i = F_i^{-1}(u_i / 2pi)."""
        rng = as_rng(seed)
        u = copula_sample(n, self.rho, rng)
        return np.column_stack(
            [m.quantile(u[:, i] / TWO_PI) for i, m in enumerate(self.marginals)]
        )

    # -- serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "rho": [self.rho.rho12, self.rho.rho13, self.rho.rho23],
            "marginals": [m.to_dict() for m in self.marginals],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TwcmModel":
        rho = RhoVector(*map(float, d["rho"]))
        margs = tuple(marginal_from_dict(m) for m in d["marginals"])
        return cls(rho=rho, marginals=margs)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "TwcmModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def wc_closed_form_log_density(rho: RhoVector, wc_marginals, theta):
    """Integral-free joint log density when all three marginals are
    wrapped Cauchy.

    Uses only cosines/sines of (theta_i - mu_i): the g_i terms are the
    wrapped Cauchy denominators and h_ij collapses
    g_i g_j cos(2*pi*(F_i - F_j)) to a trigonometric polynomial.  Must
    agree with the composed path to machine precision.
    """
    require_valid(rho)
    wc = tuple(wc_marginals)
    if len(wc) != 3 or not all(isinstance(m, WrappedCauchy) for m in wc):
        raise InvalidParameterError("closed form needs three wrapped Cauchy marginals")
    single = np.asarray(theta).ndim == 1
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    cc = constants(rho)
    cos_d = [np.cos(theta[:, i] - wc[i].mu) for i in range(3)]
    sin_d = [np.sin(theta[:, i] - wc[i].mu) for i in range(3)]
    xi = [m.xi for m in wc]
    g = [1.0 + xi[i] ** 2 - 2.0 * xi[i] * cos_d[i] for i in range(3)]

    def h(i, j):
        return (
            (1.0 + xi[i] ** 2) * (1.0 + xi[j] ** 2) * cos_d[i] * cos_d[j]
            + (1.0 - xi[i] ** 2) * (1.0 - xi[j] ** 2) * sin_d[i] * sin_d[j]
            - 2.0 * xi[j] * (1.0 + xi[i] ** 2) * cos_d[i]
            - 2.0 * xi[i] * (1.0 + xi[j] ** 2) * cos_d[j]
            + 4.0 * xi[i] * xi[j]
        )

    denom = cc.c1 * g[0] * g[1] * g[2] + 2.0 * (
        rho.rho12 * g[2] * h(0, 1)
        + rho.rho13 * g[1] * h(0, 2)
        + rho.rho23 * g[0] * h(1, 2)
    )
    num = np.log(cc.c2) + sum(np.log1p(-x * x) for x in xi)
    out = num - np.log(denom)
    return float(out[0]) if single else out


def kato_pewsey_bivariate_density(phi: float, wc_i: WrappedCauchy, wc_j: WrappedCauchy,
                                  theta_i, theta_j):
    """Bivariate wrapped Cauchy density for a pair of wrapped Cauchy
    marginals coupled with kernel concentration ``phi`` (|phi| < 1).

    Independent algebraic route to the same law as the copula
    composition; the two must agree wherever both apply.
    """
    if abs(phi) >= 1.0:
        raise InvalidParameterError("Kato-Pewsey form requires |phi| < 1")
    xi_i, xi_j = wc_i.xi, wc_j.xi
    ci = np.cos(np.asarray(theta_i, dtype=float) - wc_i.mu)
    cj = np.cos(np.asarray(theta_j, dtype=float) - wc_j.mu)
    si = np.sin(np.asarray(theta_i, dtype=float) - wc_i.mu)
    sj = np.sin(np.asarray(theta_j, dtype=float) - wc_j.mu)
    p2 = phi * phi
    gam = (1.0 - p2) * (1.0 - xi_i**2) * (1.0 - xi_j**2) / (4.0 * np.pi**2)
    g0 = (1.0 + p2) * (1.0 + xi_i**2) * (1.0 + xi_j**2) - 8.0 * phi * xi_i * xi_j
    g1 = 2.0 * (1.0 + p2) * xi_i * (1.0 + xi_j**2) - 4.0 * phi * (1.0 + xi_i**2) * xi_j
    g2 = 2.0 * (1.0 + p2) * (1.0 + xi_i**2) * xi_j - 4.0 * phi * xi_i * (1.0 + xi_j**2)
    g3 = -4.0 * (1.0 + p2) * xi_i * xi_j + 2.0 * phi * (1.0 + xi_i**2) * (1.0 + xi_j**2)
    g4 = 2.0 * phi * (1.0 - xi_i**2) * (1.0 - xi_j**2)
    out = gam / (g0 - g1 * ci - g2 * cj - g3 * ci * cj - g4 * si * sj)
    return out if np.ndim(out) else float(out)
