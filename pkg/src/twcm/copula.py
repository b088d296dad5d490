"""Trivariate wrapped Cauchy copula on [0, 2*pi)^3.

The copula density is

    t(u; rho) = c2 / (c1 + 2 [rho12 cos(u1-u2) + rho13 cos(u1-u3)
                              + rho23 cos(u2-u3)]),

with uniform univariate marginals.  This module provides the constants,
parameter validity checks, the identifiability normalization
(rho12*rho13*rho23 = 1), the bivariate/conditional kernels, and exact
sequential sampling.

Pair and coordinate indices are 1-based throughout, matching the
parameter names rho12, rho13, rho23.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import (
    TWO_PI,
    as_rng,
    effective_concentration,
    periodic_grid,
    wc_kernel_density,
    wc_kernel_log_density,
    wc_kernel_sample,
    wrap_angle,
)
from .errors import InvalidParameterError

_IDENTIFIABLE_TOL = 1e-9


@dataclass(frozen=True)
class RhoVector:
    """The three dependence parameters of the copula."""

    rho12: float
    rho13: float
    rho23: float

    def as_array(self) -> np.ndarray:
        return np.array([self.rho12, self.rho13, self.rho23], dtype=float)

    @property
    def product(self) -> float:
        return self.rho12 * self.rho13 * self.rho23

    @property
    def identifiable(self) -> bool:
        """True when the product constraint rho12*rho13*rho23 = 1 holds."""
        return abs(self.product - 1.0) <= _IDENTIFIABLE_TOL

    def pair(self, i: int, j: int) -> float:
        """rho_ij for 1-based coordinate indices (order-insensitive)."""
        key = (min(i, j), max(i, j))
        return {(1, 2): self.rho12, (1, 3): self.rho13, (2, 3): self.rho23}[key]

    def scaled(self, t: float) -> "RhoVector":
        return RhoVector(t * self.rho12, t * self.rho13, t * self.rho23)


@dataclass(frozen=True)
class RhoValidity:
    """Report produced by :func:`validate_rho`; never raises."""

    finite: bool
    nonzero: bool
    positive_product: bool
    # permutation_checks[i-1] is |rho_jk| < |rho_ij rho_ik| / (|rho_ij| + |rho_ik|)
    # for the permutation that singles out coordinate i.
    permutation_checks: tuple[bool, bool, bool]

    @property
    def valid(self) -> bool:
        return (
            self.finite
            and self.nonzero
            and self.positive_product
            and any(self.permutation_checks)
        )

    @property
    def passing_permutations(self) -> tuple[int, ...]:
        """1-based singled-out coordinates whose permutation check passes."""
        return tuple(i + 1 for i, ok in enumerate(self.permutation_checks) if ok)


def validate_rho(rho: RhoVector) -> RhoValidity:
    """Check the structural validity conditions of the dependence parameters.

    The parameters must be nonzero and finite with positive product, and at
    least one of the three distinct permutations (i, j, k) must satisfy
    ``|rho_jk| < |rho_ij rho_ik| / (|rho_ij| + |rho_ik|)``.
    """
    r = rho.as_array()
    finite = bool(np.all(np.isfinite(r)))
    nonzero = bool(np.all(r != 0.0))
    if not (finite and nonzero):
        return RhoValidity(finite, nonzero, False, (False, False, False))
    a12, a13, a23 = np.abs(r)
    positive_product = rho.product > 0.0
    checks = (
        a23 < a12 * a13 / (a12 + a13),  # i = 1
        a13 < a12 * a23 / (a12 + a23),  # i = 2
        a12 < a13 * a23 / (a13 + a23),  # i = 3
    )
    return RhoValidity(finite, nonzero, positive_product, checks)


def require_valid(rho: RhoVector) -> None:
    report = validate_rho(rho)
    if not report.valid:
        raise InvalidParameterError(
            f"invalid copula parameters {rho}: {report}"
        )


def normalize_rho(rho: RhoVector) -> RhoVector:
    """Rescale to the identifiable representative with product 1.

    Scaling by any t > 0 leaves the copula density unchanged, so the
    cube-root factor pins a unique representative without moving the model.
    """
    prod = rho.product
    if not np.isfinite(prod) or prod <= 0.0:
        raise InvalidParameterError(
            f"cannot normalize rho with nonpositive product {prod}"
        )
    return rho.scaled(prod ** (-1.0 / 3.0))


@dataclass(frozen=True)
class CopulaConstants:
    """Normalizing constants of the copula density."""

    c1: float
    c2: float


def constants(rho: RhoVector) -> CopulaConstants:
    """Compute c1 and c2.  Both are positive and homogeneous of degree 1
    in rho; c2's radicand must be strictly positive for the density to
    exist."""
    require_valid(rho)
    r12, r13, r23 = rho.rho12, rho.rho13, rho.rho23
    a = r12 * r13 / r23
    b = r12 * r23 / r13
    d = r13 * r23 / r12
    c1 = a + b + d
    radicand = a * a + b * b + d * d - 2.0 * (r12 * r12 + r13 * r13 + r23 * r23)
    if radicand <= 0.0:
        raise InvalidParameterError(
            f"degenerate copula parameters {rho}: nonpositive radicand {radicand}"
        )
    c2 = math.sqrt(radicand) / TWO_PI**3
    return CopulaConstants(c1, c2)


def _cos_diffs(u):
    """cos of the three pairwise angle differences; u is (..., 3)."""
    u = np.asarray(u, dtype=float)
    return (
        np.cos(u[..., 0] - u[..., 1]),
        np.cos(u[..., 0] - u[..., 2]),
        np.cos(u[..., 1] - u[..., 2]),
    )


def copula_log_density(u, rho: RhoVector):
    """Log copula density at angle triples ``u`` of shape (3,) or (n, 3).

    Inputs are reduced mod 2*pi; the value is invariant under common
    rotation of all three angles and under positive scaling of rho.
    """
    cc = constants(rho)
    c12, c13, c23 = _cos_diffs(u)
    bracket = cc.c1 + 2.0 * (rho.rho12 * c12 + rho.rho13 * c13 + rho.rho23 * c23)
    out = np.log(cc.c2) - np.log(bracket)
    return out if np.ndim(out) else float(out)


def copula_density(u, rho: RhoVector):
    return np.exp(copula_log_density(u, rho))


def denominator_min(rho: RhoVector, grid: int = 64) -> float:
    """Minimum of the density denominator over a full-period grid.

    The bracket depends only on the differences (u1-u2, u1-u3), so a 2-D
    grid covers every value attained on the 3-D torus.
    """
    cc = constants(rho)
    g = periodic_grid(grid)
    d12, d13 = np.meshgrid(g, g, indexing="ij")
    bracket = cc.c1 + 2.0 * (
        rho.rho12 * np.cos(d12)
        + rho.rho13 * np.cos(d13)
        + rho.rho23 * np.cos(d13 - d12)
    )
    return float(bracket.min())


@dataclass(frozen=True)
class PairwiseMarginalSpec:
    """Concentration of the bivariate marginal kernel for one pair.

    ``phi`` is the representative with |phi| <= 1.  The defining formula
    may produce the reciprocal representative; both describe the same
    kernel because t_2 is invariant under phi -> 1/phi.
    """

    phi: float


def pairwise_phi(rho: RhoVector, pair: tuple[int, int]) -> PairwiseMarginalSpec:
    """Bivariate-marginal concentration phi_ij for a 1-based index pair."""
    cc = constants(rho)
    i, j = pair
    if not {i, j} < {1, 2, 3} or i == j:
        raise InvalidParameterError(f"invalid coordinate pair {pair}")
    k = ({1, 2, 3} - {i, j}).pop()
    rij, rik, rjk = rho.pair(i, j), rho.pair(i, k), rho.pair(j, k)
    raw = (
        rik * rjk / rij
        - rij * rik / rjk
        - rij * rjk / rik
        - TWO_PI**3 * cc.c2
    ) / (2.0 * rij)
    return PairwiseMarginalSpec(phi=float(effective_concentration(raw)))


def _phi_value(phi) -> float:
    return phi.phi if isinstance(phi, PairwiseMarginalSpec) else float(phi)


def copula_bivariate_density(u_i, u_j, phi):
    """Bivariate marginal copula density t_2(u_i, u_j; phi_ij)."""
    return wc_kernel_density(np.asarray(u_i) - np.asarray(u_j), 0.0, _phi_value(phi)) / TWO_PI


def copula_cond_2given1(u, rho: RhoVector):
    """Conditional copula density of two coordinates given the third,
    t_{2|1}; equals 2*pi times the joint density for every choice of the
    conditioning coordinate."""
    return TWO_PI * copula_density(u, rho)


def copula_cond_1given1(u_i, u_j, phi):
    """Conditional copula density t_{1|1}(u_i | u_j; phi_ij): a wrapped
    Cauchy kernel centered at u_j."""
    return wc_kernel_density(u_i, np.asarray(u_j, dtype=float), _phi_value(phi))


@dataclass(frozen=True)
class ConditionalWCSpec:
    """Center and concentration of the one-given-two conditional kernel.

    ``delta`` is the raw modulus |phi_{i|jk}| and may exceed 1; the kernel
    is then identical to the one with concentration 1/delta.
    """

    eta: float
    delta: float

    @property
    def concentration(self) -> float:
        """Representative concentration in [0, 1)."""
        return float(effective_concentration(self.delta))


def conditional_phi(rho: RhoVector, i: int, u_j, u_k):
    """Complex kernel parameter phi_{i|jk} for coordinate i given the other
    two, whose values are ``u_j`` and ``u_k`` in increasing coordinate
    order.

    phi_{i|jk} = -rho_jk (rho_ik^{-1} e^{i u_j} + rho_ij^{-1} e^{i u_k});
    the lower-indexed conditioning angle pairs with the rho linking i to
    the *other* conditioning coordinate.
    """
    require_valid(rho)
    if i not in (1, 2, 3):
        raise InvalidParameterError(f"invalid coordinate index {i}")
    j, k = sorted({1, 2, 3} - {i})
    rjk, rik, rij = rho.pair(j, k), rho.pair(i, k), rho.pair(i, j)
    u_j = np.asarray(u_j, dtype=float)
    u_k = np.asarray(u_k, dtype=float)
    return -rjk * (np.exp(1j * u_j) / rik + np.exp(1j * u_k) / rij)


def conditional_spec(rho: RhoVector, i: int, u_j, u_k) -> ConditionalWCSpec:
    """Kernel parameters (eta, delta) of U_i given the other two coordinates
    at scalar values ``u_j``, ``u_k`` (increasing coordinate order)."""
    ph = conditional_phi(rho, i, u_j, u_k)
    return ConditionalWCSpec(eta=float(wrap_angle(np.angle(ph))), delta=float(np.abs(ph)))


def copula_cond_1given2(u, rho: RhoVector, i: int):
    """Conditional copula density t_{1|2} of coordinate i at ``u[..., i-1]``
    given the other two coordinates of the triple(s) ``u``."""
    u = np.asarray(u, dtype=float)
    j, k = sorted({1, 2, 3} - {i})
    ph = conditional_phi(rho, i, u[..., j - 1], u[..., k - 1])
    out = wc_kernel_density(u[..., i - 1], np.angle(ph), np.abs(ph))
    return out if np.ndim(out) else float(out)


def copula_log_cond_1given2(u, rho: RhoVector, i: int):
    """Log of :func:`copula_cond_1given2`, evaluated without exponentiating."""
    u = np.asarray(u, dtype=float)
    j, k = sorted({1, 2, 3} - {i})
    ph = conditional_phi(rho, i, u[..., j - 1], u[..., k - 1])
    out = wc_kernel_log_density(u[..., i - 1], np.angle(ph), np.abs(ph))
    return out if np.ndim(out) else float(out)


def copula_sample(n: int, rho: RhoVector, seed=None) -> np.ndarray:
    """Draw ``n`` exact samples from the copula.

    Sequential scheme: U1 uniform; U2 | U1 from the pairwise kernel with
    concentration phi_12 centered at U1; U3 | U1, U2 from the one-given-two
    kernel.  Each wrapped Cauchy draw is the Moebius transform of a fresh
    uniform.  Deterministic for a fixed seed.
    """
    if n < 1:
        raise InvalidParameterError(f"sample count must be >= 1, got {n}")
    require_valid(rho)
    rng = as_rng(seed)
    u1 = TWO_PI * rng.random(n)
    phi12 = pairwise_phi(rho, (1, 2)).phi
    u2 = wc_kernel_sample(u1, np.full(n, phi12), rng)
    ph = conditional_phi(rho, 3, u1, u2)
    u3 = wc_kernel_sample(np.angle(ph), np.abs(ph), rng)
    return np.column_stack([u1, u2, u3])
