"""Two-step maximum likelihood (marginals first, copula second on the
pseudo-observations), bootstrap standard errors, and AIC/BIC.

The copula step searches the identifiable manifold rho12*rho13*rho23 = 1:
two free parameters (log|rho12|, log|rho13|) per sign pattern, with the
four sign patterns of positive product enumerated exhaustively.  Validity
violations are penalized, not barriered, so the simplex search remains
total.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._util import TWO_PI, wrap_angle
from .copula import RhoVector, normalize_rho
from .errors import FitFailureError, InvalidParameterError
from .marginals import CIRCULAR, FAMILIES, Marginal, fit_mle
from .model import TwcmModel


def _family_class(fam) -> type[Marginal]:
    if isinstance(fam, str):
        return FAMILIES[fam]
    if isinstance(fam, type) and issubclass(fam, Marginal):
        return fam
    return type(fam)

SIGN_PATTERNS = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))

_PENALTY = 1e12
_NEAR_LIMIT = 1e3
_ANCHOR = (math.log(3.0), math.log(3.0))  # |rho| = (3, 3, 1/9), valid for all signs


@dataclass(frozen=True)
class FitConfig:
    """Knobs of the optimizer, restarts, and the bootstrap."""

    max_iter: int = 2000
    tol: float = 1e-8
    restarts: int = 3
    bootstrap_b: int = 1000
    seed: int | None = None

    def __post_init__(self):
        if min(self.max_iter, self.restarts, self.bootstrap_b) < 1 or self.tol <= 0:
            raise InvalidParameterError("config values must be positive")


@dataclass(frozen=True)
class FitResult:
    """Fitted model plus likelihood and model-selection bookkeeping."""

    model: TwcmModel
    loglik: float
    aic: float
    bic: float
    p: int
    n: int
    converged: bool
    sign_pattern: tuple[int, int, int]
    iterations: int
    near_limit: bool = False

    def to_dict(self) -> dict:
        d = self.model.to_dict()
        d["fit"] = {
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "p": self.p,
            "converged": self.converged,
            "sign_pattern": list(self.sign_pattern),
            "n": self.n,
        }
        return d


def information_criteria(loglik: float, p: int, n: int) -> tuple[float, float]:
    """AIC = -2 loglik + 2 p and BIC = -2 loglik + p log n."""
    if n < 1 or p < 0:
        raise InvalidParameterError("need n >= 1 and p >= 0")
    return -2.0 * loglik + 2.0 * p, -2.0 * loglik + p * math.log(n)


def _feasibility_violation(abs_rho: np.ndarray) -> float:
    """Zero inside the valid region; grows with the distance from it.

    Combines the best permutation-condition ratio with the relative
    deficit of the c2 radicand so a penalized search can descend back to
    feasibility.
    """
    a12, a13, a23 = abs_rho
    perm = min(
        a23 * (a12 + a13) / (a12 * a13),
        a13 * (a12 + a23) / (a12 * a23),
        a12 * (a13 + a23) / (a13 * a23),
    )
    viol = max(0.0, perm - 1.0)
    a = a12 * a13 / a23
    b = a12 * a23 / a13
    d = a13 * a23 / a12
    radicand = a * a + b * b + d * d - 2.0 * (a12**2 + a13**2 + a23**2)
    norm = a * a + b * b + d * d
    if radicand <= 0.0:
        viol += 1.0 - radicand / norm
    return viol


@dataclass(frozen=True)
class CopulaFit:
    rho: RhoVector
    loglik: float  # copula log-likelihood on the pseudo-observations
    sign_pattern: tuple[int, int, int]
    converged: bool
    iterations: int
    near_limit: bool


def fit_copula(u, config: FitConfig = FitConfig(), weights=None,
               initial_points=None) -> CopulaFit:
    """Maximize the copula log-likelihood over the identifiable manifold.

    ``u`` is an (n, 3) array of copula-scale angles.  Per sign pattern the
    search runs from a fixed anchor plus random restarts; the best feasible
    optimum over all patterns wins.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if u.ndim != 2 or u.shape[1] != 3 or u.shape[0] == 0:
        raise InvalidParameterError("pseudo-observations must be a nonempty (n, 3) array")
    if weights is None:
        w = np.ones(u.shape[0])
    else:
        w = np.asarray(weights, dtype=float)
    wsum = w.sum()
    cosd = np.column_stack(
        [np.cos(u[:, 0] - u[:, 1]), np.cos(u[:, 0] - u[:, 2]), np.cos(u[:, 1] - u[:, 2])]
    )
    rng = np.random.default_rng(config.seed)

    def neg_loglik(x, signs):
        a, b = x
        if abs(a) > 40.0 or abs(b) > 40.0:
            return _PENALTY * (1.0 + abs(a) + abs(b))
        abs_rho = np.array([math.exp(a), math.exp(b), math.exp(-a - b)])
        viol = _feasibility_violation(abs_rho)
        if viol > 0.0:
            return _PENALTY * (1.0 + viol)
        r = abs_rho * signs
        aa = r[0] * r[1] / r[2]
        bb = r[0] * r[2] / r[1]
        dd = r[1] * r[2] / r[0]
        radicand = aa * aa + bb * bb + dd * dd - 2.0 * np.dot(r, r)
        c1 = aa + bb + dd
        denom = c1 + 2.0 * (cosd @ r)
        if radicand <= 0.0 or np.any(denom <= 0.0):
            return _PENALTY
        c2 = math.sqrt(radicand) / TWO_PI**3
        return -(wsum * math.log(c2) - w @ np.log(denom))

    best = None
    best_infeasible = None
    for signs in SIGN_PATTERNS:
        signs_arr = np.array(signs, dtype=float)
        if initial_points is not None:
            starts = [np.asarray(x0, dtype=float) for x0 in initial_points]
        else:
            starts = [np.asarray(_ANCHOR)] + [
                rng.uniform(-2.0, 4.0, size=2) for _ in range(config.restarts - 1)
            ]
        for x0 in starts:
            res = minimize(
                neg_loglik, x0, args=(signs_arr,), method="Nelder-Mead",
                options={"maxiter": config.max_iter, "xatol": config.tol,
                         "fatol": config.tol},
            )
            feasible = res.fun < _PENALTY / 2.0
            cand = (res.fun, signs, res)
            if feasible:
                if best is None or res.fun < best[0]:
                    best = cand
            elif best_infeasible is None or res.fun < best_infeasible[0]:
                best_infeasible = cand

    if best is None:
        a, b = best_infeasible[2].x if best_infeasible else (float("nan"),) * 2
        raise FitFailureError(
            "no valid copula parameters found in any sign pattern",
            best_candidate=(math.exp(a), math.exp(b)),
        )
    fun, signs, res = best
    a, b = res.x
    rho = normalize_rho(
        RhoVector(
            signs[0] * math.exp(a), signs[1] * math.exp(b), signs[2] * math.exp(-a - b)
        )
    )
    near_limit = bool(np.max(np.abs(rho.as_array())) > _NEAR_LIMIT)
    return CopulaFit(
        rho=rho,
        loglik=-fun,
        sign_pattern=signs,
        converged=bool(res.success),
        iterations=int(res.nit),
        near_limit=near_limit,
    )


def fit_ifm(data, families, config: FitConfig = FitConfig(), weights=None) -> FitResult:
    """Two-step fit: weighted marginal MLE per coordinate, then copula MLE
    on the pseudo-observations u = 2*pi*F_hat(theta)."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] == 0:
        raise InvalidParameterError("data must be a nonempty (n, 3) array")
    margs = tuple(fit_mle(fam, data[:, i], weights) for i, fam in enumerate(families))
    u = np.column_stack(
        [TWO_PI * m.cdf(data[:, i]) for i, m in enumerate(margs)]
    )
    cop = fit_copula(u, config, weights=weights)
    model = TwcmModel(rho=cop.rho, marginals=margs)
    if weights is None:
        loglik = model.loglik(data)
    else:
        loglik = float(np.dot(weights, model.log_density(data)))
    n = data.shape[0]
    p = model.n_free_params
    aic, bic = information_criteria(loglik, p, n)
    return FitResult(
        model=model, loglik=loglik, aic=aic, bic=bic, p=p, n=n,
        converged=cop.converged, sign_pattern=cop.sign_pattern,
        iterations=cop.iterations, near_limit=cop.near_limit,
    )


def parameter_vector(result: FitResult) -> dict[str, float]:
    out = {
        "rho12": result.model.rho.rho12,
        "rho13": result.model.rho.rho13,
        "rho23": result.model.rho.rho23,
    }
    for i, m in enumerate(result.model.marginals, start=1):
        for name, value in m.params_dict().items():
            out[f"{name}{i}"] = value
    return out


def _circular_sd(angles: np.ndarray) -> float:
    rbar = np.abs(np.mean(np.exp(1j * angles)))
    rbar = min(rbar, 1.0 - 1e-15)
    return float(np.sqrt(-2.0 * np.log(rbar)))


@dataclass(frozen=True)
class BootstrapResult:
    """Componentwise standard errors over B nonparametric resamples."""

    se: dict[str, float]
    estimates: dict[str, np.ndarray]
    b_requested: int
    b_failed: int
    warnings: tuple[str, ...] = field(default_factory=tuple)


def bootstrap_se(data, families, config: FitConfig = FitConfig()) -> BootstrapResult:
    """Refit on B resamples drawn with replacement and report the standard
    deviation of each parameter estimate (circular for locations mu)."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n = data.shape[0]
    b = config.bootstrap_b
    rng = np.random.default_rng(config.seed)
    seeds = rng.integers(0, 2**63 - 1, size=b)
    estimates: dict[str, list[float]] = {}
    failed = 0
    for rep in range(b):
        idx = rng.integers(0, n, size=n)
        rep_cfg = FitConfig(
            max_iter=config.max_iter, tol=config.tol, restarts=config.restarts,
            bootstrap_b=config.bootstrap_b, seed=int(seeds[rep]),
        )
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = fit_ifm(data[idx], families, rep_cfg)
        except (FitFailureError, InvalidParameterError):
            failed += 1
            continue
        for name, value in parameter_vector(res).items():
            estimates.setdefault(name, []).append(value)

    notes = []
    if failed > 0.10 * b:
        notes.append(f"{failed} of {b} bootstrap replicates failed to fit")
    if b - failed < 2:
        notes.append("fewer than 2 successful replicates: standard errors are degenerate")
    circular_locs = {
        f"mu{i}"
        for i, fam in enumerate(families, start=1)
        if _family_class(fam).domain == CIRCULAR
    }
    se = {}
    est_arrays = {}
    for name, vals in estimates.items():
        arr = np.asarray(vals)
        est_arrays[name] = arr
        if name in circular_locs:
            se[name] = _circular_sd(wrap_angle(arr)) if arr.size > 1 else 0.0
        else:
            se[name] = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return BootstrapResult(
        se=se, estimates=est_arrays, b_requested=b, b_failed=failed,
        warnings=tuple(notes),
    )
