"""Finite mixtures of trivariate copula models for hyper-cylindrical
clustering, fitted by EM with a two-step (marginals-then-copula) M-step.

Because the M-step maximizes the expected complete-data log-likelihood
only approximately, the observed log-likelihood trace is monitored for
monotonicity rather than assumed; small decreases are flagged in the
report instead of raising.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._util import TWO_PI, as_rng
from .errors import ComponentCollapseError, InvalidParameterError
from .fit import FitConfig, _family_class, fit_copula, fit_ifm, information_criteria
from .marginals import fit_mle
from .model import TwcmModel

_WEIGHT_SUM_TOL = 1e-12
_LOG_FLOOR = np.log(1e-300)
_COLLAPSE_FRACTION = 1e-3
_MONOTONE_SLACK = 1e-8


@dataclass(frozen=True)
class MixtureModel:
    """K component weights plus K component models."""

    weights: tuple[float, ...]
    components: tuple[TwcmModel, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != len(self.components) or w.size < 1:
            raise InvalidParameterError("one weight per component is required")
        if np.any(w <= 0.0) or abs(w.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise InvalidParameterError("weights must be positive and sum to 1")
        tags = {tuple(m.family for m in c.marginals) for c in self.components}
        if len(tags) > 1:
            raise InvalidParameterError(
                f"components must share marginal families, got {sorted(tags)}"
            )
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def k(self) -> int:
        return len(self.components)

    def component_log_densities(self, data) -> np.ndarray:
        """(n, K) matrix of log(pi_k) + log f_k, floored to avoid -inf."""
        data = np.atleast_2d(np.asarray(data, dtype=float))
        cols = []
        for w, comp in zip(self.weights, self.components):
            ld = np.maximum(comp.log_density(data), _LOG_FLOOR)
            cols.append(np.log(w) + ld)
        return np.column_stack(cols)

    def log_density(self, data):
        out = logsumexp(self.component_log_densities(data), axis=1)
        return out if out.ndim else float(out)

    def loglik(self, data) -> float:
        return float(np.sum(self.log_density(data)))

    def sample(self, n: int, seed=None, return_labels: bool = False):
        """Draw n observations; optionally also return component labels."""
        rng = as_rng(seed)
        labels = rng.choice(self.k, size=n, p=np.asarray(self.weights))
        out = np.empty((n, 3))
        for j, comp in enumerate(self.components):
            mask = labels == j
            if mask.any():
                out[mask] = comp.sample(int(mask.sum()), rng)
        return (out, labels) if return_labels else out

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "components": [c.to_dict() for c in self.components],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MixtureModel":
        return cls(
            weights=tuple(map(float, d["weights"])),
            components=tuple(TwcmModel.from_dict(c) for c in d["components"]),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "MixtureModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def responsibilities(model: MixtureModel, data) -> np.ndarray:
    """Posterior component probabilities per row, computed in log space."""
    log_wd = model.component_log_densities(data)
    return np.exp(log_wd - logsumexp(log_wd, axis=1, keepdims=True))


@dataclass(frozen=True)
class EmReport:
    """Diagnostics of one EM run (the chosen restart)."""

    loglik: float
    n_iter: int
    restart_index: int
    trace: tuple[float, ...]
    responsibility_mass: tuple[float, ...]
    flags: tuple[str, ...] = ()


def mixture_parameter_count(k: int, families) -> int:
    """Free parameters: K copies of (2 copula + marginal params) plus the
    K - 1 free weights."""
    per_comp = 2 + sum(_family_class(f).n_params for f in families)
    return k * per_comp + (k - 1)


def _weighted_component_fit(data, families, weights, config, warm_rho):
    """Weighted two-step fit of one component, warm-started on the copula
    side when a previous estimate exists."""
    margs = tuple(fit_mle(f, data[:, i], weights) for i, f in enumerate(families))
    u = np.column_stack([TWO_PI * m.cdf(data[:, i]) for i, m in enumerate(margs)])
    initial_points = None
    if warm_rho is not None:
        initial_points = [
            np.log(np.abs([warm_rho.rho12, warm_rho.rho13])),
            np.array([np.log(3.0), np.log(3.0)]),
        ]
    cop = fit_copula(u, config, weights=weights, initial_points=initial_points)
    return TwcmModel(rho=cop.rho, marginals=margs)


def em_fit(data, k: int, families, config: FitConfig = FitConfig(), *,
           restarts: int = 10, max_iter: int = 500, rel_tol: float = 1e-6,
           ) -> tuple[MixtureModel, EmReport]:
    """Fit a K-component mixture by EM with random hard-assignment starts.

    Runs ``restarts`` independent initializations and keeps the one with
    the highest final log-likelihood.  A component whose responsibility
    mass drops below 1e-3 * n is refitted from a random data block; a
    second collapse of the same component raises
    :class:`ComponentCollapseError`.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n = data.shape[0]
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if n < 10 * k:
        raise InvalidParameterError(f"need at least {10 * k} rows for k={k}")

    if k == 1:
        res = fit_ifm(data, families, config)
        model = MixtureModel(weights=(1.0,), components=(res.model,))
        report = EmReport(
            loglik=res.loglik, n_iter=1, restart_index=0,
            trace=(res.loglik,), responsibility_mass=(float(n),),
        )
        return model, report

    master = np.random.SeedSequence(config.seed)
    restart_seeds = master.spawn(restarts)
    best = None
    last_error = None
    for r_idx in range(restarts):
        rng = np.random.default_rng(restart_seeds[r_idx])
        try:
            model, report = _em_single(data, k, families, config, rng, r_idx,
                                       max_iter, rel_tol)
        except (ComponentCollapseError, InvalidParameterError) as exc:
            last_error = exc
            continue
        if best is None or report.loglik > best[1].loglik:
            best = (model, report)
    if best is None:
        raise last_error if last_error is not None else ComponentCollapseError(
            "every EM restart failed"
        )
    return best


def _em_single(data, k, families, config, rng, restart_index, max_iter, rel_tol):
    n = data.shape[0]
    inner_cfg = FitConfig(
        max_iter=config.max_iter, tol=config.tol, restarts=config.restarts,
        bootstrap_b=config.bootstrap_b,
        seed=int(rng.integers(0, 2**63 - 1)),
    )

    # hard random assignment guarantees every component a nonempty first fit
    while True:
        assign = rng.integers(0, k, size=n)
        if np.all(np.bincount(assign, minlength=k) >= 5):
            break

    comps: list[TwcmModel] = []
    weights = np.zeros(k)
    for j in range(k):
        mask = assign == j
        comps.append(
            _weighted_component_fit(data[mask], families, None, inner_cfg, None)
        )
        weights[j] = mask.mean()

    trace: list[float] = []
    flags: list[str] = []
    strikes = np.zeros(k, dtype=int)
    mass = np.full(k, float(n) / k)
    n_iter = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n_iter in range(1, max_iter + 1):
            model = MixtureModel(weights=tuple(weights / weights.sum()),
                                 components=tuple(comps))
            resp = responsibilities(model, data)
            mass = resp.sum(axis=0)

            for j in range(k):
                if mass[j] < _COLLAPSE_FRACTION * n:
                    strikes[j] += 1
                    if strikes[j] >= 2:
                        raise ComponentCollapseError(
                            f"component {j} collapsed twice: reduce k below {k}"
                        )
                    block = rng.choice(n, size=max(20, n // (5 * k)), replace=False)
                    comps[j] = _weighted_component_fit(
                        data[block], families, None, inner_cfg, None
                    )
                    resp[:, j] = 1.0 / k
                    resp /= resp.sum(axis=1, keepdims=True)
                    mass = resp.sum(axis=0)

            weights = mass / n
            comps = [
                _weighted_component_fit(data, families, resp[:, j], inner_cfg,
                                        comps[j].rho)
                for j in range(k)
            ]
            model = MixtureModel(weights=tuple(weights / weights.sum()),
                                 components=tuple(comps))
            ll = model.loglik(data)
            if trace and ll < trace[-1] - _MONOTONE_SLACK:
                flags.append(
                    f"loglik decreased by {trace[-1] - ll:.3e} at iteration {n_iter}"
                )
            converged = bool(trace) and abs(ll - trace[-1]) <= rel_tol * abs(trace[-1])
            trace.append(ll)
            if converged:
                break

    report = EmReport(
        loglik=trace[-1], n_iter=n_iter, restart_index=restart_index,
        trace=tuple(trace), responsibility_mass=tuple(float(x) for x in mass),
        flags=tuple(flags),
    )
    return model, report


@dataclass(frozen=True)
class SelectKResult:
    best_k: int
    best_model: MixtureModel
    best_report: EmReport
    table: tuple[dict, ...]  # one row per K: {k, loglik, p, aic, bic}


def select_k(data, k_values, families, config: FitConfig = FitConfig(), *,
             restarts: int = 10, max_iter: int = 500, rel_tol: float = 1e-6,
             ) -> SelectKResult:
    """Sweep component counts and pick the BIC minimizer."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n = data.shape[0]
    k_values = list(k_values)
    if not k_values:
        raise InvalidParameterError("k_values must be nonempty")
    master = np.random.SeedSequence(config.seed)
    seeds = master.spawn(len(k_values))
    rows = []
    best = None
    for idx, k in enumerate(k_values):
        cfg = FitConfig(max_iter=config.max_iter, tol=config.tol,
                        restarts=config.restarts, bootstrap_b=config.bootstrap_b,
                        seed=int(np.random.default_rng(seeds[idx]).integers(0, 2**63 - 1)))
        model, report = em_fit(data, k, families, cfg, restarts=restarts,
                               max_iter=max_iter, rel_tol=rel_tol)
        p = mixture_parameter_count(k, families)
        aic, bic = information_criteria(report.loglik, p, n)
        rows.append({"k": k, "loglik": report.loglik, "p": p, "aic": aic, "bic": bic})
        if best is None or bic < best[0]:
            best = (bic, k, model, report)
    _, best_k, best_model, best_report = best
    return SelectKResult(best_k=best_k, best_model=best_model,
                         best_report=best_report, table=tuple(rows))
