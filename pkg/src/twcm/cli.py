"""Command-line surface: dataset ingestion, fitting, sampling, mixture
clustering, bootstrap, density grids, the AR(2) simulator, and synthetic
dataset generation.

Every command is deterministic under ``--seed`` (falling back to the
``TWCM_SEED`` environment variable).  Exit codes: 0 success, 1 domain
error, 2 fit failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from ._util import TWO_PI, wrap_angle
from .ar2 import Ar2Params, simulate
from .errors import (
    ComponentCollapseError,
    DegenerateDataError,
    DomainError,
    FitFailureError,
    InvalidParameterError,
    TwcmError,
)
from .fit import (
    FitConfig,
    bootstrap_se,
    fit_ifm,
    information_criteria,
    parameter_vector,
)
from .marginals import CIRCULAR, FAMILIES, LINEAR, marginal_from_dict
from .mixture import (
    MixtureModel,
    mixture_parameter_count,
    responsibilities,
    select_k,
)
from .model import TwcmModel
from .presets import PRESETS


@dataclass(frozen=True)
class ColumnSpec:
    """Name, domain, and angle unit of one data column."""

    name: str
    domain: str  # circular | linear
    unit: str = "radians"  # radians | degrees; circular only

    def __post_init__(self):
        if self.domain not in (CIRCULAR, LINEAR):
            raise DomainError(f"unknown column domain {self.domain!r}")
        if self.unit not in ("radians", "degrees"):
            raise DomainError(f"unknown angle unit {self.unit!r}")
        if self.domain == LINEAR and self.unit != "radians":
            raise DomainError("units apply to circular columns only")


def parse_column_specs(text: str) -> tuple[ColumnSpec, ColumnSpec, ColumnSpec]:
    """Parse ``name:domain[:unit]`` triples separated by commas."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != 3:
        raise DomainError("exactly 3 column specs are required")
    specs = []
    for part in parts:
        bits = part.split(":")
        if len(bits) == 2:
            specs.append(ColumnSpec(bits[0], bits[1]))
        elif len(bits) == 3:
            specs.append(ColumnSpec(bits[0], bits[1], bits[2]))
        else:
            raise DomainError(f"malformed column spec {part!r}")
    return tuple(specs)


def specs_for_families(families) -> tuple[ColumnSpec, ColumnSpec, ColumnSpec]:
    return tuple(
        ColumnSpec(f"c{i + 1}", FAMILIES[f].domain) for i, f in enumerate(families)
    )


def ingest(path, specs) -> tuple[np.ndarray, list[tuple[int, str]]]:
    """Read a 3-column CSV against the column specs.

    Lines starting with ``#`` are comments; the first remaining line is the
    header.  Rows with missing, non-numeric, or out-of-domain values are
    rejected and reported with their 1-based file line numbers.  Circular
    degrees are converted to radians and all angles reduced mod 2*pi.
    """
    rows = []
    rejected: list[tuple[int, str]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        header_seen = False
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or (record[0].lstrip().startswith("#")):
                continue
            if not header_seen:
                header_seen = True
                continue
            if len(record) < 3:
                rejected.append((lineno, "fewer than 3 fields"))
                continue
            try:
                vals = [float(record[i]) for i in range(3)]
            except ValueError:
                rejected.append((lineno, "non-numeric value"))
                continue
            ok = True
            for i, spec in enumerate(specs):
                if not np.isfinite(vals[i]):
                    rejected.append((lineno, f"non-finite value in {spec.name}"))
                    ok = False
                    break
                if spec.domain == CIRCULAR:
                    if spec.unit == "degrees":
                        vals[i] = np.deg2rad(vals[i])
                    vals[i] = float(wrap_angle(vals[i]))
                elif vals[i] <= 0.0:
                    rejected.append((lineno, f"nonpositive value in {spec.name}"))
                    ok = False
                    break
            if ok:
                rows.append(vals)
    if not rows:
        raise DomainError(f"no valid data rows in {path}")
    return np.asarray(rows, dtype=float), rejected


def _write_csv(path_or_stdout, header, rows, comments=()):
    close = False
    if isinstance(path_or_stdout, (str, os.PathLike)):
        fh = open(path_or_stdout, "w", newline="", encoding="utf-8")
        close = True
    else:
        fh = path_or_stdout
    try:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if close:
            fh.close()


def _resolve_seed(args) -> int | None:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("TWCM_SEED")
    return int(env) if env else None


def _load_any_model(path):
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if "components" in d:
        return MixtureModel.from_dict(d)
    return TwcmModel.from_dict(d)


def _format_float(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    seed = _resolve_seed(args)
    model = PRESETS[args.preset]()
    data = model.sample(args.n, seed=seed)
    names = {
        "protein": ("phi", "psi", "omega"),
        "buoy": ("wave_dir", "wind_dir", "wave_height"),
    }[args.preset]
    comments = [
        "synthetic data (not observational)",
        f"preset={args.preset} n={args.n} seed={seed}",
    ]
    rows = [[_format_float(v) for v in row] for row in data]
    _write_csv(args.out if args.out else sys.stdout, names, rows, comments)
    return 0


def _families_from_arg(text):
    fams = [f.strip() for f in text.split(",")]
    if len(fams) != 3:
        raise DomainError("exactly 3 marginal families are required")
    for f in fams:
        if f not in FAMILIES:
            raise DomainError(
                f"unknown family {f!r}; choose from {sorted(FAMILIES)}"
            )
    return fams


def _ingest_for(args, families):
    specs = (
        parse_column_specs(args.columns)
        if args.columns
        else specs_for_families(families)
    )
    data, rejected = ingest(args.data, specs)
    for lineno, reason in rejected:
        print(f"rejected line {lineno}: {reason}", file=sys.stderr)
    return data


def cmd_fit(args) -> int:
    families = _families_from_arg(args.marginals)
    data = _ingest_for(args, families)
    config = FitConfig(seed=_resolve_seed(args), restarts=args.restarts)
    result = fit_ifm(data, families, config)
    payload = json.dumps(result.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0


def cmd_sample(args) -> int:
    seed = _resolve_seed(args)
    model = _load_any_model(args.model)
    data = model.sample(args.n, seed=seed)
    header = ("theta1", "theta2", "theta3")
    rows = [[_format_float(v) for v in row] for row in data]
    _write_csv(args.out if args.out else sys.stdout,
               header, rows, [f"model={args.model} n={args.n} seed={seed}"])
    return 0


def cmd_loglik(args) -> int:
    paths = []
    if args.model:
        paths.append(args.model)
    if args.models:
        paths.extend(p.strip() for p in args.models.split(",") if p.strip())
    if not paths:
        raise DomainError("provide --model or --models")
    models = [_load_any_model(p) for p in paths]
    domains = None
    for m in models:
        d = (
            tuple(c.domains for c in m.components)[0]
            if isinstance(m, MixtureModel)
            else m.domains
        )
        if domains is None:
            domains = d
        elif d != domains:
            raise DomainError("all models must share the same coordinate domains")
    if args.columns:
        specs = parse_column_specs(args.columns)
    else:
        specs = tuple(
            ColumnSpec(f"c{i + 1}", dom) for i, dom in enumerate(domains)
        )
    data, rejected = ingest(args.data, specs)
    for lineno, reason in rejected:
        print(f"rejected line {lineno}: {reason}", file=sys.stderr)
    n = data.shape[0]
    rows = []
    for path, m in zip(paths, models):
        if isinstance(m, MixtureModel):
            ll = m.loglik(data)
            fams = [c.family for c in m.components[0].marginals]
            p = mixture_parameter_count(m.k, fams)
        else:
            ll = m.loglik(data)
            p = m.n_free_params
        aic, bic = information_criteria(ll, p, n)
        rows.append([path, _format_float(ll), _format_float(aic),
                     _format_float(bic), str(p), str(n)])
    _write_csv(args.out if args.out else sys.stdout,
               ("model", "loglik", "aic", "bic", "p", "n"), rows)
    return 0


def _parse_k_range(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def cmd_mixture(args) -> int:
    families = _families_from_arg(args.marginals)
    data = _ingest_for(args, families)
    config = FitConfig(seed=_resolve_seed(args))
    result = select_k(
        data, _parse_k_range(args.k), families, config, restarts=args.restarts
    )
    table_rows = [
        [str(r["k"]), _format_float(r["loglik"]), str(r["p"]),
         _format_float(r["aic"]), _format_float(r["bic"])]
        for r in result.table
    ]
    _write_csv(sys.stdout, ("k", "loglik", "p", "aic", "bic"), table_rows,
               [f"selected k={result.best_k}"])
    prefix = args.out_prefix or "mixture"
    result.best_model.save(f"{prefix}_model.json")
    resp = responsibilities(result.best_model, data)
    assign_rows = [[str(i), str(int(a))] for i, a in enumerate(resp.argmax(axis=1))]
    _write_csv(f"{prefix}_assignments.csv", ("row", "component"), assign_rows)
    return 0


def cmd_bootstrap(args) -> int:
    families = _families_from_arg(args.marginals)
    data = _ingest_for(args, families)
    config = FitConfig(seed=_resolve_seed(args), bootstrap_b=args.B,
                       restarts=args.restarts)
    point = fit_ifm(data, families, config)
    boot = bootstrap_se(data, families, config)
    for note in boot.warnings:
        print(f"warning: {note}", file=sys.stderr)
    estimates = parameter_vector(point)
    rows = [
        [name, _format_float(estimates.get(name, float("nan"))),
         _format_float(se)]
        for name, se in boot.se.items()
    ]
    _write_csv(args.out if args.out else sys.stdout,
               ("parameter", "estimate", "se"),
               rows, [f"B={args.B} failed={boot.b_failed}"])
    return 0


def _grid_axis(marginal, res: int) -> np.ndarray:
    if marginal.domain == CIRCULAR:
        return TWO_PI * (np.arange(res) + 0.5) / res
    lo = marginal.quantile(5e-4)
    hi = marginal.quantile(1.0 - 5e-4)
    return np.linspace(lo, hi, res)


def cmd_grid(args) -> int:
    model = _load_any_model(args.model)
    if isinstance(model, MixtureModel):
        raise DomainError("grid requires a single-component model file")
    i, j = (int(x) for x in args.pair.split(","))
    if sorted((i, j)) not in ([1, 2], [1, 3], [2, 3]):
        raise DomainError("--pair must name two distinct coordinates in 1..3")
    res = args.res
    if res < 2:
        raise DomainError("--res must be >= 2")
    x = _grid_axis(model.marginals[i - 1], res)
    y = _grid_axis(model.marginals[j - 1], res)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    if args.given:
        key, val = args.given.split("=")
        k = int(key)
        if k in (i, j) or k not in (1, 2, 3):
            raise DomainError("--given must name the remaining coordinate")
        theta = np.empty((res * res, 3))
        theta[:, i - 1] = xx.ravel()
        theta[:, j - 1] = yy.ravel()
        theta[:, k - 1] = float(val)
        dens = model.cond_density_2given1(theta, given=k)
    else:
        dens = model.bivariate_density((i, j), xx.ravel(), yy.ravel())
    rows = [
        [_format_float(a), _format_float(b), _format_float(d)]
        for a, b, d in zip(xx.ravel(), yy.ravel(), dens)
    ]
    _write_csv(args.out if args.out else sys.stdout, ("x", "y", "density"), rows,
               [f"model={args.model} pair={i},{j}"
                + (f" given={args.given}" if args.given else "")])
    return 0


def _parse_marginal_spec(text):
    if ":" not in text:
        return marginal_from_dict({"family": text, "params": {}})
    family, params_text = text.split(":", 1)
    params = {}
    for item in params_text.split(","):
        key, val = item.split("=")
        params[key.strip()] = float(val)
    return marginal_from_dict({"family": family.strip(), "params": params})


def cmd_ar2(args) -> int:
    seed = _resolve_seed(args)
    r = [float(x) for x in args.rho.split(",")]
    if len(r) != 3:
        raise DomainError("--rho needs 3 comma-separated values")
    marginal = _parse_marginal_spec(args.marginal)
    params = Ar2Params(rho_t_tm1=r[0], rho_t_tm2=r[1], rho_tm1_tm2=r[2],
                       marginal=marginal)
    chain = simulate(params, args.n, seed=seed)
    rows = [[_format_float(v)] for v in chain]
    _write_csv(args.out if args.out else sys.stdout, ("theta",), rows,
               [f"rho={args.rho} marginal={args.marginal} n={args.n} seed={seed}"])
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twcm",
        description="Trivariate wrapped Cauchy copula models: fit, sample, "
                    "cluster, and simulate toroidal/cylindrical data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: env TWCM_SEED)")

    p = sub.add_parser("synth", help="generate a synthetic dataset from a preset")
    p.add_argument("--preset", choices=sorted(PRESETS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    add_seed(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="two-step maximum-likelihood fit")
    p.add_argument("--data", required=True)
    p.add_argument("--columns", default=None,
                   help="name:domain[:unit] x3, comma separated")
    p.add_argument("--marginals", required=True, help="three family tags")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--out", default=None)
    add_seed(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sample", help="draw observations from a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    add_seed(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("loglik", help="log-likelihood/AIC/BIC table")
    p.add_argument("--model", default=None)
    p.add_argument("--models", default=None, help="comma-separated model files")
    p.add_argument("--data", required=True)
    p.add_argument("--columns", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_loglik)

    p = sub.add_parser("mixture", help="EM mixture fit with BIC selection of k")
    p.add_argument("--data", required=True)
    p.add_argument("--columns", default=None)
    p.add_argument("--marginals", required=True)
    p.add_argument("--k", required=True, help="e.g. 2..5 or 2,3,4")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--out-prefix", default=None)
    add_seed(p)
    p.set_defaults(func=cmd_mixture)

    p = sub.add_parser("bootstrap", help="bootstrap standard errors")
    p.add_argument("--data", required=True)
    p.add_argument("--columns", default=None)
    p.add_argument("--marginals", required=True)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--out", default=None)
    add_seed(p)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("grid", help="plot-ready bivariate density grid")
    p.add_argument("--model", required=True)
    p.add_argument("--pair", required=True, help="e.g. 1,2")
    p.add_argument("--given", default=None, help="k=VALUE for the conditional")
    p.add_argument("--res", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("ar2", help="simulate the circular AR(2) chain")
    p.add_argument("--rho", required=True,
                   help="rho_t_tm1,rho_t_tm2,rho_tm1_tm2")
    p.add_argument("--marginal", required=True,
                   help="family[:key=val,...], e.g. wrapped_cauchy:mu=3.1,xi=0.5")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    add_seed(p)
    p.set_defaults(func=cmd_ar2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (DomainError, InvalidParameterError, DegenerateDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FitFailureError, ComponentCollapseError) as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return 2
    except TwcmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
