"""Trivariate wrapped Cauchy copula models for toroidal and cylindrical
data: closed-form densities, exact sampling, conditional and marginal
laws, two-step maximum likelihood, bootstrap uncertainty, EM mixture
clustering, and a circular AR(2) simulator.
"""

from .ar2 import Ar2Params, simulate, transition_density
from .copula import (
    ConditionalWCSpec,
    CopulaConstants,
    PairwiseMarginalSpec,
    RhoValidity,
    RhoVector,
    conditional_spec,
    constants,
    copula_bivariate_density,
    copula_cond_1given1,
    copula_cond_1given2,
    copula_cond_2given1,
    copula_density,
    copula_log_density,
    copula_sample,
    normalize_rho,
    pairwise_phi,
    validate_rho,
)
from .errors import (
    ComponentCollapseError,
    DegenerateDataError,
    DomainError,
    FitFailureError,
    InvalidParameterError,
    SingularKernelError,
    TwcmError,
)
from .fit import (
    BootstrapResult,
    CopulaFit,
    FitConfig,
    FitResult,
    bootstrap_se,
    fit_copula,
    fit_ifm,
    information_criteria,
    parameter_vector,
)
from .marginals import (
    FAMILIES,
    Cardioid,
    CircularUniform,
    Marginal,
    VonMises,
    Weibull,
    WrappedCauchy,
    fit_mle,
)
from .mixture import (
    EmReport,
    MixtureModel,
    SelectKResult,
    em_fit,
    mixture_parameter_count,
    responsibilities,
    select_k,
)
from .model import (
    TwcmModel,
    kato_pewsey_bivariate_density,
    wc_closed_form_log_density,
)

__version__ = "0.1.0"

__all__ = [
    "Ar2Params",
    "BootstrapResult",
    "Cardioid",
    "CircularUniform",
    "ComponentCollapseError",
    "ConditionalWCSpec",
    "CopulaConstants",
    "CopulaFit",
    "DegenerateDataError",
    "DomainError",
    "EmReport",
    "FAMILIES",
    "FitConfig",
    "FitFailureError",
    "FitResult",
    "InvalidParameterError",
    "Marginal",
    "MixtureModel",
    "PairwiseMarginalSpec",
    "RhoValidity",
    "RhoVector",
    "SelectKResult",
    "SingularKernelError",
    "TwcmError",
    "TwcmModel",
    "VonMises",
    "Weibull",
    "WrappedCauchy",
    "bootstrap_se",
    "conditional_spec",
    "constants",
    "copula_bivariate_density",
    "copula_cond_1given1",
    "copula_cond_1given2",
    "copula_cond_2given1",
    "copula_density",
    "copula_log_density",
    "copula_sample",
    "em_fit",
    "fit_copula",
    "fit_ifm",
    "fit_mle",
    "information_criteria",
    "kato_pewsey_bivariate_density",
    "mixture_parameter_count",
    "normalize_rho",
    "pairwise_phi",
    "parameter_vector",
    "responsibilities",
    "select_k",
    "simulate",
    "transition_density",
    "validate_rho",
    "wc_closed_form_log_density",
]
