"""Built-in parameter sets for generating synthetic datasets.

The real datasets behind the published fits are not distributed, so the
``synth`` command and the demos draw from models pinned at the published
parameter estimates instead.
"""

from __future__ import annotations

from .copula import RhoVector
from .marginals import CircularUniform, VonMises, Weibull, WrappedCauchy
from .mixture import MixtureModel
from .model import TwcmModel


def independence_like_model() -> TwcmModel:
    """Uniform marginals with dependence pushed to the family's
    independence limit.

    At rho = (1e6, 1e6, 1e-12) the density bracket is constant to within
    one part in 1e18, so log densities equal -3*log(2*pi) at double
    precision; this is the baseline for likelihood comparisons.
    """
    return TwcmModel(
        rho=RhoVector(1e6, 1e6, 1e-12),
        marginals=(CircularUniform(), CircularUniform(), CircularUniform()),
    )


def protein_model() -> TwcmModel:
    """Three dihedral angles with von Mises marginals; the copula
    parameters are stored in their identifiable (product-1) form."""
    return TwcmModel(
        rho=RhoVector(9.18, -1.17, -0.09),
        marginals=(
            VonMises(mu=1.93, kappa=27.6),
            VonMises(mu=2.82, kappa=17.3),
            VonMises(mu=6.23, kappa=84.4),
        ),
    )


def buoy_mixture() -> MixtureModel:
    """Four sea regimes: wave direction, wind direction (wrapped Cauchy)
    and wave height (Weibull)."""
    clusters = [
        # (rho12, rho13, rho23), (mu1, xi1), (mu2, xi2), (shape, scale), weight
        ((-92.092, 43.331, -0.0003), (3.869, 0.834), (3.772, 0.729), (3.207, 1.781), 0.184),
        ((-0.008, 584.384, -0.218), (4.440, 0.882), (4.460, 0.887), (3.390, 3.414), 0.054),
        ((-5956.914, -0.032, 0.005), (5.184, 0.809), (5.692, 0.432), (1.531, 0.948), 0.546),
        ((-5.168, 0.864, -0.224), (2.588, 0.578), (2.239, 0.736), (1.424, 0.766), 0.216),
    ]
    comps = []
    weights = []
    for rho, wc1, wc2, wb, w in clusters:
        comps.append(
            TwcmModel(
                rho=RhoVector(*rho),
                marginals=(
                    WrappedCauchy(mu=wc1[0], xi=wc1[1]),
                    WrappedCauchy(mu=wc2[0], xi=wc2[1]),
                    Weibull(shape=wb[0], scale=wb[1]),
                ),
            )
        )
        weights.append(w)
    return MixtureModel(weights=tuple(weights), components=tuple(comps))


PRESETS = {
    "protein": protein_model,
    "buoy": buoy_mixture,
}
