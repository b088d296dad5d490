"""Two-step maximum likelihood on synthetic three-angle data, with the
model-comparison table (log-likelihood, AIC, BIC, parameter count).

Step 1 fits each marginal; step 2 maps the data through the fitted CDFs
and maximizes the copula likelihood on the product-1 manifold.

Run:  python demos/03_ifm_fitting.py
"""

import warnings

import numpy as np

from twcm import FitConfig, fit_ifm, information_criteria
from twcm.presets import independence_like_model, protein_model

warnings.filterwarnings("ignore")

true = protein_model()
data = true.sample(2000, seed=52)
print(f"simulated {len(data)} rows from the reference three-angle model")
print(f"generating rho (normalized): {np.round(true.rho.as_array(), 4)}")

rows = []

# Independence baseline with uniform marginals: the worst sensible model.
indep = independence_like_model()
ll0 = indep.loglik(data)
aic0, bic0 = information_criteria(ll0, 0, len(data))
rows.append(("uniform independence", ll0, aic0, bic0, 0))

# Uniform marginals but fitted dependence: 2 free parameters.
res_u = fit_ifm(data, ["uniform"] * 3, FitConfig(seed=1))
rows.append(("uniform TWCM", res_u.loglik, res_u.aic, res_u.bic, res_u.p))

# Full model with fitted von Mises marginals: 8 free parameters.
res_vm = fit_ifm(data, ["von_mises"] * 3, FitConfig(seed=1))
rows.append(("von Mises TWCM", res_vm.loglik, res_vm.aic, res_vm.bic, res_vm.p))

# Wrapped Cauchy marginals for contrast.
res_wc = fit_ifm(data, ["wrapped_cauchy"] * 3, FitConfig(seed=1))
rows.append(("wrapped Cauchy TWCM", res_wc.loglik, res_wc.aic, res_wc.bic,
             res_wc.p))

print(f"\n{'model':<22}{'loglik':>12}{'AIC':>12}{'BIC':>12}{'p':>4}")
for name, ll, aic, bic, p in rows:
    print(f"{name:<22}{ll:>12.1f}{aic:>12.1f}{bic:>12.1f}{p:>4}")

best = min(rows, key=lambda r: r[3])
print(f"\nBIC winner: {best[0]}")

print(f"\nfitted rho:       {np.round(res_vm.model.rho.as_array(), 3)} "
      f"(product = {res_vm.model.rho.product:.12f})")
print(f"sign pattern {res_vm.sign_pattern}, converged = {res_vm.converged}, "
      f"near-limit = {res_vm.near_limit}")
for i, m in enumerate(res_vm.model.marginals, start=1):
    print(f"marginal {i}: {m.params_dict()}")
