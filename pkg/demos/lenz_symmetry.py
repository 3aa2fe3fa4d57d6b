# ---
# jupyter:
#   jupytext:
#     formats: py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Hidden symmetry of the fuzzy Coulomb problem
#
# The Laplace-Runge-Lenz vector `A` commutes with `H`. On a bound
# eigenspace `[A_i, A_j]` closes on angular momentum with coefficient
# `-2E + lam^2 E^2`, which is positive below zero energy (SO(4)) and
# negative between `0` and `2 / lam^2` (SO(3,1)).

# +
from fuzzydynsym.hamiltonians import ModelParams
from fuzzydynsym.symmetry import (
    LenzAlgebra,
    casimirs,
    classify_regime,
    degeneracy_check,
    lenz_commutator_check,
    m0_eigenspaces,
)

lam = 0.5
params = ModelParams(lam, 1.0, 30)
alg = LenzAlgebra(params)
spaces, _ = m0_eigenspaces(params, k=6, alg=alg)
for s in spaces[:2]:
    chk = lenz_commutator_check(alg, s)
    cas = casimirs(alg, s)
    print(f"E={s.energy:.8f}  l={s.ell}  residual {chk.residual:.1e}  C2={cas.C2:.5f}  C2'={cas.C2_prime:.5f}")
# -

# Positive-energy states trapped by the cutoff show the Lorentz-type
# signature: the fitted coefficient is negative. States living on the
# outermost shell are cutoff artefacts and are skipped.

box, _ = m0_eigenspaces(params, k=4, which="window", sigma=1 / lam**2, alg=alg)
for s in (s for s in box if s.boundary_weight < 0.5):
    chk = lenz_commutator_check(alg, s, margin=1)
    print(f"E={s.energy:.4f}  {classify_regime(s.energy, lam).value}  fitted {chk.fitted:.4f}")

# At `lam = 1` and a deep cutoff the first three shells carry 1, 4 and 9 states.

deep = ModelParams(1.0, 1.0, 60)
_, sol = m0_eigenspaces(deep, k=12)
print([lv.multiplicity for lv in degeneracy_check(sol, deep) if lv.converged][:3])
