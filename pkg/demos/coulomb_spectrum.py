# ---
# jupyter:
#   jupytext:
#     formats: py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Fuzzy-space Coulomb spectrum
#
# Coordinates on fuzzy space are built from two boson modes and obey
# `[x_i, x_j] = 2 i lam eps_ijk x_k`. We first confirm the symbolic
# identities exactly, then diagonalize the truncated Coulomb Hamiltonian
# and compare with the closed-form levels.

# +
from fuzzydynsym.hamiltonians import ModelParams, coulomb_hamiltonian, eigensolve
from fuzzydynsym.ncalg import parse_statement, run_suite, verify_identity
from fuzzydynsym.symmetry import energy_formula

reports = run_suite()
print(f"{sum(r.passed for r in reports)} of {len(reports)} identities reduce to zero")
lhs, rhs = parse_statement("comm(x(1), x(2)) == 2*i*lam*x(3)")
print("user statement:", verify_identity(lhs, rhs).passed)
# -

# The Hamiltonian acts on operator wave functions that preserve the
# occupation number. Its lowest levels converge quickly in the cutoff.

# +
lam, q = 0.5, 1.0
for n_max in (20, 30, 40):
    sol = eigensolve(coulomb_hamiltonian(ModelParams(lam, q, n_max)), k=6)
    levels = sol.cluster_values()
    e1 = abs(levels[0] - energy_formula(1, lam, q)) / abs(energy_formula(1, lam, q))
    print(f"n_max={n_max:2d}  E0={levels[0]:.10f}  relative error {e1:.1e}")
# -

# As lam shrinks the levels approach the hydrogen values `-q^2 / 2n^2`.

for small in (0.4, 0.1, 0.01):
    print(small, [round(energy_formula(n, small, q), 6) for n in (1, 2, 3)])
