# ---
# jupyter:
#   jupytext:
#     formats: py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Charge-dyon levels
#
# A charge bound to a dyon keeps the hydrogen symmetry once a
# `mu^2 / 2 m r^2` term is added. The coupling `mu` must be a half integer.
# Levels follow `E_n = -gamma^2 / 2n^2` with `n = |mu| + 1 + k`.

# +
from fuzzydynsym.zwanziger import (
    DyonSystem,
    cross_check,
    dirac_check,
    flux,
    level_table,
    reduce_two_body,
)

print("mu=0.5 allowed:", dirac_check(0.5), " mu=0.3 allowed:", dirac_check(0.3))
print(reduce_two_body(DyonSystem(e1=1.0, e2=0.0, g1=0.0, g2=6.283185307179586, m1=1.0, m2=1.0)))
table = level_table(0.5, 1.0, count=3)
print(table.to_csv())
# -

# An independent finite-difference radial solver reproduces every `(n, j)`
# entry after Richardson refinement.

cc = cross_check(table)
for e in cc.entries:
    print(e.n, e.j, f"{e.table_energy:.8f}", f"{e.oracle_richardson:.8f}", f"{e.error:.1e}")

# The monopole flux through any sphere around the origin equals `g`.

print(flux(12.566370614359172))
