# coding: utf-8

# # Searching for extreme ratios
#
# On a fixed tree, the free child increments parameterize every martingale
# with X_0 = 0. The search perturbs one coordinate at a time and takes the
# best move. The step shrinks when no move improves. Every candidate is
# checked against [c_p^p, C_p^p], and a candidate outside that range stops
# the search with an error.

from burkholder_lab import (OutcomeTree, SearchSpace, bdg_ratio, gen_symmetric_walk,
                            multi_restart_search, p_scan)

space = SearchSpace(OutcomeTree.regular(4))
p = 3.0
walk = bdg_ratio(gen_symmetric_walk(4), p)
res = multi_restart_search(space, p, "minimize", restarts=20, seed=0, budget=3000)
print(f"walk ratio {walk:.4f} -> searched minimum {res.best_ratio:.4f}")
print("envelope", res.envelope, "evaluations", res.evaluations)
print(res.certificate.path_values().round(3))

# The minimum found is still far above (1/p)^p, which is approached only
# on much deeper trees.

print("(1/p)^p =", p ** -p)

# A short sweep over the exponent, on the walk family.

for row in p_scan("walk", [1.5, 2.0, 3.0], depth=4, restarts=4, budget=800):
    print(f"p={row.p}: [{row.lower:.4f}, {row.upper:.4f}] observed "
          f"[{row.observed_min:.4f}, {row.observed_max:.4f}] pass={row.passed}")
