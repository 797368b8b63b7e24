# coding: utf-8

# # Checking every step of the argument on one martingale
#
# run_suite evaluates each identity and inequality exactly on the tree and
# reports lhs, rhs, margin and status. Checks that only apply to part of the
# exponent range are marked skipped outside it.

from burkholder_lab import (burkholder_constants, check_bdg, check_lower_psmall,
                            displayed_burkholder_constants, gen_random_martingale,
                            gen_symmetric_walk, run_suite)

m = gen_random_martingale(depth=5, branching=3, seed=7)
for p in (1.5, 3.0):
    suite = run_suite(m, p)
    print(f"\np = {p}: overall pass = {suite.overall_pass}")
    for c in suite.checks:
        print(f"  {c.check_id:18s} {c.status:10s} margin={c.margin:.3e}")

# ## Constants for 1 < p < 2
#
# The one-step walk X_1 = +-1 has S_1 = X_1^* = 1, so its ratio is exactly 1
# for every p. A valid upper constant C_p therefore needs C_p^p >= 1.
# The tabulated value sqrt(p(p-1)/2) is below 1. The comparison with d_p
# gives d_p^(p/2) E S^p <= E X*^p, which yields C_p = d_p^(-1/2) instead.

one = gen_symmetric_walk(1)
p = 1.5
print(displayed_burkholder_constants(p), burkholder_constants(p))
print(check_bdg(one, p, constants=displayed_burkholder_constants(p)).status)
print(check_bdg(one, p).status)
print(check_lower_psmall(one, p, as_printed=True).status, check_lower_psmall(one, p).status)
