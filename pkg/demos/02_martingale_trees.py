# coding: utf-8

# # Martingales on finite trees
#
# A martingale here is a value at every node of a rooted tree whose leaves
# all sit at the same depth. Each node's value must equal the
# probability-weighted mean of its children. Every expectation is an exact
# sum over leaves.

import numpy as np

from burkholder_lab import (close_martingale, conditional_expectation, expectation,
                            gen_random_martingale, gen_symmetric_walk, gen_transform,
                            path_functionals, sign_transform_multipliers,
                            validate_martingale)

walk = gen_symmetric_walk(3)
print(walk.path_values())          # one row per leaf: X_0, X_1, X_2, X_3
print(walk.tree.leaf_prob)

# The square function and the maximal function are computed leaf by leaf.

pf = path_functionals(walk, 2.0)
print(pf.s_n, pf.x_star)
print("E S^2 =", pf.e_sp, " E X_n^2 =", pf.e_abs_p)

# Random martingales use Dirichlet branch probabilities and Gaussian
# increments. The last child's increment is solved from the mean-zero
# constraint.

m = gen_random_martingale(depth=4, branching=3, seed=7)
print(m.tree.n_leaves, validate_martingale(m).status)

# Conditioning a terminal variable on level j averages it over each
# subtree rooted at that level.

y = m.terminal ** 2
print(conditional_expectation(m.tree, y, 1), expectation(m.tree, y))

# The closure Z_j = E[Y | F_j] is a martingale with terminal value Y.

z = close_martingale(m.tree, np.sign(m.terminal))
print(validate_martingale(z).passed, z.values[0])

# Multiplying increments by parent-measurable signs gives another
# martingale with the same square function and a different maximal function.

rev = gen_transform(walk, sign_transform_multipliers(walk, "revert"))
print(path_functionals(rev, 2.0).x_star)
