# coding: utf-8

# # The divergence F_p and its weight G_p
#
# F_p(a, b) is the gap at b between |x|^p and its tangent line at a.
# G_p(a, b) = (b - a)^2 max(|a|, |b|)^(p-2) is a cruder quantity with the same
# scaling. The two are comparable, and near the diagonal b = a their ratio
# tends to p(p-1)/2.

import numpy as np

from burkholder_lab import (bregman_divergence, bregman_quadrature_oracle,
                            comparability_bound, estimate_comparability, g_weight)

# A few values that are easy to check by hand.

print(bregman_divergence(2, 1, 3))   # (3 - 1)^2
print(bregman_divergence(3, 1, 2))   # 8 - 1 - 3

# The closed form agrees with a direct integral of the second derivative.

for p in (1.2, 2.0, 3.7):
    for b in (-4.0, -0.5, 0.3, 2.0):
        print(p, b, bregman_divergence(p, 1.0, b), bregman_quadrature_oracle(p, b))

# ## Comparing F with G
#
# Fix a = 1 and let b vary; by homogeneity this covers every pair with a != 0.

b = np.linspace(-20, 20, 40_001)
b = b[np.abs(b - 1) > 1e-3]
for p in (1.5, 3.0):
    r = bregman_divergence(p, 1.0, b) / g_weight(p, 1.0, b)
    print(f"p={p}: F/G ranges over [{r.min():.4f}, {r.max():.4f}], p(p-1)/2 = {p*(p-1)/2}")

# For p < 2 the infimum of F/G is p(p-1)/2; for p >= 2 it is the supremum.

print(comparability_bound(1.5, "lower"), comparability_bound(3.0, "upper"))

# The opposite side has no closed form. A scan with local refinement
# gives an estimate.

print(estimate_comparability(1.5, "upper"), estimate_comparability(3.0, "lower"))
