"""Finite-tree laboratory for the Burkholder square-function inequality.

Exact enumeration of martingales on finite probability trees, the Bregman
divergence of ``|x|^p``, machine checks of each step of the Bregman-divergence
proof, and a derivative-free search for extremal martingales.
"""

__version__ = "0.1.0"

from .functionals import (DegenerateProcess, bdg_ratio, maximal_function, p_moment,
                          path_functionals, square_function)
from .report import CheckReport, SuiteReport, Tolerances
from .scalar import (PExponent, bregman_divergence, bregman_quadrature_oracle,
                     burkholder_constants, comparability_bound,
                     displayed_burkholder_constants, estimate_comparability, g_weight,
                     power_gap_bound_check, signed_power)
from .search import (EnvelopeViolation, SearchResult, SearchSpace, decode, local_search,
                     multi_restart_search, objective)
from .scan import p_scan
from .tree import (AdaptedProcess, OutcomeTree, close_martingale, conditional_expectation,
                   expectation, gen_random_martingale, gen_symmetric_walk, gen_transform,
                   is_martingale, sign_transform_multipliers, validate_martingale)
from .verify import (check_bdg, check_comparability_sum, check_doob, check_dual_moment,
                     check_garsia_bound, check_lower_pbig, check_lower_psmall,
                     check_moment_identity, check_orthogonality, check_pairing,
                     check_square_identity, dual_closure, run_suite)
