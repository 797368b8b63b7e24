import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from burkholder_lab.report import Tolerances
from burkholder_lab.scalar import displayed_burkholder_constants
from burkholder_lab.tree import (AdaptedProcess, OutcomeTree, TreeError, gen_random_martingale,
                                 gen_symmetric_walk)
from burkholder_lab.verify import (check_bdg, check_comparability_sum, check_doob,
                                   check_dual_moment, check_garsia_bound, check_lower_pbig,
                                   check_lower_psmall, check_moment_identity,
                                   check_orthogonality, check_pairing, check_square_identity,
                                   dual_closure, run_suite)

WALK2 = gen_symmetric_walk(2)


class TestHandAnchors:
    def test_moment_identity_p3(self):
        rep = check_moment_identity(WALK2, 3)
        assert rep.passed
        assert rep.lhs == 4.0 and rep.rhs == pytest.approx(4.0, abs=1e-14)

    def test_square_identity(self):
        rep = check_square_identity(WALK2)
        assert (rep.lhs, rep.rhs, rep.passed) == (2.0, 2.0, True)

    def test_doob_p2(self):
        rep = check_doob(WALK2, 2)
        assert (rep.lhs, rep.value, rep.rhs) == (2.0, 2.5, 8.0)
        assert rep.passed

    def test_bdg_p2(self):
        rep = check_bdg(WALK2, 2)
        assert rep.lhs == pytest.approx(0.625)
        assert rep.value == 2.0 and rep.rhs == pytest.approx(2.5)
        assert rep.passed and rep.detail["ratio"] == pytest.approx(0.8)

    def test_garsia_p3(self):
        rep = check_garsia_bound(WALK2, 3)
        assert rep.lhs == pytest.approx(2 * math.sqrt(2), rel=1e-14)
        assert rep.rhs == pytest.approx(6 ** 1.5 * 4.5, rel=1e-14)
        assert rep.passed

    def test_lower_pbig_p3(self):
        rep = check_lower_pbig(WALK2, 3)
        assert rep.lhs == pytest.approx(3 ** -1.5 * 1.5 ** -4.5 * 4.5, rel=1e-14)
        assert rep.rhs == pytest.approx(2 * math.sqrt(2), rel=1e-14)
        assert rep.passed

    def test_lower_psmall_derived_and_printed(self):
        # p = 1.5 on the depth-1 walk: E S^p = E X*^p = 1, d_p = 0.375
        w = gen_symmetric_walk(1)
        assert check_lower_psmall(w, 1.5).passed
        printed = check_lower_psmall(w, 1.5, as_printed=True)
        assert printed.check_id == "lower_psmall_printed"
        assert printed.rhs == pytest.approx(0.375 ** 0.75)
        assert not printed.passed

    def test_pairing_equality_p3(self):
        z = dual_closure(WALK2, 3)
        np.testing.assert_allclose(z.values, [0, 2, -2, 4, 0, 0, -4])
        rep = check_pairing(WALK2, z, 3)
        assert rep.lhs == 4.0
        assert abs(rep.rhs - 4.0) <= 1e-9
        assert rep.passed

    def test_dual_moment_p3(self):
        rep = check_dual_moment(WALK2, dual_closure(WALK2, 3), 3)
        assert rep.lhs == pytest.approx(4.0) and rep.passed


class TestRanges:
    def test_garsia_needs_p_gt_2(self):
        with pytest.raises(ValueError):
            check_garsia_bound(WALK2, 2.0)

    def test_psmall_needs_p_lt_2(self):
        with pytest.raises(ValueError):
            check_lower_psmall(WALK2, 2.5)

    def test_mismatched_trees(self):
        with pytest.raises(TreeError):
            check_orthogonality(WALK2, gen_symmetric_walk(3))


class TestFailures:
    def test_printed_constants_fail_one_step_walk(self):
        w = gen_symmetric_walk(1)
        rep = check_bdg(w, 1.5, constants=displayed_burkholder_constants(1.5))
        assert rep.status == "fail"
        assert check_bdg(w, 1.5).passed

    def test_degenerate_bdg(self):
        t = OutcomeTree.regular(2)
        rep = check_bdg(AdaptedProcess(t, np.zeros(7)), 3)
        assert rep.status == "degenerate" and rep.passed

    def test_non_martingale_suite(self):
        vals = WALK2.values.copy()
        vals[3] += 1.0
        suite = run_suite(AdaptedProcess(WALK2.tree, vals), 3)
        assert not suite.overall_pass
        assert suite["martingale"].status == "fail"
        others = [c for c in suite.checks if c.check_id != "martingale"]
        assert others and all(c.status == "inapplicable" for c in others)


class TestSuite:
    def test_walk_p3(self):
        suite = run_suite(gen_symmetric_walk(4), 3)
        assert suite.overall_pass, suite.failed()
        assert suite["lower_psmall"].status == "skipped"
        assert suite["garsia_upper"].status == "pass"

    def test_random_p15(self):
        suite = run_suite(gen_random_martingale(5, 3, seed=7), 1.5)
        assert suite.overall_pass, suite.failed()
        assert suite["garsia_upper"].status == "skipped"
        assert suite["lower_psmall"].status == "pass"

    def test_order_and_ids(self):
        ids = [c.check_id for c in run_suite(WALK2, 2).checks]
        assert ids == ["martingale", "moment_identity", "square_identity", "doob", "bdg",
                       "comparability_sum", "garsia_upper", "lower_pbig", "lower_psmall",
                       "dual_martingale", "dual_moment", "orthogonality", "pairing"]

    def test_deterministic(self):
        proc = gen_random_martingale(4, 2, seed=3)
        assert run_suite(proc, 2.5, seed=3).to_dict() == run_suite(proc, 2.5, seed=3).to_dict()

    def test_tolerances_respected(self):
        rep = run_suite(WALK2, 3, Tolerances(identity=1e-3, inequality=0.0))
        assert rep["moment_identity"].tolerance == pytest.approx(4e-3)

    def test_bad_p(self):
        with pytest.raises(ValueError):
            run_suite(WALK2, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 5), st.integers(2, 3), st.integers(0, 10_000),
           st.sampled_from([1.1, 1.5, 1.9, 2.0, 2.5, 3.0, 4.0]))
    def test_all_pass_on_random(self, depth, branching, seed, p):
        suite = run_suite(gen_random_martingale(depth, branching, seed), p)
        assert suite.overall_pass, [c.to_dict() for c in suite.failed()]

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 1000), st.floats(1.05, 5.0))
    def test_comparability_sum_scale_free(self, depth, seed, p):
        proc = gen_random_martingale(depth, 3, seed)
        a = check_comparability_sum(proc, p)
        b = check_comparability_sum(proc.scaled(-3.0), p)
        assert a.passed and b.passed
        assert b.lhs == pytest.approx(3 ** p * a.lhs, rel=1e-10)
