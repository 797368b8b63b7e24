"""Machine checks for each identity and inequality in the Bregman-divergence
proof of the Burkholder inequality, evaluated exactly on a finite tree."""

from __future__ import annotations

import hashlib
import math
from dataclasses import replace

import numpy as np

from .functionals import path_functionals
from .report import (CheckReport, SuiteReport, Tolerances, identity_report,
                     inequality_report, skipped_report, two_sided_report)
from .scalar import (PExponent, bregman_divergence, burkholder_constants,
                     g_weight, signed_power)
from .tree import (AdaptedProcess, TreeError, close_martingale, expectation,
                   validate_martingale)

ORTHOGONALITY_RTOL = 1e-10


def _edge_sum(proc: AdaptedProcess, per_edge: np.ndarray) -> float:
    """``E sum_j f(X_{j-1}, X_j)`` given ``f`` on the edge into each node."""
    t = proc.tree
    return math.fsum(t.node_prob[1:] * per_edge[1:])


def _edge_pairs(proc: AdaptedProcess):
    t = proc.tree
    return proc.values[t.parent[1:]], proc.values[1:]


def _need(lo: float, hi: float, p: float, name: str):
    if not lo < p < hi:
        raise ValueError(f"{name} applies to {lo} < p < {hi}, got p={p}")


def check_moment_identity(proc: AdaptedProcess, p: float,
                          rtol: float = Tolerances.identity) -> CheckReport:
    """``E|X_n|^p = |X_0|^p + E sum_j F_p(X_{j-1}, X_j)``.

    Holds for martingales only; other inputs are reported as inapplicable.
    """
    anchor = "E|X_n|^p = E sum_j F_p(X_{j-1}, X_j)"
    if validate_martingale(proc).status != "pass":
        return skipped_report("moment_identity", anchor, "input is not a martingale",
                              status="inapplicable")
    a, b = _edge_pairs(proc)
    f = np.zeros(proc.tree.n_nodes)
    f[1:] = bregman_divergence(p, a, b)
    lhs = expectation(proc.tree, np.abs(proc.terminal) ** p)
    rhs = abs(proc.values[0]) ** p + _edge_sum(proc, f)
    return identity_report("moment_identity", lhs, rhs, anchor, rtol=rtol)


def check_square_identity(proc: AdaptedProcess,
                          rtol: float = Tolerances.identity) -> CheckReport:
    """``E X_n^2 = X_0^2 + E S_n^2``."""
    pf = path_functionals(proc, 2.0)
    return identity_report("square_identity", pf.e_abs_p,
                           proc.values[0] ** 2 + pf.e_sp,
                           "E X_n^2 = E S_n^2(X)", rtol=rtol)


def check_doob(proc: AdaptedProcess, p: float,
               slack: float = Tolerances.inequality) -> CheckReport:
    """``E|X_n|^p <= E(X_n^*)^p <= (p/(p-1))^p E|X_n|^p``."""
    pf = path_functionals(proc, p)
    return two_sided_report("doob", pf.e_abs_p, pf.e_xstar_p,
                            (p / (p - 1)) ** p * pf.e_abs_p,
                            "E|X_n|^p <= E(X_n^*)^p <= (p/(p-1))^p E|X_n|^p",
                            slack=slack)


def check_bdg(proc: AdaptedProcess, p: float, slack: float = Tolerances.inequality,
              constants: tuple[float, float] | None = None) -> CheckReport:
    """``c_p^p E(X_n^*)^p <= E S_n^p <= C_p^p E(X_n^*)^p``.

    ``constants`` overrides ``burkholder_constants(p)``, e.g. to test the
    printed table.
    """
    anchor = "c_p^p E(X_n^*)^p <= E S_n^p(X) <= C_p^p E(X_n^*)^p"
    c, C = burkholder_constants(p) if constants is None else constants
    pf = path_functionals(proc, p)
    if pf.degenerate:
        return CheckReport("bdg", "two-sided", 0.0, 0.0, 0.0, 0.0, "degenerate",
                           anchor, value=pf.e_sp,
                           detail={"reason": "E(X_n^*)^p = 0; holds with any constants"})
    return two_sided_report("bdg", c ** p * pf.e_xstar_p, pf.e_sp, C ** p * pf.e_xstar_p,
                            anchor, slack=slack, c_p=c, C_p=C, ratio=pf.ratio)


def check_comparability_sum(proc: AdaptedProcess, p: float,
                            slack: float = Tolerances.inequality) -> CheckReport:
    """Pathwise comparability summed along the filtration.

    For ``p >= 2``: ``E|X_n|^p <= D_p E sum G_p(X_{j-1}, X_j)``;
    for ``p < 2``: ``E|X_n|^p >= d_p E sum G_p(X_{j-1}, X_j)``, with
    ``d_p = D_p = p(p-1)/2``. Requires ``X_0 = 0``.
    """
    a, b = _edge_pairs(proc)
    g = np.zeros(proc.tree.n_nodes)
    g[1:] = g_weight(p, a, b)
    eg = (p * (p - 1) / 2) * _edge_sum(proc, g)
    e_abs = expectation(proc.tree, np.abs(proc.terminal) ** p)
    if p >= 2:
        return inequality_report("comparability_sum", e_abs, eg,
                                 "E|X_n|^p <= D_p E sum (dX_j)^2 (|X_j| v |X_{j-1}|)^(p-2)",
                                 slack=slack)
    return inequality_report("comparability_sum", eg, e_abs,
                             "E|X_n|^p >= d_p E sum (dX_j)^2 (|X_j| v |X_{j-1}|)^(p-2)",
                             slack=slack)


def check_garsia_bound(proc: AdaptedProcess, p: float,
                       slack: float = Tolerances.inequality) -> CheckReport:
    """``E S_n^p <= (2p)^(p/2) E(X_n^*)^p`` for ``p > 2``."""
    _need(2, math.inf, p, "the square-function upper bound")
    pf = path_functionals(proc, p)
    return inequality_report("garsia_upper", pf.e_sp, (2 * p) ** (p / 2) * pf.e_xstar_p,
                             "E S_n^p(X) <= (2p)^(p/2) E(X_n^*)^p", slack=slack)


def check_lower_pbig(proc: AdaptedProcess, p: float,
                     slack: float = Tolerances.inequality) -> CheckReport:
    """``D_p^(-p/2) (p/(p-1))^(-p^2/2) E(X_n^*)^p <= E S_n^p`` for ``p > 2``."""
    _need(2, math.inf, p, "the p > 2 lower bound")
    anchor = "D_p^(-p/2) (p/(p-1))^(-p^2/2) E(X_n^*)^p <= E S_n^p(X)"
    pf = path_functionals(proc, p)
    if pf.degenerate:
        return skipped_report("lower_pbig", anchor, "E(X_n^*)^p = 0", status="degenerate")
    D = p * (p - 1) / 2
    k = D ** (-p / 2) * (p / (p - 1)) ** (-p * p / 2)
    return inequality_report("lower_pbig", k * pf.e_xstar_p, pf.e_sp, anchor, slack=slack)


def check_lower_psmall(proc: AdaptedProcess, p: float,
                       slack: float = Tolerances.inequality,
                       as_printed: bool = False) -> CheckReport:
    """The ``1 < p < 2`` comparison of ``E S_n^p`` with ``E(X_n^*)^p`` via ``d_p``.

    The argument yields ``d_p^(p/2) E S_n^p <= E(X_n^*)^p``. With
    ``as_printed=True`` the transposed form ``E S_n^p <= d_p^(p/2) E(X_n^*)^p``
    is checked instead; it fails on ordinary walks.
    """
    _need(1, 2, p, "the 1 < p < 2 bound")
    d = p * (p - 1) / 2
    pf = path_functionals(proc, p)
    if as_printed:
        anchor = "d_p^(p/2) E(X_n^*)^p >= E S_n^p(X)"
        if pf.degenerate:
            return skipped_report("lower_psmall_printed", anchor, "E(X_n^*)^p = 0",
                                  status="degenerate")
        return inequality_report("lower_psmall_printed", pf.e_sp,
                                 d ** (p / 2) * pf.e_xstar_p, anchor, slack=slack)
    anchor = "d_p^(p/2) E S_n^p(X) <= E(X_n^*)^p"
    if pf.degenerate:
        return skipped_report("lower_psmall", anchor, "E(X_n^*)^p = 0", status="degenerate")
    return inequality_report("lower_psmall", d ** (p / 2) * pf.e_sp, pf.e_xstar_p,
                             anchor, slack=slack)


def dual_closure(proc: AdaptedProcess, p: float) -> AdaptedProcess:
    """``Z_j = E[X_n^<p-1> | F_j]``."""
    return close_martingale(proc.tree, signed_power(proc.terminal, p - 1.0))


def _same_tree(x: AdaptedProcess, z: AdaptedProcess):
    if x.tree != z.tree:
        raise TreeError("processes live on different trees")


def check_orthogonality(x: AdaptedProcess, z: AdaptedProcess,
                        rtol: float = ORTHOGONALITY_RTOL) -> CheckReport:
    """``E[dX_j dZ_l] = 0`` for all ``j != l``.

    The largest off-diagonal entry is compared against
    ``rtol * max(1, sqrt(E S_n^2(X) E S_n^2(Z)))``.
    """
    _same_tree(x, z)
    t = x.tree
    dx = x.increments[t.paths[:, 1:]]
    dz = z.increments[t.paths[:, 1:]]
    cross = (dx * t.leaf_prob[:, None]).T @ dz
    off = cross - np.diag(np.diag(cross))
    worst = float(np.max(np.abs(off))) if off.size > 1 else 0.0
    scale = max(1.0, math.sqrt(float(np.trace((dx * t.leaf_prob[:, None]).T @ dx))
                               * float(np.trace((dz * t.leaf_prob[:, None]).T @ dz))))
    tol = rtol * scale
    return CheckReport("orthogonality", "identity", worst, 0.0, worst, tol,
                       "pass" if worst <= tol else "fail",
                       "E dX_j dZ_l = 0 for j != l")


def check_pairing(x: AdaptedProcess, z: AdaptedProcess, p: float,
                  slack: float = Tolerances.inequality) -> CheckReport:
    """``|E (X_n - X_0)(Z_n - Z_0)| <= (E S_n^p(X))^(1/p) (E S_n^q(Z))^(1/q)``.

    With ``X_0 = 0`` the left side is ``|E X_n Z_n|``.
    """
    _same_tree(x, z)
    q = p / (p - 1)
    t = x.tree
    lhs = abs(expectation(t, (x.terminal - x.values[0]) * (z.terminal - z.values[0])))
    ex = path_functionals(x, p).e_sp
    ez = path_functionals(z, q).e_sp
    rhs = ex ** (1 / p) * ez ** (1 / q)
    return inequality_report("pairing", lhs, rhs,
                             "|E X_n Z_n| <= (E S_n^p(X))^(1/p) (E S_n^q(Z))^(1/q)",
                             slack=slack)


def check_dual_moment(x: AdaptedProcess, z: AdaptedProcess, p: float,
                      rtol: float = ORTHOGONALITY_RTOL) -> CheckReport:
    """``E|Z_n|^q = E|X_n|^p`` for the dual closure."""
    q = p / (p - 1)
    t = x.tree
    return identity_report("dual_moment", expectation(t, np.abs(z.terminal) ** q),
                           expectation(t, np.abs(x.terminal) ** p),
                           "E|X_n^<p-1>|^(p/(p-1)) = E|X_n|^p", rtol=rtol)


def fingerprint(proc: AdaptedProcess, seed=None) -> dict:
    return {
        "tree": proc.tree.fingerprint(),
        "values": hashlib.sha256(proc.values.tobytes()).hexdigest()[:16],
        "n_nodes": proc.tree.n_nodes,
        "depth_n": proc.tree.depth_n,
        "seed": seed,
    }


def run_suite(proc: AdaptedProcess, p: float, tol: Tolerances = Tolerances(),
              seed=None) -> SuiteReport:
    """Run every check applicable to ``p`` in a fixed order.

    Range-restricted checks outside their range are reported as skipped; a
    non-martingale input fails the validity check and every other check is
    reported inapplicable. Exceptions inside a check become ``"error"``
    reports rather than aborting the suite.
    """
    p = float(p)
    PExponent.from_p(p)  # validates p
    ti, ts = tol.identity, tol.inequality
    valid = validate_martingale(proc)
    checks: list[CheckReport] = [valid]

    def run(check_id, anchor, fn, applies=True, why=""):
        if valid.status != "pass" and check_id != "moment_identity":
            checks.append(skipped_report(check_id, anchor, "input is not a martingale",
                                         status="inapplicable"))
            return None
        if not applies:
            checks.append(skipped_report(check_id, anchor, why))
            return None
        try:
            rep = fn()
        except Exception as exc:  # noqa: BLE001 - reported, suite continues
            nan = float("nan")
            rep = CheckReport(check_id, "inequality", nan, nan, nan, 0.0, "error",
                              anchor, detail={"reason": f"{type(exc).__name__}: {exc}"})
        checks.append(rep)
        return rep

    run("moment_identity", "", lambda: check_moment_identity(proc, p, ti))
    run("square_identity", "", lambda: check_square_identity(proc, ti))
    run("doob", "", lambda: check_doob(proc, p, ts))
    run("bdg", "", lambda: check_bdg(proc, p, ts))
    run("comparability_sum", "", lambda: check_comparability_sum(proc, p, ts))
    run("garsia_upper", "E S_n^p(X) <= (2p)^(p/2) E(X_n^*)^p",
        lambda: check_garsia_bound(proc, p, ts), p > 2, "proved for p > 2")
    run("lower_pbig", "D_p^(-p/2) (p/(p-1))^(-p^2/2) E(X_n^*)^p <= E S_n^p(X)",
        lambda: check_lower_pbig(proc, p, ts), p > 2, "proved for p > 2")
    run("lower_psmall", "d_p^(p/2) E S_n^p(X) <= E(X_n^*)^p",
        lambda: check_lower_psmall(proc, p, ts), p < 2, "proved for 1 < p < 2")

    z = None
    if valid.status == "pass":
        try:
            z = dual_closure(proc, p)
        except Exception:  # noqa: BLE001
            z = None
    run("dual_martingale", "", lambda: replace(validate_martingale(z), check_id="dual_martingale"))
    run("dual_moment", "", lambda: check_dual_moment(proc, z, p))
    run("orthogonality", "", lambda: check_orthogonality(proc, z))
    run("pairing", "", lambda: check_pairing(proc, z, p, ts))

    return SuiteReport(tuple(checks), p, fingerprint(proc, seed))

