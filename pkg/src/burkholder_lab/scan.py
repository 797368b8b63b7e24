"""Sweep the exponent and compare observed ratio extremes with the
constants ``c_p^p`` and ``C_p^p``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

from .families import build_family
from .functionals import bdg_ratio
from .report import Tolerances
from .scalar import burkholder_constants, displayed_burkholder_constants
from .search import SearchSpace, multi_restart_search
from .verify import run_suite

CSV_COLUMNS = ("p", "c_p^p", "observed_min", "observed_max", "C_p^p", "pass")


@dataclass
class ScanRow:
    p: float
    lower: float
    observed_min: float
    observed_max: float
    upper: float
    passed: bool
    suite_pass: bool = False
    upper_printed: float = math.nan
    sharp_gap: float | None = None  # observed_min - (1/p)^p for p >= 2
    evaluations: int = 0
    error: str | None = None

    def csv_row(self) -> list:
        return [self.p, self.lower, self.observed_min, self.observed_max, self.upper,
                self.passed]

    def to_dict(self) -> dict:
        return asdict(self)


def p_scan(family: str, p_grid: Iterable[float], depth: int | None = None,
           seed: int = 0, restarts: int = 8, budget: int = 2000,
           tol: Tolerances = Tolerances(), workers: int = 1) -> list[ScanRow]:
    """One row per ``p``: full verification suite on every family member,
    then minimizing and maximizing searches on the family's tree.

    The observed extremes cover the family members and both searches. A
    row passes when every suite passes and
    ``c_p^p <= observed_min <= observed_max <= C_p^p``. Errors are recorded
    in the row and the scan moves on.
    """
    members = build_family(family, depth=depth, seed=seed)
    space = SearchSpace(members[0][1].tree)
    rows = []
    for p in p_grid:
        p = float(p)
        row = ScanRow(p, math.nan, math.nan, math.nan, math.nan, False)
        try:
            c, C = burkholder_constants(p)
            row.lower, row.upper = c ** p, C ** p
            row.upper_printed = displayed_burkholder_constants(p)[1] ** p
            suites_ok = all(run_suite(m, p, tol).overall_pass for _, m in members)
            ratios = [bdg_ratio(m, p) for _, m in members]
            lo = multi_restart_search(space, p, "minimize", restarts, seed, budget, workers)
            hi = multi_restart_search(space, p, "maximize", restarts, seed, budget, workers)
            row.observed_min = min(ratios + [lo.best_ratio, lo.seen_range[0]])
            row.observed_max = max(ratios + [hi.best_ratio, hi.seen_range[1]])
            row.evaluations = lo.evaluations + hi.evaluations
            row.suite_pass = suites_ok
            slack = 1e-9
            row.passed = bool(suites_ok
                              and row.lower * (1 - slack) <= row.observed_min
                              and row.observed_min <= row.observed_max
                              and row.observed_max <= row.upper * (1 + slack))
            if p >= 2:
                row.sharp_gap = row.observed_min - p ** -p
        except Exception as exc:  # noqa: BLE001 - per-row failure is data
            row.error = f"{type(exc).__name__}: {exc}"
            row.passed = False
        rows.append(row)
    return rows
