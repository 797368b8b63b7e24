"""Structured results for identity and inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

IDENTITY_RTOL = 1e-9
INEQUALITY_SLACK = 1e-12

# statuses that count toward an overall pass
_OK = frozenset({"pass", "degenerate", "skipped", "inapplicable"})


@dataclass(frozen=True)
class Tolerances:
    identity: float = IDENTITY_RTOL
    inequality: float = INEQUALITY_SLACK


@dataclass(frozen=True)
class CheckReport:
    """One verified identity or inequality.

    For one-sided inequalities ``lhs <= rhs`` is checked. Two-sided checks
    store the lower bound in ``lhs``, the upper bound in ``rhs`` and the
    bounded quantity in ``value``. Identities compare ``lhs`` with ``rhs``.
    ``tolerance`` is always the absolute slack actually applied.
    """

    check_id: str
    kind: str  # "identity" | "inequality" | "two-sided"
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    status: str
    anchor: str
    value: float | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in _OK

    def to_dict(self) -> dict[str, Any]:
        out = {
            "check_id": self.check_id,
            "kind": self.kind,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "margin": _num(self.margin),
            "tolerance": _num(self.tolerance),
            "status": self.status,
            "pass": self.passed,
            "anchor": self.anchor,
        }
        if self.value is not None:
            out["value"] = _num(self.value)
        if self.detail:
            out["detail"] = {k: _num(v) if isinstance(v, float) else v
                             for k, v in self.detail.items()}
        return out


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _scale(*xs: float) -> float:
    return max([abs(x) for x in xs] + [1.0])


def identity_report(check_id: str, lhs: float, rhs: float, anchor: str,
                    rtol: float = IDENTITY_RTOL, **detail) -> CheckReport:
    lhs, rhs = float(lhs), float(rhs)
    tol = rtol * _scale(lhs, rhs)
    margin = abs(lhs - rhs)
    status = "pass" if margin <= tol else "fail"
    return CheckReport(check_id, "identity", lhs, rhs, margin, tol, status,
                       anchor, detail=detail)


def inequality_report(check_id: str, lhs: float, rhs: float, anchor: str,
                      slack: float = INEQUALITY_SLACK, **detail) -> CheckReport:
    lhs, rhs = float(lhs), float(rhs)
    tol = slack * _scale(lhs, rhs)
    status = "pass" if lhs <= rhs + tol else "fail"
    return CheckReport(check_id, "inequality", lhs, rhs, rhs - lhs, tol,
                       status, anchor, detail=detail)


def two_sided_report(check_id: str, lower: float, value: float, upper: float,
                     anchor: str, slack: float = INEQUALITY_SLACK,
                     **detail) -> CheckReport:
    lower, value, upper = float(lower), float(value), float(upper)
    tol = slack * _scale(lower, value, upper)
    ok = lower <= value + tol and value <= upper + tol
    margin = min(value - lower, upper - value)
    return CheckReport(check_id, "two-sided", lower, upper, margin, tol,
                       "pass" if ok else "fail", anchor, value=value,
                       detail=detail)


def skipped_report(check_id: str, anchor: str, reason: str,
                   status: str = "skipped") -> CheckReport:
    nan = float("nan")
    return CheckReport(check_id, "inequality", nan, nan, nan, 0.0, status,
                       anchor, detail={"reason": reason})


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple[CheckReport, ...]
    p: float
    fingerprint: dict[str, Any]

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, check_id: str) -> CheckReport:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def failed(self) -> list[CheckReport]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "fingerprint": self.fingerprint,
            "overall_pass": self.overall_pass,
            "checks": [c.to_dict() for c in self.checks],
        }
