"""Scalar kernels: signed powers, the Bregman divergence of ``|x|^p`` and
the constants of the Burkholder inequality.

Every kernel broadcasts over numpy arrays and returns a plain ``float``
when all inputs are scalars.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .report import CheckReport, inequality_report

# |b - a| <= NEAR_DIAGONAL * |a| switches F_p to its binomial series;
# SERIES_ORDER terms keep the truncation below 1e-20 relative there
NEAR_DIAGONAL = 1e-2
SERIES_ORDER = 12


class QuadratureError(RuntimeError):
    pass


def _out(arr):
    arr = np.asarray(arr, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def _check_p(p: float) -> float:
    p = float(p)
    if not p > 1.0 or not math.isfinite(p):
        raise ValueError(f"exponent p must satisfy 1 < p < inf, got {p!r}")
    return p


def signed_power(x, k):
    """``|x|**k * sign(x)`` with the convention that 0 maps to 0."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(ax > 0, np.sign(x) * ax ** k, 0.0)
    return _out(out)


def bregman_divergence(p, a, b):
    """Bregman divergence of ``x -> |x|**p`` between ``a`` and ``b``.

    ``F_p(a, b) = |b|^p - |a|^p - p (b - a) a^<p-1>``. Close to the
    diagonal the closed form cancels catastrophically, so there the value is
    taken from the binomial series of ``|a|^p F_p(1, b/a)``, which is the
    Taylor expansion of the double-integral representation.
    """
    p = _check_p(p)
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float),
                               np.asarray(b, dtype=float))
    closed = (np.abs(b) ** p - np.abs(a) ** p
              - p * (b - a) * np.asarray(signed_power(a, p - 1.0)))
    aa = np.abs(a)
    near = (aa > 0) & (np.abs(b - a) <= NEAR_DIAGONAL * aa)
    if np.any(near):
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(near, (b - a) / np.where(aa > 0, a, 1.0), 0.0)
        coef = [p * (p - 1) / 2]
        for k in range(3, SERIES_ORDER + 1):
            coef.append(coef[-1] * (p - k + 1) / k)
        acc = np.zeros_like(h)
        for c in reversed(coef):
            acc = c + h * acc
        series = aa ** p * h * h * acc
        closed = np.where(near, series, closed)
    # convexity: tiny negative values are rounding noise
    return _out(np.maximum(closed, 0.0))


def g_weight(p, a, b):
    """``(b - a)^2 * max(|a|, |b|)^(p - 2)``.

    At ``a = b = 0`` the weight is defined as 0 for every ``p``; for
    ``p < 2`` this resolves ``0 * 0**negative``, and both sides of the
    comparability estimate vanish there anyway.
    """
    p = _check_p(p)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(m > 0, (b - a) ** 2 * np.where(m > 0, m, 1.0) ** (p - 2.0), 0.0)
    return _out(out)


def comparability_bound(p: float, side: str) -> float:
    """Closed-form comparability constant ``p(p-1)/2``.

    ``side="lower"`` (``F_p >= c G_p``) is available for ``1 < p < 2`` and
    ``side="upper"`` (``F_p <= C G_p``) for ``p >= 2``. The opposite sides
    have no closed form here; use :func:`estimate_comparability`.
    """
    p = _check_p(p)
    if side == "lower":
        if not p < 2:
            raise ValueError(f"closed-form lower constant needs 1 < p < 2, got p={p}")
    elif side == "upper":
        if not p >= 2:
            raise ValueError(f"closed-form upper constant needs p >= 2, got p={p}")
    else:
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    return p * (p - 1) / 2


def _ratio_at(p: float, b):
    return np.asarray(bregman_divergence(p, 1.0, b)) / np.asarray(g_weight(p, 1.0, b))


def estimate_comparability(p: float, side: str, bound: float = 100.0,
                           n_grid: int = 10_000, exclude: float = 1e-3) -> float:
    """Numerical inf (``side="lower"``) or sup (``side="upper"``) of
    ``F_p(1, b) / G_p(1, b)`` over ``b`` in ``[-bound, bound]``.

    By homogeneity this is the best constant for the two-argument ratio on
    the corresponding scale. The window ``|b - 1| < exclude`` is replaced by
    its limit value ``p(p-1)/2``. The grid extremum is polished with a
    golden-section search on the neighbouring bracket.
    """
    p = _check_p(p)
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    if n_grid < 3 or not bound > 1.0 or not 0 < exclude < bound:
        raise ValueError("degenerate grid: need n_grid >= 3, bound > 1, 0 < exclude < bound")
    b = np.linspace(-bound, bound, n_grid)
    b = b[np.abs(b - 1.0) >= exclude]
    if b.size < 3:
        raise ValueError("grid is empty after excluding the diagonal")
    r = _ratio_at(p, b)
    sgn = 1.0 if side == "lower" else -1.0
    i = int(np.argmin(sgn * r))
    best = float(r[i])
    if 0 < i < b.size - 1:
        lo, mid, hi = float(b[i - 1]), float(b[i]), float(b[i + 1])

        def f(x):
            return sgn * float(_ratio_at(p, x))

        try:
            res = optimize.minimize_scalar(f, bracket=(lo, mid, hi), method="golden")
            if lo <= res.x <= hi and abs(res.x - 1.0) >= exclude:
                best = min(best, sgn * res.fun) if sgn > 0 else max(best, -res.fun)
        except ValueError:
            # bracket condition not met: grid value stands
            pass
    limit = p * (p - 1) / 2
    return float(min(best, limit) if side == "lower" else max(best, limit))


def displayed_burkholder_constants(p: float) -> tuple[float, float]:
    """The commonly quoted constant table, verbatim.

    For ``1 < p < 2`` the quoted ``C_p = sqrt(p(p-1)/2)`` is below 1 and is
    violated by the one-step symmetric walk (whose ratio is exactly 1); it is
    kept for reference and comparison only.
    """
    p = _check_p(p)
    if p < 2:
        c = (1 / (p * math.sqrt(2))) * ((p - 1) / p) ** (p + 0.5)
        return c, math.sqrt(p * (p - 1) / 2)
    if p == 2:
        return 0.5, 1.0
    c = (1 / (2 * p)) * ((p - 1) / p) ** ((p - 1) / 2)
    return c, math.sqrt(2 * p)


def burkholder_constants(p: float) -> tuple[float, float]:
    """``(c_p, C_p)`` with ``c_p^p E X*^p <= E S^p <= C_p^p E X*^p``.

    These are the constants produced by the Bregman-divergence argument.
    For ``1 < p < 2`` the upper constant comes from
    ``d_p^(p/2) E S^p <= E (X*)^p`` with ``d_p = p(p-1)/2``, giving
    ``C_p = sqrt(2 / (p(p-1)))``; the other entries equal the printed table.
    Not continuous at ``p = 2``.
    """
    c, C = displayed_burkholder_constants(p)
    if p < 2:
        C = math.sqrt(2 / (p * (p - 1)))
    return c, C


@lru_cache(maxsize=256)
def _pexponent(p: float) -> "PExponent":
    q = p / (p - 1)
    c, C = burkholder_constants(p)
    half = p * (p - 1) / 2
    if p < 2:
        d, D = half, estimate_comparability(p, "upper")
    else:
        d, D = estimate_comparability(p, "lower"), half
    return PExponent(p=p, q=q, c_p=c, C_p=C, d_p=d, D_p=D,
                     doob=(p / (p - 1)) ** p)


@dataclass(frozen=True)
class PExponent:
    """An exponent ``p > 1`` with every derived constant.

    ``d_p`` (for ``p < 2``) and ``D_p`` (for ``p >= 2``) are the closed form
    ``p(p-1)/2``; the opposite side is a numerical estimate.
    """

    p: float
    q: float
    c_p: float
    C_p: float
    d_p: float
    D_p: float
    doob: float

    @classmethod
    def from_p(cls, p: float) -> "PExponent":
        return _pexponent(_check_p(p))

    @property
    def C_p_displayed(self) -> float:
        return displayed_burkholder_constants(self.p)[1]


def power_gap_bound_check(alpha: float, b: float) -> CheckReport:
    """``b^alpha - 1 <= alpha * max(1, b^(alpha-1)) * (b - 1)`` for ``alpha, b >= 1``."""
    if alpha < 1 or b < 1:
        raise ValueError(f"need alpha >= 1 and b >= 1, got alpha={alpha}, b={b}")
    lhs = b ** alpha - 1
    rhs = alpha * max(1.0, b ** (alpha - 1)) * (b - 1)
    return inequality_report("power_gap_bound", lhs, rhs,
                             "b^a - 1 <= a max(1, b^(a-1)) (b - 1)",
                             alpha=float(alpha), b=float(b))


def bregman_quadrature_oracle(p: float, b: float, rtol: float = 1e-12) -> float:
    """``p(p-1) * integral_1^b |y|^(p-2) (b - y) dy`` by adaptive quadrature.

    Independent of the closed form in :func:`bregman_divergence`; it should
    reproduce ``bregman_divergence(p, 1, b)``. When the path crosses 0 the
    integral is split there and the ``|y|^(p-2)`` factor is handled as an
    algebraic weight.
    """
    p = _check_p(p)
    b = float(b)
    if b == 1.0:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if b > 0:
                val, _ = integrate.quad(lambda y: abs(y) ** (p - 2) * (b - y), 1.0, b,
                                        epsabs=0.0, epsrel=rtol, limit=200)
            else:
                # 1 -> 0 then 0 -> b (substituting y = -u on the second leg)
                w = (p - 2.0, 0.0)
                first, _ = integrate.quad(lambda y: b - y, 0.0, 1.0, weight="alg",
                                          wvar=w, epsabs=0.0, epsrel=rtol, limit=200)
                second = 0.0
                if b < 0:
                    second, _ = integrate.quad(lambda u: b + u, 0.0, -b, weight="alg",
                                               wvar=w, epsabs=0.0, epsrel=rtol, limit=200)
                val = -first - second
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature did not converge for p={p}, b={b}: {exc}") from exc
    return p * (p - 1) * val
