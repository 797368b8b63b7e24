"""Derivative-free search for martingales that push the ratio
``E S_n^p / E (X_n^*)^p`` towards the Burkholder constants.

A martingale on a fixed tree is parameterized by free child increments:
at each internal node with ``k`` children the first ``k - 1`` increments are
free and the last is solved from the conditional mean-zero constraint, so
every parameter vector decodes to an exact martingale.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .functionals import DEGENERATE_FLOOR, bdg_ratio
from .scalar import burkholder_constants
from .tree import AdaptedProcess, OutcomeTree, sign_transform_multipliers

# relative slack when testing candidates against the envelope
ENVELOPE_RTOL = 1e-9


class EnvelopeViolation(AssertionError):
    """A candidate left ``[c_p^p, C_p^p]``. Always a bug, never a finding."""


class SearchSpace:
    def __init__(self, tree: OutcomeTree):
        self.tree = tree
        t = tree
        N = t.n_nodes
        free_nodes = []
        rows: dict[int, dict[int, float]] = {}
        for v in t.internal:
            kids = t.children(v)
            last = kids[-1]
            for c in kids[:-1]:
                k = len(free_nodes)
                free_nodes.append(int(c))
                rows.setdefault(int(c), {})[k] = 1.0
                rows.setdefault(int(last), {})[k] = -t.branch_prob[c] / t.branch_prob[last]
        d = len(free_nodes)
        inc = np.zeros((N, d))
        for node, entries in rows.items():
            for k, w in entries.items():
                inc[node, k] = w
        val = np.zeros((N, d))
        for i in range(1, N):
            val[i] = val[t.parent[i]] + inc[i]
        self.free_nodes = np.array(free_nodes, dtype=np.int64)
        self.dim = d
        self._inc = inc
        self._val = val
        cols = t.paths[:, 1:]
        # (L, n, d) maps from params to path increments / values
        self._inc_paths = inc[cols]
        self._val_paths = val[cols]

    def decode(self, params) -> AdaptedProcess:
        x = np.asarray(params, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} parameters, got shape {x.shape}")
        return AdaptedProcess(self.tree, self._val @ x)

    def encode_multipliers(self, multipliers) -> np.ndarray:
        """Parameters of the martingale with free increments ``multipliers``
        (one per node, read at the free children)."""
        return np.asarray(multipliers, dtype=float)[self.free_nodes].copy()

    def ratios(self, params: np.ndarray, p: float) -> np.ndarray:
        """Batch ``E S_n^p / E (X_n^*)^p`` for parameter rows; NaN where degenerate."""
        X = np.atleast_2d(np.asarray(params, dtype=float))
        inc = np.einsum("lnd,bd->bln", self._inc_paths, X)
        val = np.einsum("lnd,bd->bln", self._val_paths, X)
        w = self.tree.leaf_prob
        es = (np.sum(inc * inc, axis=2) ** (p / 2)) @ w
        ex = (np.max(np.abs(val), axis=2) ** p) @ w
        out = np.full(X.shape[0], np.nan)
        ok = ex > DEGENERATE_FLOOR
        out[ok] = es[ok] / ex[ok]
        return out


def decode(space: SearchSpace, params) -> AdaptedProcess:
    return space.decode(params)


def _sign(direction: str) -> float:
    if direction == "maximize":
        return 1.0
    if direction == "minimize":
        return -1.0
    raise ValueError(f"direction must be 'minimize' or 'maximize', got {direction!r}")


class _Evaluator:
    """Scores candidates and enforces the envelope on every one of them."""

    def __init__(self, space: SearchSpace, p: float, direction: str):
        self.space = space
        self.p = float(p)
        self.sign = _sign(direction)
        c, C = burkholder_constants(p)
        self.lo, self.hi = c ** p, C ** p
        self.count = 0
        self.seen_min = math.inf
        self.seen_max = -math.inf

    def __call__(self, X: np.ndarray) -> np.ndarray:
        r = self.space.ratios(X, self.p)
        self.count += r.size
        fin = r[np.isfinite(r)]
        if fin.size:
            lo, hi = float(fin.min()), float(fin.max())
            if lo < self.lo * (1 - ENVELOPE_RTOL) or hi > self.hi * (1 + ENVELOPE_RTOL):
                raise EnvelopeViolation(
                    f"ratio range [{lo!r}, {hi!r}] leaves the envelope "
                    f"[{self.lo!r}, {self.hi!r}] at p={self.p}")
            self.seen_min = min(self.seen_min, lo)
            self.seen_max = max(self.seen_max, hi)
        return np.where(np.isfinite(r), self.sign * r, -np.inf)


def objective(space: SearchSpace, params, p: float, direction: str) -> float:
    """Ratio of the decoded martingale, negated when minimizing;
    ``-inf`` for the zero martingale."""
    return float(_Evaluator(space, p, direction)(np.asarray(params, float)[None, :])[0])


@dataclass
class SearchResult:
    best_params: np.ndarray
    best_ratio: float
    direction: str
    p: float
    evaluations: int
    restarts: int
    history: list = field(default_factory=list)
    restart_ratios: list = field(default_factory=list)
    certificate: AdaptedProcess | None = None
    envelope: tuple[float, float] = (math.nan, math.nan)
    seen_range: tuple[float, float] = (math.nan, math.nan)

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "p": self.p,
            "best_ratio": self.best_ratio,
            "best_params": [float(x) for x in self.best_params],
            "envelope": list(self.envelope),
            "evaluations": self.evaluations,
            "restarts": self.restarts,
            "restart_ratios": [float(r) for r in self.restart_ratios],
            "history": [[int(k), float(r)] for k, r in self.history],
            "seen_range": list(self.seen_range),
        }


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x * x))) if x.size else 0.0


def _finish(space, ev, x, p, direction, history, restarts, restart_ratios=()):
    cert = space.decode(x)
    try:
        ratio = bdg_ratio(cert, p)
    except ValueError:
        ratio = math.nan
    if history and math.isfinite(ratio):
        fast = history[-1][1]
        if abs(fast - ratio) > 1e-9 * max(1.0, abs(ratio)):
            raise AssertionError(f"batch ratio {fast!r} disagrees with direct ratio {ratio!r}")
    return SearchResult(best_params=x, best_ratio=ratio, direction=direction, p=float(p),
                        evaluations=ev.count, restarts=restarts, history=history,
                        restart_ratios=list(restart_ratios), certificate=cert,
                        envelope=(ev.lo, ev.hi), seen_range=(ev.seen_min, ev.seen_max))


def local_search(space: SearchSpace, start, p: float, direction: str = "minimize",
                 budget: int = 5000, step: float = 1.0, shrink: float = 0.5,
                 floor: float = 1e-6, _ev: _Evaluator | None = None) -> SearchResult:
    """Coordinate perturbation search with a geometrically shrinking step.

    Each sweep scores all ``2 * dim`` moves ``x +/- step * rms(x) * e_i`` and
    takes the best one if it strictly improves; otherwise the step shrinks
    by ``shrink``. Stops when the step falls below ``floor`` or the
    evaluation budget is spent. Accepted points are rescaled to unit RMS,
    which leaves the ratio unchanged.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    ev = _ev or _Evaluator(space, p, direction)
    sgn = _sign(direction)
    x = np.array(start, dtype=float)
    if x.shape != (space.dim,):
        raise ValueError(f"expected {space.dim} parameters, got shape {x.shape}")
    used = ev.count
    f = float(ev(x[None, :])[0])
    history = [(1, sgn * f)] if math.isfinite(f) else []
    eye = np.vstack([np.eye(space.dim), -np.eye(space.dim)])
    while step >= floor and ev.count - used < budget and space.dim:
        room = budget - (ev.count - used)
        scale = _rms(x) or 1.0
        cand = x + step * scale * eye[:room]
        vals = ev(cand)
        j = int(np.argmax(vals))
        if vals[j] > f:
            x = cand[j] / (_rms(cand[j]) or 1.0)
            f = float(vals[j])
            history.append((ev.count - used, sgn * f))
        else:
            step *= shrink
    if _ev is not None:
        return SearchResult(x, sgn * f, direction, float(p), ev.count - used, 1, history)
    return _finish(space, ev, x, p, direction, history, 1)


def default_starts(space: SearchSpace, restarts: int, seed: int) -> list[np.ndarray]:
    """Deterministic starts: the walk (all free increments 1), its
    mean-reverting and momentum sign transforms, then Gaussian draws keyed
    by ``(seed, index)``."""
    ones = np.ones(space.dim)
    base = space.decode(ones)
    starts = [ones,
              space.encode_multipliers(sign_transform_multipliers(base, "revert")),
              space.encode_multipliers(sign_transform_multipliers(base, "momentum"))]
    for i in range(len(starts), restarts):
        starts.append(np.random.default_rng([seed, i]).standard_normal(space.dim))
    return starts[:restarts]


def multi_restart_search(space: SearchSpace, p: float, direction: str = "minimize",
                         restarts: int = 100, seed: int = 0, budget: int = 5000,
                         workers: int = 1, starts: Sequence[np.ndarray] | None = None
                         ) -> SearchResult:
    """Best of :func:`local_search` over deterministic starts.

    Restarts may run on ``workers`` threads; results are merged by restart
    index, so the outcome does not depend on scheduling.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    starts = list(starts) if starts is not None else default_starts(space, restarts, seed)

    def one(x0):
        ev = _Evaluator(space, p, direction)
        res = local_search(space, x0, p, direction, budget, _ev=ev)
        return res, ev

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(one, starts))
    else:
        runs = [one(x0) for x0 in starts]

    sgn = _sign(direction)
    best = max(range(len(runs)), key=lambda i: (sgn * runs[i][0].best_ratio, -i)
               if math.isfinite(runs[i][0].best_ratio) else (-math.inf, -i))
    res, _ = runs[best]
    total = _Evaluator(space, p, direction)
    total.count = sum(ev.count for _, ev in runs)
    total.seen_min = min(ev.seen_min for _, ev in runs)
    total.seen_max = max(ev.seen_max for _, ev in runs)
    return _finish(space, total, res.best_params, p, direction, res.history, len(runs),
                   [r.best_ratio for r, _ in runs])
