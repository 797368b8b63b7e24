"""Pathwise functionals of adapted processes: square function, maximal
function, p-th moments and the Burkholder ratio ``E S_n^p / E (X_n^*)^p``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import AdaptedProcess, OutcomeTree, expectation

# E (X_n^*)^p at or below this is treated as the zero process
DEGENERATE_FLOOR = 1e-300


class DegenerateProcess(ValueError):
    """The maximal function vanishes almost surely, so no ratio exists."""


def running_square_function(proc: AdaptedProcess) -> np.ndarray:
    """``S_1, ..., S_n`` along every leaf path, shape ``(n_leaves, n)``."""
    inc = proc.increments[proc.tree.paths[:, 1:]]
    return np.sqrt(np.cumsum(inc * inc, axis=1))


def running_maximal_function(proc: AdaptedProcess) -> np.ndarray:
    """``X_1^*, ..., X_n^*`` along every leaf path, shape ``(n_leaves, n)``."""
    return np.maximum.accumulate(np.abs(proc.values[proc.tree.paths[:, 1:]]), axis=1)


def square_function(proc: AdaptedProcess) -> np.ndarray:
    """``S_n = (sum_j (X_j - X_{j-1})^2)^(1/2)`` at every leaf."""
    inc = proc.increments[proc.tree.paths[:, 1:]]
    return np.sqrt(np.sum(inc * inc, axis=1))


def maximal_function(proc: AdaptedProcess) -> np.ndarray:
    """``X_n^* = max_{1<=j<=n} |X_j|`` at every leaf (``X_0`` excluded)."""
    return np.max(np.abs(proc.values[proc.tree.paths[:, 1:]]), axis=1)


def p_moment(tree: OutcomeTree, leaf_values, p: float) -> float:
    if not p > 0:
        raise ValueError(f"moment order must be positive, got {p}")
    return expectation(tree, np.abs(np.asarray(leaf_values, dtype=float)) ** p)


@dataclass(frozen=True)
class PathFunctionals:
    s_n: np.ndarray
    x_star: np.ndarray
    terminal: np.ndarray
    p: float
    e_sp: float
    e_xstar_p: float
    e_abs_p: float

    @property
    def degenerate(self) -> bool:
        return self.e_xstar_p <= DEGENERATE_FLOOR

    @property
    def ratio(self) -> float:
        if self.degenerate:
            raise DegenerateProcess("E (X_n^*)^p vanishes; the ratio is undefined")
        return self.e_sp / self.e_xstar_p


def path_functionals(proc: AdaptedProcess, p: float) -> PathFunctionals:
    t = proc.tree
    inc = proc.increments[t.paths[:, 1:]]
    sq = np.sum(inc * inc, axis=1)
    xs = maximal_function(proc)
    term = proc.terminal
    return PathFunctionals(
        s_n=np.sqrt(sq), x_star=xs, terminal=term, p=float(p),
        # raise the sum of squares directly: exact at p = 2
        e_sp=p_moment(t, sq, p / 2),
        e_xstar_p=p_moment(t, xs, p),
        e_abs_p=p_moment(t, term, p),
    )


def bdg_ratio(proc: AdaptedProcess, p: float) -> float:
    """``E S_n^p / E (X_n^*)^p``; raises :class:`DegenerateProcess` for the
    zero process."""
    if not p > 1:
        raise ValueError(f"exponent p must exceed 1, got {p}")
    return path_functionals(proc, p).ratio
