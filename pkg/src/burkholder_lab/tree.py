"""Finite filtered probability spaces encoded as rooted trees.

Nodes are stored in breadth-first order (every parent precedes its
children). Depth ``j`` of the tree is the sigma-field ``F_j``; the root is
the trivial ``F_0`` and carries the starting value ``X_0``. All leaves sit at
the same depth ``n``. Expectations are computed by exact enumeration of the
leaves.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .report import CheckReport

DEFAULT_LEAF_CAP = 2 ** 20
MARTINGALE_RTOL = 1e-10


class TreeError(ValueError):
    """Structurally invalid tree or process."""


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


class OutcomeTree:
    """Rooted tree with branch probabilities and uniform leaf depth.

    Parameters
    ----------
    parent : sequence of int
        ``parent[0] == -1`` for the root; otherwise ``parent[i] < i``.
    branch_prob : sequence of float
        Conditional probability of moving from the parent to node ``i``.
        Siblings must sum to 1 within ``prob_tol``.
    """

    def __init__(self, parent: Sequence[int], branch_prob: Sequence[float],
                 prob_tol: float = 1e-12, leaf_cap: int = DEFAULT_LEAF_CAP):
        parent = np.asarray(parent, dtype=np.int64)
        branch_prob = np.asarray(branch_prob, dtype=float)
        n = parent.size
        if n < 2 or branch_prob.shape != parent.shape:
            raise TreeError("tree needs a root and at least one child, with one probability per node")
        if parent[0] != -1 or np.any(parent[1:] < 0) or np.any(parent[1:] >= np.arange(1, n)):
            raise TreeError("nodes must be in breadth-first order with a single root at index 0")
        if branch_prob[0] != 1.0:
            raise TreeError("root branch probability must be 1")
        if np.any(~(branch_prob > 0)) or np.any(branch_prob > 1):
            raise TreeError("branch probabilities must lie in (0, 1]")

        depth = np.zeros(n, dtype=np.int64)
        node_prob = np.ones(n)
        for i in range(1, n):
            depth[i] = depth[parent[i]] + 1
            node_prob[i] = node_prob[parent[i]] * branch_prob[i]
        if np.any(np.diff(depth) < 0):
            raise TreeError("nodes must be sorted by depth")

        n_children = np.bincount(parent[1:], minlength=n)
        sums = np.bincount(parent[1:], weights=branch_prob[1:], minlength=n)
        internal = n_children > 0
        bad = internal & (np.abs(sums - 1.0) > prob_tol)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise TreeError(f"children of node {i} have probabilities summing to {sums[i]!r}")
        leaves = np.flatnonzero(~internal)
        depth_n = int(depth[leaves[0]])
        if np.any(depth[leaves] != depth_n):
            raise TreeError("all leaves must have the same depth")
        if leaves.size > leaf_cap:
            raise TreeError(f"{leaves.size} leaves exceed the enumeration cap {leaf_cap}")

        self.parent = _frozen(parent, np.int64)
        self.branch_prob = _frozen(branch_prob, float)
        self.depth = _frozen(depth, np.int64)
        self.node_prob = _frozen(node_prob, float)
        self.n_children = _frozen(n_children, np.int64)
        self.leaves = _frozen(leaves, np.int64)
        self.depth_n = depth_n
        self.internal = _frozen(np.flatnonzero(internal), np.int64)

        # paths[k, j] is the depth-j ancestor of leaf k
        paths = np.empty((leaves.size, depth_n + 1), dtype=np.int64)
        paths[:, depth_n] = leaves
        for j in range(depth_n - 1, -1, -1):
            paths[:, j] = parent[paths[:, j + 1]]
        self.paths = _frozen(paths, np.int64)
        self.leaf_prob = _frozen(node_prob[leaves], float)
        if abs(math.fsum(self.leaf_prob) - 1.0) > max(prob_tol, 1e-12) * depth_n:
            raise TreeError("leaf probabilities do not sum to 1")

    @property
    def n_nodes(self) -> int:
        return self.parent.size

    @property
    def n_leaves(self) -> int:
        return self.leaves.size

    def children(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.parent == v)

    def level(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.depth == j)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.parent.tobytes())
        h.update(self.branch_prob.tobytes())
        return h.hexdigest()[:16]

    @classmethod
    def regular(cls, depth: int, branching: int = 2, probs: Sequence[float] | None = None,
                leaf_cap: int = DEFAULT_LEAF_CAP) -> "OutcomeTree":
        """Complete tree where every internal node has ``branching`` children
        with the same conditional probabilities ``probs`` (uniform by default)."""
        if depth < 1 or branching < 2:
            raise TreeError("need depth >= 1 and branching >= 2")
        if branching ** depth > leaf_cap:
            raise TreeError(f"{branching}^{depth} leaves exceed the enumeration cap {leaf_cap}")
        probs = np.full(branching, 1.0 / branching) if probs is None else np.asarray(probs, float)
        parent, bp = [-1], [1.0]
        frontier = [0]
        for _ in range(depth):
            nxt = []
            for v in frontier:
                for k in range(branching):
                    parent.append(v)
                    bp.append(float(probs[k]))
                    nxt.append(len(parent) - 1)
            frontier = nxt
        return cls(parent, bp, leaf_cap=leaf_cap)

    def __eq__(self, other) -> bool:
        return (isinstance(other, OutcomeTree)
                and np.array_equal(self.parent, other.parent)
                and np.array_equal(self.branch_prob, other.branch_prob))

    def __hash__(self) -> int:
        return hash(self.fingerprint())

    def __repr__(self) -> str:
        return f"OutcomeTree(n_nodes={self.n_nodes}, n_leaves={self.n_leaves}, depth_n={self.depth_n})"


@dataclass(frozen=True, eq=False)
class AdaptedProcess:
    """Real values on every node of an :class:`OutcomeTree`.

    ``values[0]`` is the starting value, normally ``X_0 = 0``. Increments are taken along edges, so the square
    function counts ``X_1 - X_0`` as the first increment.
    """

    tree: OutcomeTree
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.tree.n_nodes,):
            raise TreeError(f"expected {self.tree.n_nodes} node values, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def increments(self) -> np.ndarray:
        """Edge increments ``value(v) - value(parent(v))``; 0 at the root."""
        inc = np.zeros_like(self.values)
        inc[1:] = self.values[1:] - self.values[self.tree.parent[1:]]
        return inc

    @property
    def terminal(self) -> np.ndarray:
        return self.values[self.tree.leaves]

    def path_values(self) -> np.ndarray:
        """``(n_leaves, n + 1)`` array of ``X_0, ..., X_n`` along each leaf path."""
        return self.values[self.tree.paths]

    def scaled(self, lam: float) -> "AdaptedProcess":
        return AdaptedProcess(self.tree, lam * self.values)

    def __neg__(self) -> "AdaptedProcess":
        return self.scaled(-1.0)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AdaptedProcess) and self.tree == other.tree
                and np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.tree.fingerprint(), self.values.tobytes()))


def martingale_defects(proc: AdaptedProcess) -> np.ndarray:
    """Per internal node: ``sum_c prob(c) value(c) - value(v)``."""
    t = proc.tree
    mean = np.bincount(t.parent[1:], weights=t.branch_prob[1:] * proc.values[1:],
                       minlength=t.n_nodes)
    return (mean - proc.values)[t.internal]


def validate_martingale(proc: AdaptedProcess, rtol: float = MARTINGALE_RTOL) -> CheckReport:
    """Check that every node value is the mean of its children's values.

    Node ``v`` passes when the defect is at most ``rtol * (1 + |X(v)|)``.
    Non-finite values are reported with status ``"malformed"``.
    """
    anchor = "E[X_j - X_{j-1} | F_{j-1}] = 0"
    if not np.all(np.isfinite(proc.values)):
        bad = np.flatnonzero(~np.isfinite(proc.values))
        nan = float("nan")
        return CheckReport("martingale", "identity", nan, nan, nan, 0.0, "malformed",
                           anchor, detail={"reason": f"non-finite value at nodes {bad[:5].tolist()}"})
    t = proc.tree
    dev = np.abs(martingale_defects(proc))
    allowed = rtol * (1.0 + np.abs(proc.values[t.internal]))
    worst = float(dev.max())
    ok = bool(np.all(dev <= allowed))
    i = int(np.argmax(dev / allowed))
    return CheckReport("martingale", "identity", worst, 0.0, worst, float(allowed[i]),
                       "pass" if ok else "fail", anchor,
                       detail={"worst_node": int(t.internal[i])})


def is_martingale(proc: AdaptedProcess, rtol: float = MARTINGALE_RTOL) -> bool:
    return validate_martingale(proc, rtol).status == "pass"


def expectation(tree: OutcomeTree, leaf_values) -> float:
    """Exact ``E[Y]`` for a function ``Y`` of the leaves (fsum in leaf order)."""
    y = np.asarray(leaf_values, dtype=float)
    if y.shape != (tree.n_leaves,):
        raise TreeError(f"expected {tree.n_leaves} leaf values, got shape {y.shape}")
    return math.fsum(tree.leaf_prob * y)


def conditional_expectation(tree: OutcomeTree, leaf_values, level: int) -> np.ndarray:
    """``E[Y | F_level]`` as one value per node at depth ``level``
    (ordered like ``tree.level(level)``)."""
    if not 0 <= level <= tree.depth_n:
        raise TreeError(f"level must be in [0, {tree.depth_n}], got {level}")
    y = np.asarray(leaf_values, dtype=float)
    if y.shape != (tree.n_leaves,):
        raise TreeError(f"expected {tree.n_leaves} leaf values, got shape {y.shape}")
    anc = tree.paths[:, level]
    num = np.bincount(anc, weights=tree.leaf_prob * y, minlength=tree.n_nodes)
    nodes = tree.level(level)
    if level == tree.depth_n:
        return y.copy()
    return num[nodes] / tree.node_prob[nodes]


def close_martingale(tree: OutcomeTree, terminal) -> AdaptedProcess:
    """The martingale ``Z_j = E[Y | F_j]`` closed by the terminal variable ``Y``.

    Built backwards level by level, so leaves carry ``Y`` exactly and every
    internal node is the probability-weighted mean of its children.
    """
    y = np.asarray(terminal, dtype=float)
    if y.shape != (tree.n_leaves,):
        raise TreeError(f"expected {tree.n_leaves} leaf values, got shape {y.shape}")
    vals = np.zeros(tree.n_nodes)
    vals[tree.leaves] = y
    for j in range(tree.depth_n - 1, -1, -1):
        kids = tree.level(j + 1)
        vals += np.bincount(tree.parent[kids], weights=tree.branch_prob[kids] * vals[kids],
                            minlength=tree.n_nodes)
    return AdaptedProcess(tree, vals)


def gen_symmetric_walk(depth: int, cap: int = 20) -> AdaptedProcess:
    """Simple random walk with +1/-1 steps (first child steps up)."""
    if depth < 1:
        raise TreeError("depth must be >= 1")
    if depth > cap:
        raise TreeError(f"depth {depth} exceeds the cap {cap}")
    tree = OutcomeTree.regular(depth, 2)
    vals = np.zeros(tree.n_nodes)
    step = np.where(np.arange(tree.n_nodes) % 2 == 1, 1.0, -1.0)
    for i in range(1, tree.n_nodes):
        vals[i] = vals[tree.parent[i]] + step[i]
    return AdaptedProcess(tree, vals)


def gen_random_martingale(depth: int, branching: int = 2, seed: int = 0,
                          value_scale: float = 1.0,
                          leaf_cap: int = DEFAULT_LEAF_CAP) -> AdaptedProcess:
    """Random martingale on a complete tree, deterministic in ``seed``.

    Each internal node gets Dirichlet branch probabilities (redrawn while any
    is below 1e-6) and normal increments for all but the last child; the last
    increment is solved from the conditional mean-zero constraint.
    """
    if depth < 1 or branching < 2:
        raise TreeError("need depth >= 1 and branching >= 2")
    if branching ** depth > leaf_cap:
        raise TreeError(f"{branching}^{depth} leaves exceed the enumeration cap {leaf_cap}")
    rng = np.random.default_rng(seed)
    parent, bp, vals = [-1], [1.0], [0.0]
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            probs = rng.dirichlet(np.ones(branching))
            while probs.min() < 1e-6:
                probs = rng.dirichlet(np.ones(branching))
            inc = value_scale * rng.standard_normal(branching)
            inc[-1] = -np.dot(probs[:-1], inc[:-1]) / probs[-1]
            for k in range(branching):
                parent.append(v)
                bp.append(float(probs[k]))
                vals.append(vals[v] + inc[k])
                nxt.append(len(parent) - 1)
        frontier = nxt
    # dirichlet draws sum to 1 only up to rounding
    bp = np.asarray(bp)
    par = np.asarray(parent)
    sums = np.bincount(par[1:], weights=bp[1:], minlength=par.size)
    bp[1:] /= sums[par[1:]]
    tree = OutcomeTree(parent, bp, leaf_cap=leaf_cap)
    return AdaptedProcess(tree, vals)


def gen_transform(base: AdaptedProcess, multipliers, bound: float = 1.0) -> AdaptedProcess:
    """Martingale transform ``dY_j = m_j dX_j`` with predictable ``m``.

    ``multipliers[v]`` scales the increment on the edge into node ``v``;
    predictability requires siblings to share the same multiplier. The root
    entry is ignored.
    """
    t = base.tree
    m = np.asarray(multipliers, dtype=float)
    if m.shape != (t.n_nodes,):
        raise TreeError(f"expected one multiplier per node ({t.n_nodes}), got shape {m.shape}")
    if np.any(np.abs(m[1:]) > bound):
        raise TreeError(f"multipliers exceed the bound {bound}")
    first = np.full(t.n_nodes, -1)
    for i in range(t.n_nodes - 1, 0, -1):
        first[t.parent[i]] = i
    if np.any(m[1:] != m[first[t.parent[1:]]]):
        raise TreeError("multipliers are not predictable: siblings carry different factors")
    inc = base.increments * m
    vals = np.zeros(t.n_nodes)
    vals[0] = base.values[0]
    for i in range(1, t.n_nodes):
        vals[i] = vals[t.parent[i]] + inc[i]
    return AdaptedProcess(t, vals)


def sign_transform_multipliers(base: AdaptedProcess, mode: str = "revert") -> np.ndarray:
    """Predictable +/-1 multipliers from the sign of the parent value.

    ``"revert"`` pushes the path back towards 0, ``"momentum"`` away from it.
    A zero parent value uses +1.
    """
    t = base.tree
    s = np.where(base.values >= 0, 1.0, -1.0)[t.parent]
    if mode == "revert":
        s = -s
    elif mode != "momentum":
        raise ValueError(f"mode must be 'revert' or 'momentum', got {mode!r}")
    s[0] = 1.0
    return s


# serialization boundary: nested {branch_prob, value, children} records

def to_nested(proc: AdaptedProcess, fmt=lambda x: format(x, ".17g")) -> dict[str, Any]:
    t = proc.tree
    kids: list[list[int]] = [[] for _ in range(t.n_nodes)]
    for i in range(1, t.n_nodes):
        kids[t.parent[i]].append(i)

    def rec(v):
        return {"branch_prob": fmt(float(t.branch_prob[v])),
                "value": fmt(float(proc.values[v])),
                "children": [rec(c) for c in kids[v]]}

    return rec(0)


def from_nested(root: dict[str, Any], prob_tol: float = 1e-9,
                leaf_cap: int = DEFAULT_LEAF_CAP) -> AdaptedProcess:
    """Inverse of :func:`to_nested`; errors name the offending record path."""
    parent, bp, vals = [], [], []
    queue = [(root, -1, "tree")]
    head = 0
    while head < len(queue):
        rec, par, where = queue[head]
        head += 1
        if not isinstance(rec, dict):
            raise TreeError(f"{where}: expected an object")
        for key in ("branch_prob", "value", "children"):
            if key not in rec:
                raise TreeError(f"{where}: missing field {key!r}")
        try:
            prob = float(rec["branch_prob"])
            val = float(rec["value"])
        except (TypeError, ValueError) as exc:
            raise TreeError(f"{where}: not a decimal number ({exc})") from None
        if not (math.isfinite(prob) and math.isfinite(val)):
            raise TreeError(f"{where}: non-finite number")
        if not isinstance(rec["children"], list):
            raise TreeError(f"{where}: children must be a list")
        idx = len(parent)
        parent.append(par)
        bp.append(prob)
        vals.append(val)
        for k, child in enumerate(rec["children"]):
            queue.append((child, idx, f"{where}.children[{k}]"))
    try:
        tree = OutcomeTree(parent, bp, prob_tol=prob_tol, leaf_cap=leaf_cap)
    except TreeError as exc:
        raise TreeError(_locate(str(exc), queue)) from None
    return AdaptedProcess(tree, vals)


def _locate(msg: str, queue) -> str:
    # translate "node i" into the record path
    m = re.search(r"node (\d+)", msg)
    if m and int(m.group(1)) < len(queue):
        return f"{queue[int(m.group(1))][2]}: {msg}"
    return msg
