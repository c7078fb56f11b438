"""Gradient-boosted regression trees with second-order logistic boosting.

Split search is exact greedy: every feature, every boundary between
consecutive distinct sorted values (threshold = midpoint). Split gain

    gain = 1/2 * [ GL^2/(HL+lambda) + GR^2/(HR+lambda)
                   - (GL+GR)^2/(HL+HR+lambda) ] - gamma

with g = p - y and h = p(1-p) from the logistic loss. Splits with
non-positive gain are rejected. Ties break to the lowest feature index,
then the lowest threshold (the scan order guarantees this). Routing is
``x < threshold`` goes left.

Every node stores the value -G/(H+lambda) of its training cohort; leaves
use it as their weight and ``diagnose`` uses the parent-to-child value
deltas for path attribution.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from optwin.errors import BalanceError, PreconditionError
from optwin.telemetry.catalog import CATALOG


@dataclass
class TreeNode:
    weight: float  # cohort value -G/(H+lambda); the leaf output when terminal
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self):
        return self.feature < 0


@dataclass(frozen=True)
class GbtParams:
    n_trees: int = 50
    max_depth: int = 4
    learning_rate: float = 0.3
    reg_lambda: float = 1.0
    gamma: float = 0.0
    base_score: float = 0.0  # raw log-odds space


@dataclass
class BoostedEnsemble:
    trees: List[TreeNode]
    params: GbtParams
    n_features: int
    train_loss: List[float] = field(default_factory=list)

    def predict_raw(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        raw = np.full(x.shape[0], self.params.base_score)
        for tree in self.trees:
            raw += self.params.learning_rate * _tree_predict(tree, x)
        return raw

    def predict_proba(self, x):
        return 1.0 / (1.0 + np.exp(-self.predict_raw(x)))


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _logloss(raw, y):
    z = raw
    return float(np.mean(np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))))


def _best_split(x, g, h, reg_lambda, gamma):
    """(gain, feature, threshold) maximizing the stated gain, or None."""
    g_sum, h_sum = g.sum(), h.sum()
    parent = g_sum * g_sum / (h_sum + reg_lambda)
    best = None
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        xv = x[order, f]
        gl = np.cumsum(g[order])
        hl = np.cumsum(h[order])
        boundary = np.flatnonzero(xv[:-1] < xv[1:])
        if boundary.size == 0:
            continue
        thresholds = 0.5 * (xv[boundary] + xv[boundary + 1])
        # guard against midpoint rounding onto a sample value
        ok = (thresholds > xv[boundary]) & (thresholds <= xv[boundary + 1])
        boundary, thresholds = boundary[ok], thresholds[ok]
        if boundary.size == 0:
            continue
        g_left, h_left = gl[boundary], hl[boundary]
        g_right, h_right = g_sum - g_left, h_sum - h_left
        gains = (
            0.5
            * (
                g_left**2 / (h_left + reg_lambda)
                + g_right**2 / (h_right + reg_lambda)
                - parent
            )
            - gamma
        )
        k = int(np.argmax(gains))  # first max = lowest threshold on ties
        if best is None or gains[k] > best[0]:
            best = (float(gains[k]), f, float(thresholds[k]))
    if best is None or best[0] <= 0.0:
        return None
    return best


def _build_tree(x, g, h, depth, params):
    value = float(-g.sum() / (h.sum() + params.reg_lambda))
    node = TreeNode(weight=value)
    if depth >= params.max_depth or x.shape[0] < 2:
        return node
    split = _best_split(x, g, h, params.reg_lambda, params.gamma)
    if split is None:
        return node
    _, f, thr = split
    mask = x[:, f] < thr
    node.feature = f
    node.threshold = thr
    node.left = _build_tree(x[mask], g[mask], h[mask], depth + 1, params)
    node.right = _build_tree(x[~mask], g[~mask], h[~mask], depth + 1, params)
    return node


def _tree_predict(node, x):
    out = np.empty(x.shape[0])
    idx = np.arange(x.shape[0])
    stack = [(node, idx)]
    while stack:
        nd, rows = stack.pop()
        if nd.is_leaf:
            out[rows] = nd.weight
            continue
        mask = x[rows, nd.feature] < nd.threshold
        stack.append((nd.left, rows[mask]))
        stack.append((nd.right, rows[~mask]))
    return out


def train_gbt(features, labels, params=GbtParams(), seed=0):
    """Boost regression trees on the logistic loss.

    The exact greedy search has no stochastic component; ``seed`` is part
    of the training interface but unused here.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if x.ndim != 2 or x.shape[0] != y.size:
        raise PreconditionError("features must be (n, d) with one label per row")
    if x.shape[0] < 2:
        raise PreconditionError("need at least 2 samples")
    if y.min() == y.max():
        raise BalanceError("both classes must be present")
    ensemble = BoostedEnsemble([], params, x.shape[1])
    if np.all(x == x[0]):
        # no split can ever separate identical rows; keep base score only
        ensemble.train_loss = [_logloss(np.full(y.size, params.base_score), y)]
        return ensemble
    raw = np.full(y.size, params.base_score)
    ensemble.train_loss.append(_logloss(raw, y))
    for _ in range(params.n_trees):
        p = _sigmoid(raw)
        g = p - y
        h = p * (1.0 - p)
        tree = _build_tree(x, g, h, 0, params)
        ensemble.trees.append(tree)
        raw = raw + params.learning_rate * _tree_predict(tree, x)
        ensemble.train_loss.append(_logloss(raw, y))
    return ensemble


@dataclass
class FeatureImportance:
    counts: np.ndarray  # split count per feature
    order: List[int]  # feature indices, descending count, ties by index

    def ranked_names(self, catalog=CATALOG):
        return [catalog[i].name for i in self.order]


def importance(ensemble):
    """Split-count feature scoring: more splits, stronger fault linkage."""
    counts = np.zeros(ensemble.n_features, dtype=int)
    stack = list(ensemble.trees)
    while stack:
        node = stack.pop()
        if node.is_leaf:
            continue
        counts[node.feature] += 1
        stack.extend((node.left, node.right))
    order = sorted(range(ensemble.n_features), key=lambda f: (-counts[f], f))
    return FeatureImportance(counts, order)


@dataclass
class DiagnosisReport:
    contributions: np.ndarray  # per-feature signed raw-score contribution
    baseline: float  # base score plus learning-rate-weighted root values
    raw: float
    probability: float
    ranking: List[int]  # feature indices by |contribution| descending

    def ranked_causes(self, catalog=CATALOG, top=5):
        return [
            (catalog[i].name, float(self.contributions[i]))
            for i in self.ranking[:top]
        ]


def diagnose(ensemble, features):
    """Path attribution: walking each tree, the value delta from a node to
    the chosen child is attributed to the node's split feature. The deltas
    plus the baseline telescope exactly to the ensemble's raw prediction.
    """
    x = np.asarray(features, dtype=np.float64).reshape(-1)
    contrib = np.zeros(ensemble.n_features)
    baseline = ensemble.params.base_score
    lr = ensemble.params.learning_rate
    for tree in ensemble.trees:
        baseline += lr * tree.weight
        node = tree
        while not node.is_leaf:
            child = node.left if x[node.feature] < node.threshold else node.right
            contrib[node.feature] += lr * (child.weight - node.weight)
            node = child
    raw = baseline + float(contrib.sum())
    ranking = sorted(
        range(ensemble.n_features), key=lambda f: (-abs(contrib[f]), f)
    )
    return DiagnosisReport(
        contributions=contrib,
        baseline=float(baseline),
        raw=raw,
        probability=float(_sigmoid(np.array([raw]))[0]),
        ranking=ranking,
    )
