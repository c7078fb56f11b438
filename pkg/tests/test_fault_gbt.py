"""Boosted-tree training against an exhaustive split oracle."""

import numpy as np
import numpy.testing as npt
import pytest

from optwin.errors import BalanceError
from optwin.fault import (
    BoostedEnsemble,
    GbtParams,
    TreeNode,
    diagnose,
    importance,
    train_gbt,
)
from optwin.fault.gbt import _sigmoid, _tree_predict
from optwin.telemetry import CATALOG, DriftSpec, DegradationScenario
from optwin.fault.pipeline import diagnosis_dataset


def oracle_best_split(x, g, h, reg_lambda, gamma):
    """Brute-force maximizer of the split gain over every feature and
    every midpoint between consecutive distinct values. Independent of
    the training code path: per-candidate mask sums, no prefix scans."""
    g_sum, h_sum = g.sum(), h.sum()
    parent = g_sum**2 / (h_sum + reg_lambda)
    best = None
    for f in range(x.shape[1]):
        vals = np.unique(x[:, f])
        for lo, hi in zip(vals[:-1], vals[1:]):
            thr = 0.5 * (lo + hi)
            if not (thr > lo and thr <= hi):
                continue
            mask = x[:, f] < thr
            gl, hl = g[mask].sum(), h[mask].sum()
            gr, hr = g_sum - gl, h_sum - hl
            gain = (
                0.5 * (gl**2 / (hl + reg_lambda) + gr**2 / (hr + reg_lambda) - parent)
                - gamma
            )
            if best is None or gain > best[0]:
                best = (gain, f, thr)
    if best is None or best[0] <= 0.0:
        return None
    return best


def check_tree_against_oracle(node, x, g, h, depth, params):
    value = -g.sum() / (h.sum() + params.reg_lambda)
    assert node.weight == pytest.approx(value, rel=1e-9, abs=1e-12)
    split = (
        oracle_best_split(x, g, h, params.reg_lambda, params.gamma)
        if depth < params.max_depth and x.shape[0] >= 2
        else None
    )
    if split is None:
        assert node.is_leaf
        return
    assert not node.is_leaf, "oracle found a positive-gain split the tree missed"
    assert node.feature == split[1]
    assert node.threshold == split[2]
    mask = x[:, node.feature] < node.threshold
    check_tree_against_oracle(node.left, x[mask], g[mask], h[mask], depth + 1, params)
    check_tree_against_oracle(node.right, x[~mask], g[~mask], h[~mask], depth + 1, params)


class TestTraining:
    def test_separable_single_feature_threshold(self):
        x = np.array([[0.1], [0.2], [0.3], [1.1], [1.2], [1.3]])
        y = np.array([0, 0, 0, 1, 1, 1])
        params = GbtParams(n_trees=1, max_depth=1)
        ens = train_gbt(x, y, params)
        root = ens.trees[0]
        assert root.feature == 0
        assert 0.3 < root.threshold < 1.1

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_splits_match_exhaustive_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = 60
        x = rng.normal(size=(n, 3))
        y = (x[:, 0] + 0.5 * x[:, 1] ** 2 + 0.3 * rng.normal(size=n) > 0).astype(int)
        params = GbtParams(n_trees=8, max_depth=3)
        ens = train_gbt(x, y, params)
        raw = np.full(n, params.base_score)
        for tree in ens.trees:
            p = _sigmoid(raw)
            g = p - y
            h = p * (1.0 - p)
            check_tree_against_oracle(tree, x, g, h, 0, params)
            raw = raw + params.learning_rate * _tree_predict(tree, x)

    def test_large_lambda_shrinks_leaves_to_zero(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(40, 2))
        y = (x[:, 0] > 0).astype(int)
        ens = train_gbt(x, y, GbtParams(n_trees=3, reg_lambda=1e12))
        for tree in ens.trees:
            stack = [tree]
            while stack:
                nd = stack.pop()
                if nd.is_leaf:
                    assert abs(nd.weight) < 1e-9
                else:
                    stack.extend((nd.left, nd.right))

    def test_identical_rows_base_score_only(self):
        x = np.tile([1.0, 2.0, 3.0], (10, 1))
        y = np.array([0, 1] * 5)
        ens = train_gbt(x, y, GbtParams(base_score=0.0))
        assert ens.trees == []
        npt.assert_allclose(ens.predict_raw(x), 0.0)

    def test_training_loss_monotone_non_increasing(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(120, 4))
        y = (x[:, 0] - x[:, 2] > 0).astype(int)
        ens = train_gbt(x, y, GbtParams(n_trees=30))
        losses = np.array(ens.train_loss)
        assert np.all(np.diff(losses) <= 1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(BalanceError):
            train_gbt(np.zeros((4, 2)), np.zeros(4))


class TestImportance:
    def test_empty_ensemble_all_zero(self):
        ens = BoostedEnsemble([], GbtParams(), 15)
        imp = importance(ens)
        npt.assert_array_equal(imp.counts, np.zeros(15, dtype=int))

    def test_counts_sum_to_internal_nodes(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(80, 5))
        y = (x[:, 1] + x[:, 3] > 0).astype(int)
        ens = train_gbt(x, y, GbtParams(n_trees=10, max_depth=3))
        imp = importance(ens)
        internal = 0
        stack = list(ens.trees)
        while stack:
            nd = stack.pop()
            if not nd.is_leaf:
                internal += 1
                stack.extend((nd.left, nd.right))
        assert imp.counts.sum() == internal

    def test_fleet_drift_features_rank_top_two(self):
        sc = DegradationScenario(
            devices=8,
            days=8,
            samples_per_day=48,
            train_days=8,
            fault_onset_day={d: 4.0 + d * 0.3 for d in range(0, 8, 2)},
            drift={
                "laser bias current": DriftSpec("ramp", 10.0),
                "environment temperature": DriftSpec("ramp", 6.0),
            },
            missing_rate=0.0,
            label_horizon_steps=48,
            drift_lead_days=1.5,
            cross_margin_steps=24,
            seed=11,
        )
        x, y = diagnosis_dataset(sc, seed=1)
        ens = train_gbt(x, y, GbtParams(n_trees=30, max_depth=4))
        top2 = set(importance(ens).order[:2])
        assert top2 == {
            CATALOG.index("laser bias current"),
            CATALOG.index("environment temperature"),
        }


class TestDiagnose:
    def test_single_depth_one_tree_full_attribution(self):
        x = np.array([[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        y = np.array([0, 0, 1, 1])
        ens = train_gbt(x, y, GbtParams(n_trees=1, max_depth=1))
        rep = diagnose(ens, np.array([2.5, 5.0]))
        assert rep.contributions[1] == 0.0
        assert rep.contributions[0] != 0.0
        assert rep.ranking[0] == 0

    @pytest.mark.parametrize("seed", [0, 1])
    def test_attributions_telescope_to_raw_prediction(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(100, 6))
        y = (x[:, 0] * x[:, 1] > 0).astype(int)
        ens = train_gbt(x, y, GbtParams(n_trees=20, max_depth=4))
        for row in x[:10]:
            rep = diagnose(ens, row)
            direct = float(ens.predict_raw(row[None, :])[0])
            assert abs((rep.baseline + rep.contributions.sum()) - direct) < 1e-9

    def test_nominal_record_scores_low(self):
        sc = DegradationScenario(
            devices=6,
            days=6,
            samples_per_day=48,
            train_days=6,
            fault_onset_day={0: 3.0, 2: 4.0},
            drift={"laser bias current": DriftSpec("ramp", 10.0)},
            missing_rate=0.0,
            label_horizon_steps=48,
            drift_lead_days=1.5,
            cross_margin_steps=24,
            seed=2,
        )
        x, y = diagnosis_dataset(sc, seed=3)
        ens = train_gbt(x, y, GbtParams(n_trees=20, max_depth=3))
        rep = diagnose(ens, CATALOG.nominals())
        assert rep.probability < 0.35
