"""Tree ensembles: random forests and gradient-boosted trees.

Each forest tree derives its own generator from the master seed, so
tree-level parallelism would not change results.  Boosted classification
uses softmax boosting: one regression tree per class per round fitted to
the probability residuals, with Newton leaf values.
"""

from __future__ import annotations

import numpy as np

from .tree import fit_tree, tree_apply


def _resolve_max_features(max_features, d: int, task: str) -> int | None:
    if max_features is None:
        return None
    if max_features == "sqrt":
        return max(1, int(np.sqrt(d)))
    return min(int(max_features), d)


def fit_forest(X: np.ndarray, y: np.ndarray, task: str, n_classes: int,
               n_trees: int, max_depth: int | None, min_samples_split: int,
               bootstrap: bool, max_features, seed: int) -> dict:
    n, d = X.shape
    mf = _resolve_max_features(max_features, d, task)
    trees = []
    for b in range(n_trees):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(b,)))
        idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        tree = fit_tree(X[idx], y[idx], task, n_classes=n_classes,
                        max_depth=max_depth, min_samples_split=min_samples_split,
                        max_features=mf, rng=rng)
        trees.append(tree)
    return {"trees": trees}


def forest_scores(state: dict, X: np.ndarray) -> np.ndarray:
    acc = None
    for tree in state["trees"]:
        leaf = tree_apply(tree, X)
        acc = leaf if acc is None else acc + leaf
    return acc / len(state["trees"])


def forest_values(state: dict, X: np.ndarray) -> np.ndarray:
    return forest_scores(state, X)[:, 0]


def fit_gbt_regressor(X: np.ndarray, y: np.ndarray, n_rounds: int,
                      depth: int | None, lr: float,
                      min_samples_split: int) -> dict:
    base = float(y.mean())
    F = np.full(X.shape[0], base)
    trees = []
    for _ in range(n_rounds):
        resid = y - F
        tree = fit_tree(X, resid, "regress", max_depth=depth,
                        min_samples_split=min_samples_split)
        F += lr * tree_apply(tree, X)[:, 0]
        trees.append(tree)
    return {"base": base, "lr": lr, "trees": trees}


def gbt_values(state: dict, X: np.ndarray) -> np.ndarray:
    F = np.full(X.shape[0], state["base"])
    for tree in state["trees"]:
        F += state["lr"] * tree_apply(tree, X)[:, 0]
    return F


def _softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    e = np.exp(Z)
    return e / e.sum(axis=1, keepdims=True)


def fit_gbt_classifier(X: np.ndarray, y: np.ndarray, n_classes: int,
                       n_rounds: int, depth: int | None, lr: float,
                       min_samples_split: int) -> dict:
    n = X.shape[0]
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    F = np.zeros((n, n_classes))
    rounds = []
    factor = (n_classes - 1.0) / n_classes
    for _ in range(n_rounds):
        P = _softmax(F)
        per_class = []
        for c in range(n_classes):
            resid = Y[:, c] - P[:, c]
            tree = fit_tree(X, resid, "regress", max_depth=depth,
                            min_samples_split=min_samples_split)
            # Newton step per leaf: sum(resid) / sum(|resid|(1-|resid|))
            leaf_id = _leaf_index(tree, X)
            n_leaves = tree["value"].shape[0]
            num = np.bincount(leaf_id, weights=resid, minlength=n_leaves)
            hess = np.abs(resid) * (1.0 - np.abs(resid))
            den = np.bincount(leaf_id, weights=hess, minlength=n_leaves)
            gamma = factor * num / np.maximum(den, 1e-12)
            tree = dict(tree)
            tree["value"] = gamma[:, None]
            F[:, c] += lr * tree_apply(tree, X)[:, 0]
            per_class.append(tree)
        rounds.append(per_class)
    return {"lr": lr, "n_classes": n_classes, "rounds": rounds}


def _leaf_index(tree: dict, X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    feature, threshold = tree["feature"], tree["threshold"]
    left, right = tree["left"], tree["right"]
    active = feature[node] >= 0
    while active.any():
        rows = np.nonzero(active)[0]
        cur = node[rows]
        go_left = X[rows, feature[cur]] <= threshold[cur]
        node[rows] = np.where(go_left, left[cur], right[cur])
        active = feature[node] >= 0
    return node


def gbt_scores(state: dict, X: np.ndarray) -> np.ndarray:
    F = np.zeros((X.shape[0], state["n_classes"]))
    for per_class in state["rounds"]:
        for c, tree in enumerate(per_class):
            F[:, c] += state["lr"] * tree_apply(tree, X)[:, 0]
    return _softmax(F)
