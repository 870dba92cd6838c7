"""Binary decision trees: Gini splits for classification, variance splits
for regression.

Trees are stored as flat parallel arrays (feature, threshold, children,
leaf values) so evaluation vectorizes and states serialize to JSON without
recursion.  Split ties break on the lowest feature index, then the lowest
threshold, which keeps training deterministic.
"""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


class _TreeBuilder:
    def __init__(self, task: str, n_classes: int, max_depth: int | None,
                 min_samples_split: int, max_features: int | None,
                 rng: np.random.Generator | None):
        self.task = task
        self.n_classes = n_classes
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.rng = rng
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[np.ndarray] = []

    def build(self, X: np.ndarray, y: np.ndarray) -> dict:
        self._grow(X, y, np.arange(X.shape[0]), depth=0)
        values = np.vstack(self.value)
        return {
            "feature": np.asarray(self.feature, dtype=np.int64),
            "threshold": np.asarray(self.threshold, dtype=np.float64),
            "left": np.asarray(self.left, dtype=np.int64),
            "right": np.asarray(self.right, dtype=np.int64),
            "value": values,
        }

    def _node_value(self, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
        if self.task == "classify":
            counts = np.bincount(y[idx], minlength=self.n_classes).astype(np.float64)
            return counts / counts.sum()
        return np.asarray([y[idx].mean()])

    def _grow(self, X, y, idx, depth) -> int:
        node = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(self._node_value(y, idx))

        if len(idx) < self.min_samples_split:
            return node
        if self.max_depth is not None and depth >= self.max_depth:
            return node
        if self.task == "classify" and len(np.unique(y[idx])) == 1:
            return node
        if self.task == "regress" and np.ptp(y[idx]) == 0.0:
            return node

        split = self._best_split(X, y, idx)
        if split is None:
            return node
        j, thr = split
        mask = X[idx, j] <= thr
        left_idx, right_idx = idx[mask], idx[~mask]
        self.feature[node] = j
        self.threshold[node] = thr
        self.left[node] = self._grow(X, y, left_idx, depth + 1)
        self.right[node] = self._grow(X, y, right_idx, depth + 1)
        return node

    def _candidate_features(self, d: int) -> np.ndarray:
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        chosen = self.rng.choice(d, size=self.max_features, replace=False)
        return np.sort(chosen)

    def _best_split(self, X, y, idx):
        best = None  # (score, feature, threshold); lower score is better
        m = len(idx)
        for j in self._candidate_features(X.shape[1]):
            x = X[idx, j]
            order = np.argsort(x, kind="stable")
            xs = x[order]
            cut = np.nonzero(xs[:-1] < xs[1:])[0]  # split after position i
            if cut.size == 0:
                continue
            if self.task == "classify":
                onehot = np.zeros((m, self.n_classes))
                onehot[np.arange(m), y[idx][order]] = 1.0
                left_counts = np.cumsum(onehot, axis=0)[cut]
                n_left = cut + 1.0
                n_right = m - n_left
                total = np.bincount(y[idx], minlength=self.n_classes).astype(np.float64)
                right_counts = total[None, :] - left_counts
                gini_l = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
                gini_r = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
                score = (n_left * gini_l + n_right * gini_r) / m
            else:
                ys = y[idx][order]
                csum = np.cumsum(ys)[cut]
                csq = np.cumsum(ys ** 2)[cut]
                tot_sum = ys.sum()
                tot_sq = (ys ** 2).sum()
                n_left = cut + 1.0
                n_right = m - n_left
                var_l = csq / n_left - (csum / n_left) ** 2
                var_r = (tot_sq - csq) / n_right - ((tot_sum - csum) / n_right) ** 2
                score = (n_left * var_l + n_right * var_r) / m
            pos = int(np.argmin(score))
            sc = float(score[pos])
            if best is None or sc < best[0] - _EPS:
                i = cut[pos]
                thr = (xs[i] + xs[i + 1]) / 2.0
                best = (sc, int(j), float(thr))
        if best is None:
            return None
        return best[1], best[2]


def fit_tree(X: np.ndarray, y: np.ndarray, task: str, n_classes: int = 0,
             max_depth: int | None = None, min_samples_split: int = 2,
             max_features: int | None = None,
             rng: np.random.Generator | None = None) -> dict:
    """Grow one tree; ``y`` holds class indices (classify) or reals (regress)."""
    builder = _TreeBuilder(task, n_classes, max_depth, min_samples_split,
                           max_features, rng)
    return builder.build(X, y)


def tree_apply(tree: dict, X: np.ndarray) -> np.ndarray:
    """Leaf value rows for each input row (class proportions or 1-d mean)."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    feature = tree["feature"]
    threshold = tree["threshold"]
    left, right = tree["left"], tree["right"]
    active = feature[node] >= 0
    while active.any():
        rows = np.nonzero(active)[0]
        cur = node[rows]
        go_left = X[rows, feature[cur]] <= threshold[cur]
        node[rows] = np.where(go_left, left[cur], right[cur])
        active = feature[node] >= 0
    return tree["value"][node]
