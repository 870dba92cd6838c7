"""Instance-based learners: k-nearest-neighbours and Gaussian naive Bayes."""

from __future__ import annotations

import numpy as np


def fit_knn(X: np.ndarray, y: np.ndarray, k: int, task: str) -> dict:
    return {"X": X, "y": y.astype(np.int64 if task == "classify" else np.float64),
            "k": k}


def _neighbor_indices(state: dict, X: np.ndarray) -> np.ndarray:
    train = state["X"]
    sq = (np.sum(X * X, axis=1)[:, None]
          + np.sum(train * train, axis=1)[None, :]
          - 2.0 * (X @ train.T))
    np.maximum(sq, 0.0, out=sq)
    # stable sort: distance ties resolve to the lowest training index
    order = np.argsort(sq, axis=1, kind="stable")
    return order[:, : state["k"]]


def knn_scores(state: dict, X: np.ndarray, n_classes: int) -> np.ndarray:
    nn = _neighbor_indices(state, X)
    votes = state["y"][nn]
    scores = np.zeros((X.shape[0], n_classes))
    for c in range(n_classes):
        scores[:, c] = (votes == c).mean(axis=1)
    return scores


def knn_values(state: dict, X: np.ndarray) -> np.ndarray:
    nn = _neighbor_indices(state, X)
    return state["y"][nn].mean(axis=1)


def fit_gaussian_nb(X: np.ndarray, y: np.ndarray, n_classes: int,
                    var_smoothing: float) -> dict:
    n, d = X.shape
    means = np.zeros((n_classes, d))
    variances = np.zeros((n_classes, d))
    priors = np.zeros(n_classes)
    for c in range(n_classes):
        rows = X[y == c]
        priors[c] = rows.shape[0] / n
        means[c] = rows.mean(axis=0)
        variances[c] = rows.var(axis=0)
    variances += var_smoothing * float(X.var(axis=0).max() or 1.0)
    return {"means": means, "variances": variances, "priors": priors}


def gaussian_nb_scores(state: dict, X: np.ndarray) -> np.ndarray:
    means, variances, priors = state["means"], state["variances"], state["priors"]
    n_classes = means.shape[0]
    log_joint = np.zeros((X.shape[0], n_classes))
    for c in range(n_classes):
        diff = X - means[c]
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * variances[c])) \
             - 0.5 * np.sum(diff * diff / variances[c], axis=1)
        log_joint[:, c] = np.log(priors[c]) + ll
    # normalize to probabilities
    log_joint -= log_joint.max(axis=1, keepdims=True)
    p = np.exp(log_joint)
    return p / p.sum(axis=1, keepdims=True)
