"""From-scratch classical learners behind one train/predict interface.

Classifier kinds: knn, naive_bayes, decision_tree, random_forest, gbt,
softmax, svm_linear, svm_rbf.  Regressor kinds: the same minus naive_bayes,
with softmax standing for ridge least squares and the SVM kinds for
epsilon-insensitive regression.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateData, FeatureMismatch, InvalidHyperparam
from . import ensemble, instance, kernel, linear, tree
from .spec import (FORMAT_VERSION, KINDS, TASKS, ModelSpec, Standardizer,
                   TrainedModel, model_from_json, model_to_json)

__all__ = [
    "ModelSpec", "TrainedModel", "Standardizer", "KINDS", "TASKS",
    "FORMAT_VERSION", "train", "predict", "predict_scores", "train_ensemble",
    "model_to_json", "model_from_json",
]


def _as_matrix(X) -> tuple[np.ndarray, list[str] | None]:
    names = None
    if hasattr(X, "values") and hasattr(X, "names"):  # FeatureMatrix
        names = list(X.names)
        X = X.values
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    return X, names


def train(spec: ModelSpec, X, y) -> TrainedModel:
    """Fit a model; features are standardized with training statistics that
    are stored in the model."""
    X, names = _as_matrix(X)
    y = np.asarray(y)
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 training rows")
    if not np.isfinite(X).all():
        raise ValueError("X contains non-finite values")
    if names is None:
        names = [f"x{i}" for i in range(X.shape[1])]

    std = Standardizer.fit(X)
    Xs = std.transform(X)
    hp = spec.hyperparams
    rng = np.random.default_rng(spec.seed)

    if spec.task == "classify":
        classes = sorted(set(y.tolist()))
        if len(classes) < 2:
            raise DegenerateData("training labels contain a single class")
        index = {c: i for i, c in enumerate(classes)}
        y_enc = np.asarray([index[v] for v in y.tolist()], dtype=np.int64)
        state = _fit_classifier(spec, Xs, y_enc, len(classes), hp, rng)
        return TrainedModel(spec, names, std, state, classes=classes)

    y = y.astype(np.float64)
    if not np.isfinite(y).all():
        raise ValueError("y contains non-finite values")
    if np.ptp(y) == 0.0:
        raise DegenerateData("regression target has zero variance")
    state = _fit_regressor(spec, Xs, y, hp, rng)
    return TrainedModel(spec, names, std, state, classes=None)


def _fit_classifier(spec, Xs, y_enc, K, hp, rng):
    kind = spec.kind
    if kind == "knn":
        if hp["k"] > Xs.shape[0]:
            raise InvalidHyperparam(f"k={hp['k']} exceeds training size {Xs.shape[0]}")
        return instance.fit_knn(Xs, y_enc, hp["k"], "classify")
    if kind == "naive_bayes":
        return instance.fit_gaussian_nb(Xs, y_enc, K, hp["var_smoothing"])
    if kind == "decision_tree":
        return {"tree": tree.fit_tree(Xs, y_enc, "classify", n_classes=K,
                                      max_depth=hp["depth"],
                                      min_samples_split=hp["min_samples_split"])}
    if kind == "random_forest":
        return ensemble.fit_forest(Xs, y_enc, "classify", K, hp["n_trees"],
                                   hp["depth"], hp["min_samples_split"],
                                   hp["bootstrap"], hp["max_features"], spec.seed)
    if kind == "gbt":
        return ensemble.fit_gbt_classifier(Xs, y_enc, K, hp["n_trees"],
                                           hp["depth"], hp["learning_rate"],
                                           hp["min_samples_split"])
    if kind == "softmax":
        return linear.fit_softmax(Xs, y_enc, K, hp["epochs"],
                                  hp["learning_rate"], hp["lambda_"],
                                  hp["mode"], rng)
    if kind == "svm_linear":
        return linear.fit_svm_linear(Xs, y_enc, K, hp["epochs"], hp["lambda_"], rng)
    if kind == "svm_rbf":
        return kernel.fit_svm_rbf(Xs, y_enc, K, hp["epochs"], hp["lambda_"],
                                  hp["gamma"], rng)
    raise InvalidHyperparam(f"unknown kind {kind!r}")


def _fit_regressor(spec, Xs, y, hp, rng):
    kind = spec.kind
    if kind == "knn":
        if hp["k"] > Xs.shape[0]:
            raise InvalidHyperparam(f"k={hp['k']} exceeds training size {Xs.shape[0]}")
        return instance.fit_knn(Xs, y, hp["k"], "regress")
    if kind == "decision_tree":
        return {"tree": tree.fit_tree(Xs, y, "regress", max_depth=hp["depth"],
                                      min_samples_split=hp["min_samples_split"])}
    if kind == "random_forest":
        return ensemble.fit_forest(Xs, y, "regress", 0, hp["n_trees"],
                                   hp["depth"], hp["min_samples_split"],
                                   hp["bootstrap"], hp["max_features"], spec.seed)
    if kind == "gbt":
        return ensemble.fit_gbt_regressor(Xs, y, hp["n_trees"], hp["depth"],
                                          hp["learning_rate"], hp["min_samples_split"])
    if kind == "softmax":  # ridge least squares
        return linear.fit_ridge(Xs, y, hp["lambda_"])
    if kind == "svm_linear":
        return linear.fit_svr_linear(Xs, y, hp["epochs"], hp["lambda_"],
                                     hp["epsilon"], rng)
    if kind == "svm_rbf":
        return kernel.fit_svr_rbf(Xs, y, hp["epochs"], hp["lambda_"],
                                  hp["gamma"], hp["epsilon"], rng)
    raise InvalidHyperparam(f"unknown kind {kind!r}")


def predict_scores(m: TrainedModel, X) -> np.ndarray:
    """Per-class score matrix (n x K): probabilities for softmax/NB/GBT,
    margins for SVMs, vote or leaf fractions for kNN/trees/forests."""
    if m.spec.task != "classify":
        raise ValueError("scores are only defined for classifiers")
    X, names = _as_matrix(X)
    m.check_features(names, X.shape[1])
    Xs = m.standardizer.transform(X)
    K = len(m.classes)
    kind = m.spec.kind
    if kind == "knn":
        return instance.knn_scores(m.state, Xs, K)
    if kind == "naive_bayes":
        return instance.gaussian_nb_scores(m.state, Xs)
    if kind == "decision_tree":
        return tree.tree_apply(m.state["tree"], Xs)
    if kind == "random_forest":
        return ensemble.forest_scores(m.state, Xs)
    if kind == "gbt":
        return ensemble.gbt_scores(m.state, Xs)
    if kind == "softmax":
        return linear.softmax_scores(m.state, Xs)
    if kind == "svm_linear":
        return linear.svm_linear_scores(m.state, Xs)
    if kind == "svm_rbf":
        return kernel.svm_rbf_scores(m.state, Xs)
    raise InvalidHyperparam(f"unknown kind {kind!r}")


def predict(m: TrainedModel, X) -> np.ndarray:
    """Predicted labels (classify) or reals (regress).  Score ties break
    toward the lowest class ordinal."""
    if m.spec.task == "classify":
        scores = predict_scores(m, X)
        idx = np.argmax(scores, axis=1)  # first max = lowest ordinal
        return np.asarray(m.classes, dtype=object)[idx]

    X, names = _as_matrix(X)
    m.check_features(names, X.shape[1])
    Xs = m.standardizer.transform(X)
    kind = m.spec.kind
    if kind == "knn":
        return instance.knn_values(m.state, Xs)
    if kind == "decision_tree":
        return tree.tree_apply(m.state["tree"], Xs)[:, 0]
    if kind == "random_forest":
        return ensemble.forest_values(m.state, Xs)
    if kind == "gbt":
        return ensemble.gbt_values(m.state, Xs)
    if kind == "softmax":
        return linear.ridge_values(m.state, Xs)
    if kind == "svm_linear":
        return linear.svr_linear_values(m.state, Xs)
    if kind == "svm_rbf":
        return kernel.svr_rbf_values(m.state, Xs)
    raise InvalidHyperparam(f"unknown kind {kind!r}")


def train_ensemble(specs: list[ModelSpec], X, y, k: int, seed: int) -> np.ndarray:
    """Out-of-fold prediction matrix (n x len(specs)).

    Entry (i, j) is spec j's prediction for row i, produced by the fold
    model whose test set contains i; no model predicts rows it trained on.
    Falls back to plain folds when stratification is impossible (e.g.
    leave-one-out with k = n).
    """
    from ..corpus import plain_fold_indices, stratified_fold_indices
    from ..errors import TooFewInstances

    X, _ = _as_matrix(X)
    y = np.asarray(y)
    labels = [str(v) for v in y.tolist()]
    try:
        folds = stratified_fold_indices(labels, k, seed)
    except TooFewInstances:
        folds = plain_fold_indices(len(labels), k, seed)

    out = np.empty((X.shape[0], len(specs)), dtype=object)
    for fold_no, (train_idx, test_idx) in enumerate(folds):
        for j, spec in enumerate(specs):
            fold_seed = (seed * 100003 + fold_no * 101 + j) % (2**31 - 1)
            fold_spec = ModelSpec(spec.kind, spec.task,
                                  dict(spec.hyperparams), seed=fold_seed)
            m = train(fold_spec, X[train_idx], y[train_idx])
            out[test_idx, j] = predict(m, X[test_idx])
    return out
