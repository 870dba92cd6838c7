"""Model configuration, fitted-model container, and JSON serialization.

The ``kind`` enumeration names a model family; the ``task`` picks its
classification or regression variant.  The linear-model kind ``softmax``
denotes multinomial logistic regression when classifying and ridge
least-squares when regressing; ``svm_linear``/``svm_rbf`` regress with the
epsilon-insensitive loss.  ``naive_bayes`` has no regression variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import FeatureMismatch, InvalidHyperparam

KINDS = ("knn", "naive_bayes", "decision_tree", "random_forest",
         "gbt", "softmax", "svm_linear", "svm_rbf")
TASKS = ("classify", "regress")

FORMAT_VERSION = 1

_DEFAULTS: dict[str, dict] = {
    "knn": {"k": 5},
    "naive_bayes": {"var_smoothing": 1e-9},
    "decision_tree": {"depth": None, "min_samples_split": 2},
    "random_forest": {"n_trees": 50, "depth": None, "min_samples_split": 2,
                      "bootstrap": True, "max_features": "sqrt"},
    "gbt": {"n_trees": 50, "depth": 3, "learning_rate": 0.1,
            "min_samples_split": 2},
    "softmax": {"epochs": 200, "learning_rate": 0.5, "lambda_": 1e-4,
                "mode": "sgd"},
    "svm_linear": {"epochs": 100, "lambda_": 1e-3, "epsilon": 0.1},
    "svm_rbf": {"epochs": 100, "lambda_": 1e-3, "gamma": None, "epsilon": 0.1},
}


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InvalidHyperparam(message)


@dataclass(frozen=True)
class ModelSpec:
    """Declarative learner configuration: kind, task, resolved hyperparams."""

    kind: str
    task: str = "classify"
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        _require(self.kind in KINDS, f"unknown model kind {self.kind!r}")
        _require(self.task in TASKS, f"unknown task {self.task!r}")
        _require(not (self.kind == "naive_bayes" and self.task == "regress"),
                 "naive_bayes has no regression variant")
        merged = dict(_DEFAULTS[self.kind])
        unknown = set(self.hyperparams) - set(merged)
        _require(not unknown, f"unknown hyperparams for {self.kind}: {sorted(unknown)}")
        merged.update(self.hyperparams)
        object.__setattr__(self, "hyperparams", merged)
        self._validate(merged)

    def _validate(self, hp: dict) -> None:
        if "k" in hp:
            _require(isinstance(hp["k"], int) and hp["k"] >= 1, "k must be an integer >= 1")
        if "depth" in hp:
            _require(hp["depth"] is None or (isinstance(hp["depth"], int) and hp["depth"] >= 1),
                     "depth must be None or an integer >= 1")
        if "n_trees" in hp:
            _require(isinstance(hp["n_trees"], int) and hp["n_trees"] >= 1,
                     "n_trees must be an integer >= 1")
        if "min_samples_split" in hp:
            _require(hp["min_samples_split"] >= 2, "min_samples_split must be >= 2")
        if "learning_rate" in hp:
            _require(hp["learning_rate"] > 0, "learning rate must be > 0")
        if "epochs" in hp:
            _require(isinstance(hp["epochs"], int) and hp["epochs"] >= 1,
                     "epochs must be an integer >= 1")
        if "lambda_" in hp:
            # the SVM step size is 1/(lambda*t), so zero is only valid for softmax
            if self.kind == "softmax":
                _require(hp["lambda_"] >= 0, "lambda_ must be >= 0")
            else:
                _require(hp["lambda_"] > 0, "lambda_ must be > 0")
        if "gamma" in hp and hp["gamma"] is not None:
            _require(hp["gamma"] > 0, "gamma must be > 0")
        if "epsilon" in hp:
            _require(hp["epsilon"] >= 0, "epsilon must be >= 0")
        if "var_smoothing" in hp:
            _require(hp["var_smoothing"] > 0, "var_smoothing must be > 0")
        if "mode" in hp:
            _require(hp["mode"] in ("sgd", "batch"), "mode must be 'sgd' or 'batch'")
        if "max_features" in hp:
            mf = hp["max_features"]
            _require(mf is None or mf == "sqrt" or (isinstance(mf, int) and mf >= 1),
                     "max_features must be None, 'sqrt' or an integer >= 1")

    def hp(self, name: str):
        return self.hyperparams[name]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "task": self.task,
                "hyperparams": dict(self.hyperparams), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(kind=d["kind"], task=d["task"],
                   hyperparams=dict(d.get("hyperparams", {})), seed=d.get("seed", 0))


@dataclass
class Standardizer:
    """Per-feature zero-mean/unit-variance transform fitted on training data."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        # a column of identical values can still show std ~1e-16 from
        # summation roundoff; dividing by that would amplify pure noise,
        # so constancy is detected exactly and such columns map to zero
        constant = np.ptp(X, axis=0) == 0.0
        mean = np.where(constant, X[0], mean)
        scale = np.where(constant | (scale == 0.0), 1.0, scale)
        return cls(mean=mean, scale=scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale


@dataclass
class TrainedModel:
    """A fitted model: spec, feature bookkeeping, standardization and state.

    Prediction is a pure function of (state, input); the JSON form
    round-trips the state exactly (shortest-repr floats).
    """

    spec: ModelSpec
    feature_names: list[str]
    standardizer: Standardizer
    state: dict
    classes: list | None = None  # label values, sorted; None for regressors

    def check_features(self, names: list[str] | None, n_cols: int) -> None:
        if n_cols != len(self.feature_names):
            raise FeatureMismatch(
                f"expected {len(self.feature_names)} feature columns, got {n_cols}")
        if names is not None and list(names) != list(self.feature_names):
            raise FeatureMismatch("feature column names/order differ from training")


# --- JSON state encoding -----------------------------------------------------
# numpy arrays are tagged so decoding restores the exact dtype; plain floats
# round-trip exactly through repr.

def _encode(obj):
    if isinstance(obj, np.ndarray):
        return {"__nd__": str(obj.dtype), "v": obj.tolist()}
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if "__nd__" in obj:
            return np.asarray(obj["v"], dtype=np.dtype(obj["__nd__"]))
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def model_to_json(m: TrainedModel) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "spec": m.spec.to_dict(),
        "feature_names": list(m.feature_names),
        "standardization": {"mean": _encode(m.standardizer.mean),
                            "scale": _encode(m.standardizer.scale)},
        "classes": m.classes,
        "state": _encode(m.state),
    }
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str) -> TrainedModel:
    doc = json.loads(text)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    std = Standardizer(mean=_decode(doc["standardization"]["mean"]),
                       scale=_decode(doc["standardization"]["scale"]))
    return TrainedModel(
        spec=ModelSpec.from_dict(doc["spec"]),
        feature_names=list(doc["feature_names"]),
        standardizer=std,
        state=_decode(doc["state"]),
        classes=doc.get("classes"),
    )
