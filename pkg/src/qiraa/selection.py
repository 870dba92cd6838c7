"""Wrapper feature selection (recursive elimination) and group ablation.

RFE scores features per iteration either by aggregated |weight| (linear
models) or by single-feature permutation importance on a held-out fold
(everything else), then drops the lowest-scoring ``step`` features until
``target_count`` remain.  An embedding block always moves as one composite
feature.  Ablation reruns cross-validation with one feature group excluded
at a time, on identical fold partitions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import stratified_fold_indices
from .evaluation import classification_report, cross_validate
from .features import FEATURE_GROUPS, FeatureMatrix
from .models import ModelSpec, predict, train

LINEAR_KINDS = ("softmax", "svm_linear")


@dataclass
class FeatureUnit:
    """One selectable unit: a single column, or the whole embedding block."""

    name: str
    columns: list[int]


@dataclass
class RfeResult:
    ranking: list[str]
    elimination_trace: list[tuple[list[str], float]]

    def to_dict(self) -> dict:
        return {"ranking": self.ranking,
                "elimination_trace": [{"removed": r, "validation_f1": f}
                                      for r, f in self.elimination_trace]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass
class AblationResult:
    rows: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rows": self.rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"{'feature set':<24}{'P':>8}{'R':>8}{'F1':>8}"]
        for row in self.rows:
            lines.append(f"{row['label']:<24}{row['precision']:>8.3f}"
                         f"{row['recall']:>8.3f}{row['f1']:>8.3f}")
        return "\n".join(lines) + "\n"


def _units_of(X) -> tuple[np.ndarray, list[FeatureUnit]]:
    """Columns grouped into selectable units; embedding columns fuse into one."""
    if isinstance(X, FeatureMatrix):
        values = X.values
        units = [FeatureUnit(name, [i]) for i, name in enumerate(X.names[:34])]
        emb_cols = [i for i in range(34, values.shape[1])]
        if values.shape[1] > 34:
            units.append(FeatureUnit("embedding", emb_cols))
        elif len(X.names) != 34:
            units = [FeatureUnit(name, [i]) for i, name in enumerate(X.names)]
        return values, units
    values = np.asarray(X, dtype=np.float64)
    return values, [FeatureUnit(f"x{i}", [i]) for i in range(values.shape[1])]


def _holdout_split(y: list[str], seed: int, folds: int = 5):
    parts = stratified_fold_indices(y, folds, seed)
    return parts[0]  # (train, validation)


def _weight_scores(m, units: list[FeatureUnit]) -> list[float]:
    W = np.atleast_2d(m.state["W"])
    per_col = np.mean(np.abs(W), axis=0)
    return [float(np.mean(per_col[u.columns])) for u in units]


def _permutation_scores(m, X_val, y_val, units, baseline_f1, rng) -> list[float]:
    scores = []
    for u in units:
        shuffled = X_val.copy()
        perm = rng.permutation(X_val.shape[0])
        shuffled[:, u.columns] = shuffled[perm][:, u.columns]
        pred = predict(m, shuffled)
        f1 = classification_report(y_val, pred.tolist()).f1
        scores.append(baseline_f1 - f1)
    return scores


def rfe(spec: ModelSpec, X, y, step: int = 1, target_count: int = 10,
        seed: int = 0) -> RfeResult:
    """Recursive feature elimination; classification specs only."""
    if spec.task != "classify":
        raise ValueError("rfe is defined for classification specs")
    if step < 1 or target_count < 1:
        raise ValueError("step and target_count must be >= 1")

    values, units = _units_of(X)
    y = [str(v) for v in np.asarray(y).tolist()]
    train_idx, val_idx = _holdout_split(y, seed)
    y_arr = np.asarray(y, dtype=object)

    active = list(range(len(units)))
    eliminated: list[int] = []
    trace: list[tuple[list[str], float]] = []
    rng = np.random.default_rng(seed)
    final_scores: list[float] = []

    while True:
        cols = [c for ui in active for c in units[ui].columns]
        sub_units = []
        offset = 0
        for ui in active:
            width = len(units[ui].columns)
            sub_units.append(FeatureUnit(units[ui].name, list(range(offset, offset + width))))
            offset += width
        fit_spec = ModelSpec(spec.kind, spec.task, dict(spec.hyperparams), seed=seed)
        m = train(fit_spec, values[np.ix_(train_idx, cols)], y_arr[train_idx])
        val_pred = predict(m, values[np.ix_(val_idx, cols)])
        val_f1 = classification_report(y_arr[val_idx].tolist(), val_pred.tolist()).f1

        if spec.kind in LINEAR_KINDS:
            scores = _weight_scores(m, sub_units)
        else:
            scores = _permutation_scores(m, values[np.ix_(val_idx, cols)],
                                         y_arr[val_idx].tolist(), sub_units,
                                         val_f1, rng)
        if len(active) <= target_count:
            final_scores = scores
            trace.append(([], val_f1))
            break

        n_remove = min(step, len(active) - target_count)
        # lowest score goes first; ties prefer removing the later feature
        order = sorted(range(len(active)), key=lambda i: (scores[i], -active[i]))
        removed_local = order[:n_remove]
        removed_units = sorted((active[i] for i in removed_local), reverse=True)
        trace.append(([units[ui].name for ui in sorted(removed_units)], val_f1))
        for ui in removed_units:
            active.remove(ui)
            eliminated.append(ui)

    survivors = sorted(range(len(active)),
                       key=lambda i: (-final_scores[i], active[i]))
    ranking = [units[active[i]].name for i in survivors]
    ranking += [units[ui].name for ui in reversed(eliminated)]
    return RfeResult(ranking=ranking, elimination_trace=trace)


def _fold_hash(y: list[str], k: int, seed: int) -> str:
    parts = stratified_fold_indices(y, k, seed)
    h = hashlib.sha256()
    for _, test in parts:
        h.update(np.asarray(test, dtype=np.int64).tobytes())
        h.update(b"|")
    return h.hexdigest()[:16]


def ablate(spec: ModelSpec, X: FeatureMatrix, y, groups: list[str],
           k: int = 10, seed: int = 0) -> AblationResult:
    """One cross-validated run per excluded group, plus embedding-only.

    All rows reuse the same seed, hence identical fold partitions; the
    partition hash is recorded per row so that can be asserted.
    """
    for g in groups:
        if g not in FEATURE_GROUPS:
            raise ValueError(f"unknown feature group {g!r}")
    y_list = [str(v) for v in np.asarray(y).tolist()]
    fold_hash = _fold_hash(y_list, k, seed)
    result = AblationResult()

    def run(label: str, cols: list[int]):
        sub = FeatureMatrix(X.values[:, cols], [X.names[c] for c in cols])
        report = cross_validate(spec, sub, y_list, k, seed)
        result.rows.append({
            "label": label,
            "precision": report.precision,
            "recall": report.recall,
            "f1": report.f1,
            "fold_hash": fold_hash,
        })

    all_cols = list(range(X.values.shape[1]))
    run("all features", all_cols)
    for g in groups:
        excluded = set(X.group_columns(g))
        cols = [c for c in all_cols if c not in excluded]
        if not cols:
            continue
        run(f"exclude {g}", cols)
    emb_cols = X.group_columns("Embedding")
    if emb_cols:
        run("only Embedding", emb_cols)
    return result
