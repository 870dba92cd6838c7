"""Metrics and experiment harnesses: confusion matrices, support-weighted
P/R/F1, tie-corrected rank correlations, pooled cross-validation and
transfer evaluation.

Kendall's tau-b uses the tie-corrected form

    tau_b = (C - D) / sqrt((n0 - n1) (n0 - n2))

with n0 = n(n-1)/2 and n1/n2 the tied-pair counts within x/y.  Zero
denominator factors make the statistic undefined, reported as None.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Dataset, plain_fold_indices, stratified_fold_indices
from .errors import LengthMismatch, TooFewInstances
from .models import ModelSpec, TrainedModel, predict, train


@dataclass
class ConfusionMatrix:
    """Square count matrix; rows are gold classes, columns predicted."""

    classes: list
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_lists(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.counts]


def confusion(gold, pred, classes: list | None = None) -> ConfusionMatrix:
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise LengthMismatch(f"gold has {len(gold)} items, pred has {len(pred)}")
    if not gold:
        raise LengthMismatch("need at least one instance")
    if classes is None:
        classes = sorted(set(gold) | set(pred))
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(list(classes), counts)


def per_class_prf(cm: ConfusionMatrix) -> list[dict]:
    """Per-class precision/recall/F1/support; empty denominators yield 0."""
    out = []
    col_sums = cm.counts.sum(axis=0)
    row_sums = cm.counts.sum(axis=1)
    for i, cls in enumerate(cm.classes):
        tp = float(cm.counts[i, i])
        p = tp / col_sums[i] if col_sums[i] else 0.0
        r = tp / row_sums[i] if row_sums[i] else 0.0
        f1 = 2.0 * p * r / (p + r) if (p + r) > 0 else 0.0
        out.append({"class": cls, "precision": p, "recall": r, "f1": f1,
                    "support": int(row_sums[i])})
    return out


def weighted_prf(cm: ConfusionMatrix) -> tuple[float, float, float]:
    """Support-weighted average of the per-class precision/recall/F1."""
    rows = per_class_prf(cm)
    total = cm.total
    if total == 0:
        raise ValueError("empty confusion matrix")
    p = sum(r["precision"] * r["support"] for r in rows) / total
    r_ = sum(r["recall"] * r["support"] for r in rows) / total
    f1 = sum(r["f1"] * r["support"] for r in rows) / total
    return p, r_, f1


def macro_prf(cm: ConfusionMatrix) -> tuple[float, float, float]:
    """Unweighted per-class average, emitted alongside the weighted form."""
    rows = per_class_prf(cm)
    k = len(rows)
    return (sum(r["precision"] for r in rows) / k,
            sum(r["recall"] for r in rows) / k,
            sum(r["f1"] for r in rows) / k)


# ---------------------------------------------------------------------------
# rank statistics

def _tie_pair_count(values: np.ndarray) -> int:
    _, counts = np.unique(values, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def _merge_count_inversions(seq: list) -> int:
    """Number of strictly decreasing pairs, counted by mergesort."""
    n = len(seq)
    if n < 2:
        return 0
    buf = list(seq)
    tmp = [0] * n
    inversions = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if buf[j] < buf[i]:
                    inversions += mid - i
                    tmp[k] = buf[j]
                    j += 1
                else:
                    tmp[k] = buf[i]
                    i += 1
                k += 1
            tmp[k:hi] = buf[i:mid] if i < mid else buf[j:hi]
        buf, tmp = tmp, buf
        width *= 2
    return inversions


def kendall_tau_b(x, y) -> float | None:
    """Tie-corrected Kendall rank correlation; None when undefined."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"x has {x.shape}, y has {y.shape}")
    n = len(x)
    if n < 2:
        raise LengthMismatch("need at least 2 observations")

    n0 = n * (n - 1) // 2
    n1 = _tie_pair_count(x)
    n2 = _tie_pair_count(y)
    denom1 = n0 - n1
    denom2 = n0 - n2
    if denom1 == 0 or denom2 == 0:
        return None

    order = np.lexsort((y, x))
    y_sorted = y[order]
    joint = np.stack([x[order], y_sorted], axis=1)
    changed = np.any(joint[1:] != joint[:-1], axis=1)
    group_sizes = np.diff(np.concatenate([[0], np.nonzero(changed)[0] + 1, [n]]))
    n3 = int(np.sum(group_sizes * (group_sizes - 1) // 2))

    discordant = _merge_count_inversions(y_sorted.tolist())
    c_minus_d = n0 - n1 - n2 + n3 - 2 * discordant
    return c_minus_d / math.sqrt(denom1 * denom2)


def pearson(x, y) -> float | None:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"x has {x.shape}, y has {y.shape}")
    if len(x) < 2:
        raise LengthMismatch("need at least 2 observations")
    xd = x - x.mean()
    yd = y - y.mean()
    sx = math.sqrt(float(xd @ xd))
    sy = math.sqrt(float(yd @ yd))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(xd @ yd) / (sx * sy)


def average_ranks(x) -> np.ndarray:
    """1-based ranks; tied values receive the mean of their positions."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float | None:
    return pearson(average_ranks(x), average_ranks(y))


def mean_absolute_error(gold, pred) -> float:
    gold = np.asarray(gold, dtype=np.float64)
    pred = np.asarray(pred, dtype=np.float64)
    if gold.shape != pred.shape:
        raise LengthMismatch(f"gold has {gold.shape}, pred has {pred.shape}")
    return float(np.mean(np.abs(gold - pred)))


def correlation_suite(gold, pred) -> tuple[float | None, float | None, float | None, float]:
    """(pearson, spearman, kendall_tau_b, mae); correlations are None when
    a zero-variance input makes them undefined, MAE is always computed."""
    return (pearson(gold, pred), spearman(gold, pred),
            kendall_tau_b(gold, pred), mean_absolute_error(gold, pred))


# ---------------------------------------------------------------------------
# reports and harnesses

@dataclass
class MetricReport:
    task: str
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    macro_precision: float | None = None
    macro_recall: float | None = None
    macro_f1: float | None = None
    mae: float | None = None
    pearson: float | None = None
    spearman: float | None = None
    kendall_tau_b: float | None = None
    confusion: ConfusionMatrix | None = None
    per_class: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "task": self.task,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "mae": self.mae,
            "pearson": self.pearson,
            "spearman": self.spearman,
            "kendall_tau_b": self.kendall_tau_b,
            "per_class": self.per_class,
            "extras": self.extras,
        }
        if self.confusion is not None:
            d["confusion"] = {"classes": self.confusion.classes,
                              "counts": self.confusion.to_lists()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        if self.task == "classify":
            lines.append(f"{'class':<12}{'P':>8}{'R':>8}{'F1':>8}{'support':>9}")
            for row in self.per_class:
                lines.append(f"{str(row['class']):<12}{row['precision']:>8.3f}"
                             f"{row['recall']:>8.3f}{row['f1']:>8.3f}{row['support']:>9}")
            lines.append(f"{'weighted':<12}{self.precision:>8.3f}{self.recall:>8.3f}{self.f1:>8.3f}")
            lines.append(f"{'macro':<12}{self.macro_precision:>8.3f}"
                         f"{self.macro_recall:>8.3f}{self.macro_f1:>8.3f}")
            if self.confusion is not None:
                lines.append("")
                head = "gold\\pred".ljust(12) + "".join(f"{str(c):>8}" for c in self.confusion.classes)
                lines.append(head)
                for cls, row in zip(self.confusion.classes, self.confusion.counts):
                    lines.append(str(cls).ljust(12) + "".join(f"{int(v):>8}" for v in row))
        else:
            def fmt(v):
                return "undefined" if v is None else f"{v:.4f}"
            lines.append(f"MAE       {fmt(self.mae)}")
            lines.append(f"Pearson   {fmt(self.pearson)}")
            lines.append(f"Spearman  {fmt(self.spearman)}")
            lines.append(f"Kendall   {fmt(self.kendall_tau_b)}")
        return "\n".join(lines) + "\n"


def classification_report(gold, pred, classes: list | None = None) -> MetricReport:
    cm = confusion(gold, pred, classes)
    p, r, f1 = weighted_prf(cm)
    mp, mr, mf1 = macro_prf(cm)
    return MetricReport(task="classify", precision=p, recall=r, f1=f1,
                        macro_precision=mp, macro_recall=mr, macro_f1=mf1,
                        confusion=cm, per_class=per_class_prf(cm))


def regression_report(gold, pred) -> MetricReport:
    pr, sp, kt, mae = correlation_suite(gold, pred)
    return MetricReport(task="regress", mae=mae, pearson=pr, spearman=sp,
                        kendall_tau_b=kt)


def _fold_seed(seed: int, fold_no: int) -> int:
    return (seed * 100003 + fold_no * 101) % (2**31 - 1)


def cross_validate(spec: ModelSpec, X, y, k: int, seed: int) -> MetricReport:
    """Metrics over pooled out-of-fold predictions.

    Classification stratifies on the labels; regression stratifies on the
    target values when every value has at least k occurrences (the ordinal
    CEFR encoding), otherwise plain shuffled folds.
    """
    y = np.asarray(y)
    n = len(y)
    if spec.task == "classify":
        folds = stratified_fold_indices([str(v) for v in y.tolist()], k, seed)
    else:
        try:
            folds = stratified_fold_indices([repr(v) for v in y.tolist()], k, seed)
        except TooFewInstances:
            folds = plain_fold_indices(n, k, seed)

    Xv = X.values if hasattr(X, "values") else np.asarray(X, dtype=np.float64)
    names = list(X.names) if hasattr(X, "names") else None

    pooled = np.empty(n, dtype=object)
    fold_seeds = []
    for fold_no, (train_idx, test_idx) in enumerate(folds):
        fseed = _fold_seed(seed, fold_no)
        fold_seeds.append(fseed)
        fold_spec = ModelSpec(spec.kind, spec.task, dict(spec.hyperparams), seed=fseed)
        Xtr = Xv[train_idx]
        Xte = Xv[test_idx]
        m = train(fold_spec, Xtr if names is None else _named(Xtr, names), y[train_idx])
        pooled[test_idx] = predict(m, Xte if names is None else _named(Xte, names))

    if spec.task == "classify":
        report = classification_report(y.tolist(), pooled.tolist())
    else:
        report = regression_report(y.astype(np.float64), pooled.astype(np.float64))
    report.extras["fold_seeds"] = fold_seeds
    report.extras["k"] = k
    report.extras["seed"] = seed
    report.extras["model"] = spec.to_dict()
    return report


def _named(X: np.ndarray, names: list[str]):
    from .features import FeatureMatrix
    return FeatureMatrix(X, names)


def transfer_eval(m: TrainedModel, d2: Dataset, pipeline) -> MetricReport:
    """Evaluate a trained classifier on a second labelled dataset,
    featurized with the same pipeline configuration used in training."""
    if m.spec.task != "classify":
        raise ValueError("transfer_eval expects a classifier model")
    fm = pipeline.featurize(d2)
    labelled = d2.labelled_indices()
    gold = [d2.scheme_label(d2.sentences[i]) for i in labelled]
    sub = _named(fm.values[labelled], fm.names)
    pred = predict(m, sub)
    report = classification_report(gold, pred.tolist(), classes=m.classes)
    report.extras["n_instances"] = len(labelled)
    report.extras["label_scheme"] = d2.label_scheme
    return report
