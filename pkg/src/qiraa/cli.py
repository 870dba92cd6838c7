"""Command-line entry points for every pipeline stage.

Every command resolves input paths (with $QIRAA_DATA_DIR as fallback root),
writes its primary output atomically, and drops a ``*.manifest.json``
recording the config, seed and input digests.  Exit codes: 0 success,
1 data error, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import cleaning, corpus, evaluation, selection
from .embeddings import (ComposedEmbedding, StoredEmbedding, fit_tfidf,
                         load_sentence_vectors, load_word_vectors)
from .errors import QiraaError
from .features import FeaturePipeline
from .lexicon import load_connectors, load_lexicon
from .manifest import atomic_write, resolve_path, write_manifest
from .models import (ModelSpec, model_from_json, model_to_json, predict,
                     predict_scores, train, train_ensemble)

MODEL_KINDS = ("knn", "naive_bayes", "decision_tree", "random_forest",
               "gbt", "softmax", "svm_linear", "svm_rbf")

# the five-classifier roster used for disagreement flagging; softmax runs
# full-batch there so its vote converges instead of riding the SGD tail
CLEANING_KINDS = ("svm_rbf", "random_forest", "knn", "softmax", "gbt")
CLEANING_HYPERPARAMS: dict[str, dict] = {"softmax": {"mode": "batch"}}


def _read(path: str) -> str:
    return resolve_path(path).read_text(encoding="utf-8")


def _load_dataset(path: str, scheme: str) -> corpus.Dataset:
    d = corpus.parse_annotated(_read(path))
    return corpus.Dataset(d.sentences, label_scheme=scheme)


def _parse_hyper(pairs: tuple[str, ...]) -> dict:
    hp: dict = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"--hyper expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        key = key.strip()
        if key == "lambda":
            key = "lambda_"
        raw = raw.strip()
        low = raw.lower()
        if low in ("none", "null"):
            value = None
        elif low in ("true", "false"):
            value = low == "true"
        else:
            try:
                value = int(raw)
            except ValueError:
                try:
                    value = float(raw)
                except ValueError:
                    value = raw
        hp[key] = value
    return hp


def _pipeline(lexicon: str, connectors_simple: str, connectors_complex: str,
              vectors: str | None, sentence_vectors: str | None,
              unit_norm: bool, dataset: corpus.Dataset | None) -> tuple[FeaturePipeline, dict]:
    inputs = {
        "lexicon": resolve_path(lexicon),
        "connectors_simple": resolve_path(connectors_simple),
        "connectors_complex": resolve_path(connectors_complex),
    }
    lex = load_lexicon(_read(lexicon))
    cl = load_connectors(_read(connectors_simple), _read(connectors_complex))
    embedder = None
    if vectors and sentence_vectors:
        raise click.UsageError("--vectors and --sentence-vectors are mutually exclusive")
    if vectors:
        inputs["vectors"] = resolve_path(vectors)
        wv = load_word_vectors(_read(vectors))
        if dataset is None:
            raise click.UsageError("composed embeddings need a dataset to fit tf-idf")
        embedder = ComposedEmbedding(wv, fit_tfidf(dataset), unit_norm=unit_norm)
    elif sentence_vectors:
        inputs["sentence_vectors"] = resolve_path(sentence_vectors)
        embedder = StoredEmbedding(load_sentence_vectors(_read(sentence_vectors)))
    return FeaturePipeline(lexicon=lex, connectors=cl, embedder=embedder), inputs


def _spec(model: str, task: str, hyper: tuple[str, ...], seed: int) -> ModelSpec:
    return ModelSpec(kind=model, task=task, hyperparams=_parse_hyper(hyper), seed=seed)


def _labelled_matrix(dataset: corpus.Dataset, pipeline: FeaturePipeline):
    from .features import FeatureMatrix

    fm = pipeline.featurize(dataset)
    labelled = dataset.labelled_indices()
    sub = FeatureMatrix(fm.values[labelled], fm.names,
                        [fm.sentence_ids[i] for i in labelled],
                        embedding_dim=fm.embedding_dim)
    labels = [dataset.scheme_label(dataset.sentences[i]) for i in labelled]
    return sub, labels


pipeline_options = [
    click.option("--lexicon", required=True, help="CEFR lexicon TSV"),
    click.option("--connectors-simple", required=True, help="simple connector list"),
    click.option("--connectors-complex", required=True, help="complex connector list"),
    click.option("--vectors", default=None, help="fastText .vec file (composed embeddings)"),
    click.option("--sentence-vectors", default=None, help="precomputed sentence-vector TSV"),
    click.option("--unit-norm", is_flag=True, default=False,
                 help="L2-normalize composed sentence vectors"),
]


def with_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@click.group()
def cli():
    """Sentence-difficulty assessment toolkit."""


@cli.command()
@click.option("--dataset", required=True)
@click.option("--scheme", default="three_way",
              type=click.Choice(corpus.LABEL_SCHEMES))
@with_options(pipeline_options)
@click.option("--out", required=True)
def featurize(dataset, scheme, lexicon, connectors_simple, connectors_complex,
              vectors, sentence_vectors, unit_norm, out):
    """Extract the feature matrix of a dataset to CSV."""
    d = _load_dataset(dataset, scheme)
    pipeline, inputs = _pipeline(lexicon, connectors_simple, connectors_complex,
                                 vectors, sentence_vectors, unit_norm, d)
    fm = pipeline.featurize(d)
    atomic_write(out, fm.to_csv())
    inputs["dataset"] = resolve_path(dataset)
    write_manifest(out, "featurize",
                   {"scheme": scheme, "unit_norm": unit_norm, "seed": None},
                   inputs)
    click.echo(f"wrote {fm.n_rows} x {len(fm.names)} feature rows to {out}")


@cli.command(name="train")
@click.option("--dataset", required=True)
@click.option("--scheme", default="three_way", type=click.Choice(corpus.LABEL_SCHEMES))
@with_options(pipeline_options)
@click.option("--model", required=True, type=click.Choice(MODEL_KINDS))
@click.option("--hyper", multiple=True, help="hyperparameter override key=value")
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True)
def train_cmd(dataset, scheme, lexicon, connectors_simple, connectors_complex,
              vectors, sentence_vectors, unit_norm, model, hyper, seed, out):
    """Train a classifier on the labelled sentences and save it as JSON."""
    d = _load_dataset(dataset, scheme)
    pipeline, inputs = _pipeline(lexicon, connectors_simple, connectors_complex,
                                 vectors, sentence_vectors, unit_norm, d)
    X, y = _labelled_matrix(d, pipeline)
    spec = _spec(model, "classify", hyper, seed)
    m = train(spec, X, y)
    atomic_write(out, model_to_json(m))
    inputs["dataset"] = resolve_path(dataset)
    write_manifest(out, "train",
                   {"scheme": scheme, "spec": spec.to_dict(), "unit_norm": unit_norm},
                   inputs)
    click.echo(f"trained {model} on {X.n_rows} instances -> {out}")


@cli.command()
@click.option("--dataset", required=True)
@click.option("--scheme", default="binary", type=click.Choice(corpus.LABEL_SCHEMES))
@with_options(pipeline_options)
@click.option("--model-file", required=True)
@click.option("--out", required=True)
def evaluate(dataset, scheme, lexicon, connectors_simple, connectors_complex,
             vectors, sentence_vectors, unit_norm, model_file, out):
    """Evaluate a saved model on a labelled dataset (e.g. the transfer set)."""
    d = _load_dataset(dataset, scheme)
    pipeline, inputs = _pipeline(lexicon, connectors_simple, connectors_complex,
                                 vectors, sentence_vectors, unit_norm, d)
    m = model_from_json(_read(model_file))
    report = evaluation.transfer_eval(m, d, pipeline)
    atomic_write(out, report.to_json())
    inputs["dataset"] = resolve_path(dataset)
    inputs["model_file"] = resolve_path(model_file)
    write_manifest(out, "evaluate", {"scheme": scheme, "seed": None}, inputs)
    click.echo(report.to_text(), nl=False)


def _cv_command(task: str):
    @click.option("--dataset", required=True)
    @click.option("--scheme", default="three_way", type=click.Choice(corpus.LABEL_SCHEMES))
    @with_options(pipeline_options)
    @click.option("--model", required=True, type=click.Choice(MODEL_KINDS))
    @click.option("--hyper", multiple=True)
    @click.option("--k", default=10, type=int)
    @click.option("--seed", default=0, type=int)
    @click.option("--out", required=True)
    def command(dataset, scheme, lexicon, connectors_simple, connectors_complex,
                vectors, sentence_vectors, unit_norm, model, hyper, k, seed, out):
        d = _load_dataset(dataset, scheme)
        pipeline, inputs = _pipeline(lexicon, connectors_simple,
                                     connectors_complex, vectors,
                                     sentence_vectors, unit_norm, d)
        X, labels = _labelled_matrix(d, pipeline)
        spec = _spec(model, task, hyper, seed)
        if task == "classify":
            y = labels
        else:
            # ordinal targets A=1, B=2, C=3 straight from the gold labels
            y = [float(d.sentences[i].gold.ordinal())
                 for i in d.labelled_indices()]
        report = evaluation.cross_validate(spec, X, y, k, seed)
        atomic_write(out, report.to_json())
        inputs["dataset"] = resolve_path(dataset)
        write_manifest(out, "cv" if task == "classify" else "regress",
                       {"scheme": scheme, "spec": spec.to_dict(), "k": k,
                        "seed": seed}, inputs)
        click.echo(report.to_text(), nl=False)
    return command


cv = cli.command(name="cv")(_cv_command("classify"))
cv.help = "Cross-validated classification report (pooled out-of-fold)."
regress = cli.command(name="regress")(_cv_command("regress"))
regress.help = "Cross-validated regression report on ordinal targets (A=1, B=2, C=3)."


@cli.group()
def clean():
    """Label-cleaning workflow: flag disagreements, apply triage decisions."""


@clean.command(name="flag")
@click.option("--dataset", required=True)
@click.option("--scheme", default="three_way", type=click.Choice(corpus.LABEL_SCHEMES))
@with_options(pipeline_options)
@click.option("--threshold", default=5, type=int)
@click.option("--k", default=10, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True)
def clean_flag(dataset, scheme, lexicon, connectors_simple, connectors_complex,
               vectors, sentence_vectors, unit_norm, threshold, k, seed, out):
    """Train the five-classifier ensemble out-of-fold and flag contradictions."""
    d = _load_dataset(dataset, scheme)
    pipeline, inputs = _pipeline(lexicon, connectors_simple, connectors_complex,
                                 vectors, sentence_vectors, unit_norm, d)
    X, y = _labelled_matrix(d, pipeline)
    specs = [ModelSpec(kind, "classify", CLEANING_HYPERPARAMS.get(kind, {}),
                       seed=seed) for kind in CLEANING_KINDS]
    preds = train_ensemble(specs, X, y, k, seed)
    items = cleaning.flag_disagreements(d, preds, list(CLEANING_KINDS), threshold)
    atomic_write(out, cleaning.dump_items(items))
    inputs["dataset"] = resolve_path(dataset)
    write_manifest(out, "clean flag",
                   {"scheme": scheme, "threshold": threshold, "k": k, "seed": seed},
                   inputs)
    click.echo(f"flagged {len(items)} of {X.n_rows} labelled sentences -> {out}")


@clean.command(name="apply")
@click.option("--dataset", required=True)
@click.option("--scheme", default="three_way", type=click.Choice(corpus.LABEL_SCHEMES))
@click.option("--decisions", "decisions_path", required=True)
@click.option("--out", required=True)
@click.option("--changelog", default=None)
def clean_apply(dataset, scheme, decisions_path, out, changelog):
    """Apply triage decisions: relabel Modify sentences, drop False ones."""
    d = _load_dataset(dataset, scheme)
    decisions = cleaning.load_decisions(_read(decisions_path))
    cleaned, log = cleaning.apply_decisions(d, decisions)
    atomic_write(out, corpus.serialize(cleaned))
    log_path = changelog or (out + ".changelog.json")
    atomic_write(log_path, json.dumps(log.to_dict(), indent=2, sort_keys=True) + "\n")
    write_manifest(out, "clean apply", {"scheme": scheme, "seed": None},
                   {"dataset": resolve_path(dataset),
                    "decisions": resolve_path(decisions_path)})
    click.echo(f"relabelled {len(log.relabelled)}, excluded {len(log.excluded)} -> {out}")


@cli.command(name="rfe")
@click.option("--dataset", required=True)
@click.option("--scheme", default="three_way", type=click.Choice(corpus.LABEL_SCHEMES))
@with_options(pipeline_options)
@click.option("--model", default="svm_linear", type=click.Choice(MODEL_KINDS))
@click.option("--hyper", multiple=True)
@click.option("--step", default=1, type=int)
@click.option("--target-count", default=10, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True)
def rfe_cmd(dataset, scheme, lexicon, connectors_simple, connectors_complex,
            vectors, sentence_vectors, unit_norm, model, hyper, step,
            target_count, seed, out):
    """Recursive feature elimination; the embedding block is one feature."""
    d = _load_dataset(dataset, scheme)
    pipeline, inputs = _pipeline(lexicon, connectors_simple, connectors_complex,
                                 vectors, sentence_vectors, unit_norm, d)
    X, y = _labelled_matrix(d, pipeline)
    spec = _spec(model, "classify", hyper, seed)
    result = selection.rfe(spec, X, y, step=step, target_count=target_count, seed=seed)
    atomic_write(out, result.to_json())
    inputs["dataset"] = resolve_path(dataset)
    write_manifest(out, "rfe",
                   {"scheme": scheme, "spec": spec.to_dict(), "step": step,
                    "target_count": target_count, "seed": seed}, inputs)
    click.echo("\n".join(f"{i + 1:>3}  {name}"
                         for i, name in enumerate(result.ranking[:target_count])))


@cli.command(name="ablate")
@click.option("--dataset", required=True)
@click.option("--scheme", default="three_way", type=click.Choice(corpus.LABEL_SCHEMES))
@with_options(pipeline_options)
@click.option("--model", default="svm_rbf", type=click.Choice(MODEL_KINDS))
@click.option("--hyper", multiple=True)
@click.option("--k", default=10, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True)
def ablate_cmd(dataset, scheme, lexicon, connectors_simple, connectors_complex,
               vectors, sentence_vectors, unit_norm, model, hyper, k, seed, out):
    """Group-ablation study over POS/Syntactic/CEFR/Embedding blocks."""
    d = _load_dataset(dataset, scheme)
    pipeline, inputs = _pipeline(lexicon, connectors_simple, connectors_complex,
                                 vectors, sentence_vectors, unit_norm, d)
    X, y = _labelled_matrix(d, pipeline)
    spec = _spec(model, "classify", hyper, seed)
    groups = ["POS", "Syntactic", "CEFR"]
    if X.embedding_dim:
        groups.append("Embedding")
    result = selection.ablate(spec, X, y, groups, k=k, seed=seed)
    atomic_write(out, result.to_json())
    inputs["dataset"] = resolve_path(dataset)
    write_manifest(out, "ablate",
                   {"scheme": scheme, "spec": spec.to_dict(), "k": k,
                    "seed": seed}, inputs)
    click.echo(result.to_text(), nl=False)


@cli.command(name="predict")
@click.option("--dataset", required=True)
@click.option("--scheme", default="three_way", type=click.Choice(corpus.LABEL_SCHEMES))
@with_options(pipeline_options)
@click.option("--model-file", required=True)
@click.option("--out", required=True)
def predict_cmd(dataset, scheme, lexicon, connectors_simple, connectors_complex,
                vectors, sentence_vectors, unit_norm, model_file, out):
    """Predict levels for every sentence of a dataset (labels not required)."""
    d = _load_dataset(dataset, scheme)
    pipeline, inputs = _pipeline(lexicon, connectors_simple, connectors_complex,
                                 vectors, sentence_vectors, unit_norm, d)
    m = model_from_json(_read(model_file))
    fm = pipeline.featurize(d)
    labels = predict(m, fm)
    scores = predict_scores(m, fm)
    lines = []
    for sid, label, row in zip(fm.sentence_ids, labels, scores):
        lines.append(json.dumps(
            {"sent_id": sid, "level": str(label),
             "scores": {str(c): float(s) for c, s in zip(m.classes, row)}},
            sort_keys=True))
    atomic_write(out, "\n".join(lines) + "\n")
    inputs["dataset"] = resolve_path(dataset)
    inputs["model_file"] = resolve_path(model_file)
    write_manifest(out, "predict", {"scheme": scheme, "seed": None}, inputs)
    click.echo(f"predicted {len(lines)} sentences -> {out}")


@cli.command(name="serve")
@click.option("--items", required=True, help="flagged triage items JSON")
@click.option("--decisions", required=True, help="append-only decision log (JSONL)")
@click.option("--model-file", default=None, help="model for /api/predict")
@click.option("--lexicon", default=None)
@click.option("--connectors-simple", default=None)
@click.option("--connectors-complex", default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8337, type=int)
@click.option("--token", default=None, help="shared auth token (X-Auth-Token)")
@click.option("--ui-dir", default=None, help="built review-UI assets to serve at /")
def serve(items, decisions, model_file, lexicon, connectors_simple,
          connectors_complex, host, port, token, ui_dir):
    """Serve the triage/prediction HTTP API (and the review UI if built)."""
    import uvicorn

    from .service import Predictor, create_app

    store = cleaning.TriageStore.open(resolve_path(items), Path(decisions))
    predictor = None
    if model_file:
        if not (lexicon and connectors_simple and connectors_complex):
            raise click.UsageError("--model-file needs --lexicon and both connector lists")
        m = model_from_json(_read(model_file))
        if len(m.feature_names) != 34:
            # embedding-backed models need their training-time embedding
            # inputs, which cannot be reconstructed for ad-hoc sentences
            raise click.UsageError(
                "/api/predict serves linguistic-feature models only "
                f"(model has {len(m.feature_names)} features)")
        lex = load_lexicon(_read(lexicon))
        cl = load_connectors(_read(connectors_simple), _read(connectors_complex))
        predictor = Predictor(model=m, pipeline=FeaturePipeline(lexicon=lex, connectors=cl))
    app = create_app(store=store, predictor=predictor, token=token, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 130
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 2
    except (QiraaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
