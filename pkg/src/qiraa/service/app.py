"""HTTP facade: triage queue for the review UI plus stateless prediction.

The handlers call the same library operations as the CLI; the only logic
here is translation between HTTP and the domain types.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.staticfiles import StaticFiles

from ..cleaning import TriageDecision, TriageStore
from ..errors import DuplicateDecision, MissingNewLabel, UnknownSentence
from ..features import FeatureMatrix, FeaturePipeline
from ..corpus import AnnotatedSentence, MorphFeats, Token
from ..labels import CefrLabel
from ..models import TrainedModel, predict, predict_scores
from .schemas import (DecisionIn, DecisionOut, PredictOut, SentenceIn,
                      StatsOut, TriageItemOut, TriagePageOut)


@dataclass
class Predictor:
    model: TrainedModel
    pipeline: FeaturePipeline


def create_app(store: TriageStore | None = None,
               predictor: Predictor | None = None,
               token: str | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="qiraa triage service")

    async def check_token(request: Request):
        if token is not None and request.headers.get("X-Auth-Token") != token:
            raise HTTPException(status_code=401, detail="missing or bad token")

    auth = [Depends(check_token)]

    def need_store() -> TriageStore:
        if store is None:
            raise HTTPException(status_code=503, detail="no triage set loaded")
        return store

    @app.get("/api/triage", response_model=TriagePageOut, dependencies=auth)
    def list_triage(status: str | None = Query(default=None),
                    page: int = Query(default=1, ge=1),
                    page_size: int = Query(default=20, ge=1, le=500)):
        st = need_store()
        if status is not None and status not in ("pending", "decided"):
            raise HTTPException(status_code=422, detail="status must be pending or decided")
        items = st.list_items(status)
        start = (page - 1) * page_size
        chunk = items[start:start + page_size]
        return TriagePageOut(
            items=[TriageItemOut(**it.to_dict()) for it in chunk],
            total=len(items), page=page, page_size=page_size)

    @app.post("/api/triage/{sentence_id}/decision", response_model=DecisionOut,
              dependencies=auth)
    def post_decision(sentence_id: str, body: DecisionIn):
        st = need_store()
        if st.get_item(sentence_id) is None:
            raise HTTPException(status_code=404, detail=f"unknown item {sentence_id!r}")
        new_label = None
        if body.new_label is not None:
            try:
                new_label = CefrLabel.parse(body.new_label)
            except ValueError:
                raise HTTPException(status_code=422,
                                    detail=f"not a CEFR level: {body.new_label!r}")
        try:
            decision = TriageDecision(
                sentence_id=sentence_id,
                tag=body.tag,
                new_label=new_label,
                annotator=body.annotator,
                timestamp=datetime.now(timezone.utc).isoformat(),
                amends=body.amends,
            )
        except MissingNewLabel:
            raise HTTPException(status_code=422, detail="Modify requires new_label")
        try:
            st.append(decision)
        except DuplicateDecision:
            raise HTTPException(status_code=409,
                                detail=f"{sentence_id!r} already decided")
        except UnknownSentence:
            raise HTTPException(status_code=404, detail=f"unknown item {sentence_id!r}")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return DecisionOut(sentence_id=sentence_id, tag=decision.tag,
                           new_label=body.new_label, annotator=body.annotator,
                           timestamp=decision.timestamp)

    @app.get("/api/stats", response_model=StatsOut, dependencies=auth)
    def stats():
        return StatsOut(**need_store().stats())

    @app.post("/api/predict", response_model=PredictOut, dependencies=auth)
    def predict_sentence(body: SentenceIn):
        if predictor is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        try:
            sentence = _to_sentence(body)
            sentence.validate_tree()
        except Exception as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        row = predictor.pipeline.featurize_sentence(sentence)
        names = predictor.pipeline.names
        fm = FeatureMatrix(row[None, :], names)
        level = predict(predictor.model, fm)[0]
        scores = predict_scores(predictor.model, fm)[0]
        return PredictOut(
            sentence_id=sentence.id,
            level=str(level),
            scores={str(c): float(s) for c, s in zip(predictor.model.classes, scores)},
            features={name: float(v) for name, v in zip(names[:34], row[:34])},
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _to_sentence(body: SentenceIn) -> AnnotatedSentence:
    tokens = tuple(
        Token(
            index=t.index, form=t.form, lemma=t.lemma, pos=t.pos,
            feats=MorphFeats(aspect=t.aspect, voice=t.voice, person=t.person,
                             proper=t.proper, numeric=t.numeric,
                             comparative=t.comparative),
            seg_count=t.seg_count, head=t.head, deprel=t.deprel,
        )
        for t in body.tokens
    )
    return AnnotatedSentence(id=body.id, tokens=tokens)
