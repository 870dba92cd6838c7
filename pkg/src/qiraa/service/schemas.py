"""Request/response models of the triage and prediction HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class VoteOut(BaseModel):
    model: str
    label: str


class TriageItemOut(BaseModel):
    sentence_id: str
    text: str
    gold: str
    gold_scheme_label: str
    consensus: str
    votes: list[VoteOut]
    status: Literal["pending", "decided"]


class TriagePageOut(BaseModel):
    items: list[TriageItemOut]
    total: int
    page: int
    page_size: int


class DecisionIn(BaseModel):
    tag: Literal["Wrong", "Modify", "Ambiguous", "False"]
    new_label: Optional[str] = None
    annotator: str = ""
    amends: bool = False


class DecisionOut(BaseModel):
    sentence_id: str
    tag: str
    new_label: Optional[str]
    annotator: str
    timestamp: str


class StatsOut(BaseModel):
    total: int
    pending: int
    decided: int
    tags: dict[str, int]


class TokenIn(BaseModel):
    index: int
    form: str
    lemma: str
    pos: str
    head: int = 0
    deprel: str = "---"
    seg_count: int = Field(default=1, ge=1)
    aspect: str = "none"
    voice: str = "none"
    person: str = "none"
    proper: bool = False
    numeric: bool = False
    comparative: bool = False


class SentenceIn(BaseModel):
    id: str = "adhoc"
    tokens: list[TokenIn] = Field(min_length=1)


class PredictOut(BaseModel):
    sentence_id: str
    level: str
    scores: dict[str, float]
    features: dict[str, float]
