"""Exception hierarchy shared across the toolkit.

Every error raised on bad data (as opposed to programming mistakes) derives
from QiraaError so the CLI can map it to a non-zero exit code uniformly.
"""


class QiraaError(Exception):
    """Base class for all data and configuration errors."""


# corpus parsing

class MalformedLine(QiraaError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        super().__init__(f"malformed line {line_no}" + (f": {reason}" if reason else ""))


class CyclicTree(QiraaError):
    def __init__(self, sent_id: str):
        self.sent_id = sent_id
        super().__init__(f"head cycle in sentence {sent_id!r}")


class UnknownLabel(QiraaError):
    def __init__(self, sent_id: str, label: str = ""):
        self.sent_id = sent_id
        self.label = label
        super().__init__(f"unknown CEFR label {label!r} in sentence {sent_id!r}")


class TooFewInstances(QiraaError):
    def __init__(self, cls: str, count: int, k: int):
        self.cls = cls
        super().__init__(f"class {cls!r} has {count} instances, fewer than k={k}")


# lexicon

class EmptyLemma(QiraaError):
    pass


# embeddings

class BadHeader(QiraaError):
    pass


class DimMismatch(QiraaError):
    def __init__(self, where):
        self.where = where
        super().__init__(f"vector dimension mismatch at {where!r}")


class DuplicateId(QiraaError):
    def __init__(self, sent_id: str):
        self.sent_id = sent_id
        super().__init__(f"duplicate sentence id {sent_id!r}")


class MissingVector(QiraaError):
    def __init__(self, sent_id: str):
        self.sent_id = sent_id
        super().__init__(f"no stored vector for sentence {sent_id!r}")


# models

class InvalidHyperparam(QiraaError):
    pass


class DegenerateData(QiraaError):
    pass


class FeatureMismatch(QiraaError):
    pass


# evaluation

class LengthMismatch(QiraaError):
    pass


class ShapeMismatch(QiraaError):
    pass


# cleaning

class UnknownSentence(QiraaError):
    def __init__(self, sent_id: str):
        self.sent_id = sent_id
        super().__init__(f"decision references unknown sentence {sent_id!r}")


class MissingNewLabel(QiraaError):
    pass


class DuplicateDecision(QiraaError):
    def __init__(self, sent_id: str):
        self.sent_id = sent_id
        super().__init__(f"sentence {sent_id!r} already has a decision (use amend)")
