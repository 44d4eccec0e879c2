"""Tokenization, TF-IDF weighting and sparse cosine similarity."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

_WORD = re.compile(r"[^\W_]+")
MIN_TOKEN_LENGTH = 2


def tokenize(text: str) -> list[str]:
    """Lowercase, split on anything that is not a letter or digit, drop 1-char tokens.

    >>> tokenize("C++ developer, Wien!")
    ['developer', 'wien']
    """
    return [tok for tok in _WORD.findall(text.lower()) if len(tok) >= MIN_TOKEN_LENGTH]


@dataclass(frozen=True)
class SparseVector:
    entries: dict[int, float]
    norm: float = field(default=None)

    def __post_init__(self):
        if self.norm is None:
            object.__setattr__(self, "norm", math.sqrt(sum(w * w for w in self.entries.values())))

    def __len__(self):
        return len(self.entries)

    def is_zero(self):
        return self.norm == 0.0


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    document_frequency: dict[str, int]
    num_docs: int

    def idf(self, term: str) -> float:
        return math.log((self.num_docs + 1) / (self.document_frequency[term] + 1))


def fit_tfidf(docs) -> TfIdfModel:
    """Vocabulary in first-seen order plus distinct-document frequencies."""
    docs = list(docs)
    if not docs:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    vocabulary: dict[str, int] = {}
    df: Counter = Counter()
    for doc in docs:
        for term in doc:
            vocabulary.setdefault(term, len(vocabulary))
        df.update(set(doc))
    return TfIdfModel(vocabulary, dict(df), len(docs))


def vectorize(model: TfIdfModel, doc) -> SparseVector:
    """Sublinear-tf, smoothed-idf weights, L2 normalized.

    weight(t) = (1 + ln tf) * ln((N + 1) / (df + 1)). Out-of-vocabulary terms
    are ignored; an empty result is the zero vector with norm 0.
    """
    tf = Counter(t for t in doc if t in model.vocabulary)
    raw = {}
    for term, count in tf.items():
        w = (1.0 + math.log(count)) * model.idf(term)
        if w != 0.0:
            raw[model.vocabulary[term]] = w
    norm = math.sqrt(sum(w * w for w in raw.values()))
    if norm == 0.0:
        return SparseVector({}, 0.0)
    entries = {i: w / norm for i, w in sorted(raw.items())}
    return SparseVector(entries)


def cosine(a: SparseVector, b: SparseVector) -> float:
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    shared = sorted(a.entries.keys() & b.entries.keys())
    dot = sum(a.entries[i] * b.entries[i] for i in shared)
    return dot / (a.norm * b.norm)


def to_csr(vectors, dim: int) -> sp.csr_matrix:
    """Stack sparse vectors into a row matrix, each row scaled to unit norm."""
    rows, cols, vals = [], [], []
    for r, vec in enumerate(vectors):
        if vec.norm == 0.0:
            continue
        for i, w in vec.entries.items():
            rows.append(r)
            cols.append(i)
            vals.append(w / vec.norm)
    return sp.csr_matrix(
        (np.asarray(vals, dtype=np.float64), (rows, cols)), shape=(len(vectors), dim)
    )
