"""Reference vectors summarizing a user's history: LAST, AVG and BLL.

BLL weighs each distinct job by its base-level activation

    B_j = ln( sum_i age_{j,i} ** -decay ),   age = reference_time - view_time

so that jobs seen often and recently dominate the weighted sum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .corpus import UserHistory

_TINY = np.finfo(np.float64).smallest_subnormal


class Strategy(enum.Enum):
    LAST = "LAST"
    AVG = "AVG"
    BLL = "BLL"


@dataclass(frozen=True)
class BLLConfig:
    reference_time: int
    decay: float = 0.5
    min_age: int = 1

    def __post_init__(self):
        if self.decay < 0:
            raise ValueError("decay must be non-negative")
        if self.min_age < 1:
            raise ValueError("min_age must be at least 1 second")


@dataclass(frozen=True)
class ReferenceVector:
    values: np.ndarray
    strategy: Strategy


def _require(history: UserHistory):
    if not history.events:
        raise ValueError(f"user {history.user_id!r} has an empty history")


def last_vector(history: UserHistory, model) -> ReferenceVector:
    _require(history)
    vec = np.asarray(model[history.last_job()], dtype=np.float64)
    return ReferenceVector(vec.copy(), Strategy.LAST)


def avg_vector(history: UserHistory, model) -> ReferenceVector:
    """Mean over view events, so a job viewed m times counts m times."""
    _require(history)
    counts = history.counts
    total = sum(counts.values())
    out = np.zeros(model.dim)
    for job_id in sorted(counts):
        out += (counts[job_id] / total) * np.asarray(model[job_id], dtype=np.float64)
    return ReferenceVector(out, Strategy.AVG)


def bll_activation(history: UserHistory, job_id: str, config: BLLConfig) -> float:
    times = history.timestamps(job_id)
    if not times:
        raise KeyError(f"job {job_id!r} not in history of {history.user_id!r}")
    total = 0.0
    for ts in times:
        age = config.reference_time - ts
        if age < 0:
            raise ValueError(f"view at {ts} is after the reference time {config.reference_time}")
        total += max(age, config.min_age) ** -config.decay
    return math.log(total)


def softmax_weights(activations) -> np.ndarray:
    """Max-shifted softmax.

    Weights that underflow float64 are floored at the smallest subnormal so
    every entry stays strictly positive.
    """
    a = np.asarray(activations, dtype=np.float64)
    if a.size == 0 or not np.all(np.isfinite(a)):
        raise ValueError("activations must be a non-empty list of finite values")
    e = np.exp(a - a.max())
    return np.maximum(e / e.sum(), _TINY)


def bll_vector(history: UserHistory, model, config: BLLConfig) -> ReferenceVector:
    _require(history)
    jobs = sorted(history.jobs)
    weights = softmax_weights([bll_activation(history, j, config) for j in jobs])
    out = np.zeros(model.dim)
    for w, job_id in zip(weights, jobs):
        out += w * np.asarray(model[job_id], dtype=np.float64)
    return ReferenceVector(out, Strategy.BLL)


def reference_vector(history, model, strategy: Strategy, config: BLLConfig | None = None):
    if strategy is Strategy.LAST:
        return last_vector(history, model)
    if strategy is Strategy.AVG:
        return avg_vector(history, model)
    if config is None:
        raise ValueError("BLL needs a BLLConfig")
    return bll_vector(history, model, config)
