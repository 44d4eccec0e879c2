import numpy as np
import pytest

from jobrec.corpus import Action, Dataset, Interaction, JobPosting, UserHistory
from jobrec.embedding import EmbeddingModel, TrainConfig, Vocabulary


def make_jobs(ids, text="generic posting"):
    return tuple(JobPosting(j, f"{text} {j}", 1) for j in ids)


def make_dataset(events, jobs=None):
    """``events`` are ``(user, job, ts)`` views or ``(user, job, ts, action)`` tuples."""
    inters = []
    for ev in events:
        action = Action(ev[3]) if len(ev) > 3 else Action.VIEW
        inters.append(Interaction(ev[0], ev[1], ev[2], action))
    if jobs is None:
        jobs = make_jobs(sorted({ev[1] for ev in events}))
    return Dataset(jobs, tuple(inters))


def history(events, user="u"):
    return UserHistory(user, tuple(events))


def fixed_model(vectors: dict):
    """Embedding model with hand-set doc vectors and a dummy vocabulary."""
    ids = list(vectors)
    mat = np.array([vectors[j] for j in ids], dtype=np.float32)
    dim = mat.shape[1]
    vocab = Vocabulary(("w",), np.array([1]), np.array([1.0]))
    return EmbeddingModel(ids, mat, vocab, np.zeros((1, dim), np.float32), TrainConfig(dim=dim))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
