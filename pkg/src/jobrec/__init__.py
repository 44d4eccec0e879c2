"""Job recommendations from paragraph-vector embeddings with frequency/recency weighting.

The package covers the whole offline study: ingestion and holdout split
(:mod:`jobrec.corpus`), TF-IDF (:mod:`jobrec.textproc`), PV-DBOW training and
search (:mod:`jobrec.embedding`), LAST/AVG/BLL user profiles
(:mod:`jobrec.profile`), recommenders (:mod:`jobrec.recommend`), metrics
(:mod:`jobrec.metrics`) and the experiment harness (:mod:`jobrec.harness`).
"""

from .corpus import Dataset, Interaction, JobPosting, SplitDataset, load_interactions, load_jobs, split, stats
from .embedding import EmbeddingModel, TrainConfig, load_model, nearest, save_model, train
from .metrics import EvaluationReport, evaluate, ndcg_at_k, novelty_at_k, novelty_star
from .profile import BLLConfig, Strategy, bll_activation, bll_vector, softmax_weights

__version__ = "0.1.0"

__all__ = [
    "BLLConfig", "Dataset", "EmbeddingModel", "EvaluationReport", "Interaction", "JobPosting",
    "SplitDataset", "Strategy", "TrainConfig", "bll_activation", "bll_vector", "evaluate",
    "load_interactions", "load_jobs", "load_model", "ndcg_at_k", "nearest", "novelty_at_k",
    "novelty_star", "save_model", "softmax_weights", "split", "stats", "train",
]
