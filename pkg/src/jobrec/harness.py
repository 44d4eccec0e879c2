"""Synthetic data generation and the end-to-end experiment pipeline."""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import corpus, textproc
from .embedding import TrainConfig, save_model, train
from .errors import ConfigError, StageError
from .metrics import EvaluationReport, applied_novelty, content_vectors, evaluate
from .profile import BLLConfig, Strategy
from .recommend import ContentBased, EmbeddingRecommender, MostPopular, RoundRobinHybrid, UserKNN

log = logging.getLogger(__name__)

ENV_PREFIX = "EMBREC_"
_EPOCH_START = 1_600_000_000
_DAY = 86_400
_SYLLABLES = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"] + ["an", "er", "in", "on", "us"]


def derive_seed(root: int, stage: str) -> int:
    """Child seed for ``stage``, a pure function of the root seed and the stage name."""
    digest = hashlib.sha256(f"{root}/{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


@dataclass(frozen=True)
class SynthConfig:
    num_topics: int = 2
    jobs_per_topic: int = 100
    users: int = 100
    views_per_user: int = 20
    apply_rate: float = 0.1
    vocab_per_topic: int = 150
    popularity_skew: float = 1.0
    seed: int = 42
    shared_vocab: int = 20
    doc_length: int = 40
    companies_per_topic: int = 10
    template_reuse: float = 0.5
    noise_rate: float = 0.1

    def __post_init__(self):
        counts = ("num_topics", "jobs_per_topic", "users", "views_per_user", "vocab_per_topic",
                  "shared_vocab", "doc_length", "companies_per_topic")
        for name in counts:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("apply_rate", "template_reuse", "noise_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.popularity_skew < 0:
            raise ConfigError("popularity_skew must be >= 0")


@dataclass
class SynthResult:
    jobs_path: Path
    interactions_path: Path
    users_path: Path
    job_topic: dict[str, int]
    home_topic: dict[str, int]


def _pseudo_words(rng, n):
    words, seen = [], set()
    while len(words) < n:
        word = "".join(rng.choice(_SYLLABLES, size=rng.integers(2, 5)))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def synth(config: SynthConfig, jobs_path, interactions_path, users_path=None) -> SynthResult:
    """Write a topic-clustered job corpus and Zipf-skewed view/apply log.

    Each topic owns a disjoint block of words; every description also borrows
    from a small shared block. Jobs of the same company reuse part of a
    company template, giving near-duplicate postings. Users have a home topic;
    a ``noise_rate`` fraction of their views land in another topic.
    """
    cfg = config
    rng = np.random.default_rng(cfg.seed)
    words = _pseudo_words(rng, cfg.num_topics * cfg.vocab_per_topic + cfg.shared_vocab)
    shared = words[: cfg.shared_vocab]
    blocks = [
        words[cfg.shared_vocab + t * cfg.vocab_per_topic : cfg.shared_vocab + (t + 1) * cfg.vocab_per_topic]
        for t in range(cfg.num_topics)
    ]

    jobs, job_topic = [], {}
    topic_jobs: list[list[str]] = []
    width = len(str(cfg.num_topics * cfg.jobs_per_topic))
    for t, block in enumerate(blocks):
        templates = [rng.choice(block, size=cfg.doc_length) for _ in range(cfg.companies_per_topic)]
        ids = []
        for i in range(cfg.jobs_per_topic):
            job_id = f"j{t * cfg.jobs_per_topic + i:0{width}d}"
            template = templates[i % cfg.companies_per_topic]
            text = []
            for pos in range(cfg.doc_length):
                r = rng.random()
                if r < cfg.template_reuse:
                    text.append(template[pos])
                elif r < cfg.template_reuse + 0.1:
                    text.append(shared[rng.integers(len(shared))])
                else:
                    text.append(block[rng.integers(len(block))])
            created = _EPOCH_START - int(rng.integers(0, 60 * _DAY))
            jobs.append({"id": job_id, "description": " ".join(text), "created_at": created, "topic": t})
            job_topic[job_id] = t
            ids.append(job_id)
        topic_jobs.append(ids)

    ranks = np.arange(1, cfg.jobs_per_topic + 1, dtype=np.float64) ** -cfg.popularity_skew
    popularity = []
    for ids in topic_jobs:
        order = rng.permutation(len(ids))
        weights = np.empty(len(ids))
        weights[order] = ranks
        popularity.append(weights / weights.sum())

    uwidth = len(str(cfg.users))
    rows, home_topic = [], {}
    for n in range(cfg.users):
        user = f"u{n:0{uwidth}d}"
        home = int(rng.integers(cfg.num_topics))
        home_topic[user] = home
        ts = _EPOCH_START + int(rng.integers(0, 30 * _DAY))
        first_seen: dict[str, int] = {}
        for _ in range(cfg.views_per_user):
            topic = home
            if cfg.num_topics > 1 and rng.random() < cfg.noise_rate:
                topic = int((home + rng.integers(1, cfg.num_topics)) % cfg.num_topics)
            job = topic_jobs[topic][rng.choice(cfg.jobs_per_topic, p=popularity[topic])]
            ts += int(rng.integers(60, 6 * 3600))
            rows.append((user, job, ts, "view"))
            first_seen.setdefault(job, ts)
        for job, seen_at in first_seen.items():
            if rng.random() < cfg.apply_rate:
                rows.append((user, job, seen_at + int(rng.integers(1, 600)), "apply"))

    jobs_path, interactions_path = Path(jobs_path), Path(interactions_path)
    users_path = Path(users_path) if users_path else interactions_path.with_name("users.csv")
    for p in (jobs_path, interactions_path, users_path):
        p.parent.mkdir(parents=True, exist_ok=True)
    with open(jobs_path, "w", encoding="utf-8", newline="\n") as fh:
        for job in jobs:
            fh.write(json.dumps(job, ensure_ascii=False, sort_keys=True) + "\n")
    with open(interactions_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(corpus.INTERACTION_HEADER)
        writer.writerows(rows)
    with open(users_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "home_topic"])
        writer.writerows(sorted(home_topic.items()))
    return SynthResult(jobs_path, interactions_path, users_path, job_topic, home_topic)


@dataclass(frozen=True)
class ExperimentConfig:
    jobs: str = "data/jobs.jsonl"
    interactions: str = "data/interactions.csv"
    output: str = "report.csv"
    model: str | None = None
    ks: tuple[int, ...] = (3, 6)
    dims: tuple[int, ...] = (100, 200, 300)
    window: int = 20
    negatives: int = 10
    epochs: int = 20
    learning_rate: float = 0.025
    min_learning_rate: float = 0.0001
    min_count: int = 2
    decay: float = 0.5
    min_age: int = 1
    k_nn: int = 50
    min_history: int = 11
    holdout: int = 10
    hybrid_cf_first: bool = False
    seed: int = 42

    def __post_init__(self):
        if not self.ks or any(k < 1 for k in self.ks):
            raise ConfigError("ks must be a non-empty list of positive counts")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ConfigError("dims must be a non-empty list of positive dimensions")
        paths = [p for p in (self.jobs, self.interactions, self.output, self.model) if p]
        if len(set(map(os.path.abspath, paths))) != len(paths):
            raise ConfigError("jobs, interactions, output and model paths must be distinct")
        if self.k_nn < 1:
            raise ConfigError("k_nn must be >= 1")
        if self.min_history <= self.holdout:
            raise ConfigError("min_history must exceed holdout")
        self.train_config(self.dims[0])
        BLLConfig(reference_time=1, decay=self.decay, min_age=self.min_age)

    def train_config(self, dim: int) -> TrainConfig:
        try:
            return TrainConfig(
                dim=dim, window=self.window, negatives=self.negatives, epochs=self.epochs,
                learning_rate=self.learning_rate, min_learning_rate=self.min_learning_rate,
                min_count=self.min_count, seed=derive_seed(self.seed, f"train:d{dim}"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def model_path(self, dim: int) -> str | None:
        if not self.model:
            return None
        return self.model.format(dim=dim) if "{dim}" in self.model else f"{self.model}.d{dim}"


# ---------------------------------------------------------------------------
# configuration files: ``key = value`` under ``[section]`` headers

def _int_list(text):
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).replace(" ", "").split(",") if x)


def _bool(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_str(text):
    return str(text) if text not in (None, "") else None


SECTIONS = {
    "paths": {"jobs": str, "interactions": str, "output": str, "model": _opt_str, "users_file": _opt_str},
    "experiment": {"ks": _int_list, "dims": _int_list, "k_nn": int, "seed": int, "min_history": int,
                   "holdout": int, "hybrid_cf_first": _bool},
    "train": {"window": int, "negatives": int, "epochs": int, "learning_rate": float,
              "min_learning_rate": float, "min_count": int},
    "bll": {"decay": float, "min_age": int},
    "synth": {"num_topics": int, "jobs_per_topic": int, "users": int, "views_per_user": int,
              "apply_rate": float, "vocab_per_topic": int, "popularity_skew": float, "shared_vocab": int,
              "doc_length": int, "companies_per_topic": int, "template_reuse": float, "noise_rate": float},
}
KEYS = {key: conv for section in SECTIONS.values() for key, conv in section.items()}


def resolve_settings(path=None, overrides=None, environ=None) -> dict:
    """Merge config file, ``EMBREC_*`` environment variables and explicit overrides.

    Later sources win. Only keys that are set somewhere appear in the result.
    """
    raw: dict[str, object] = {}
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(f"{path}: unknown section [{section}]")
            for key, value in parser.items(section):
                if key not in SECTIONS[section]:
                    raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
                raw[key] = value
    environ = os.environ if environ is None else environ
    for key in KEYS:
        env_key = ENV_PREFIX + key.upper()
        if env_key in environ:
            raw[key] = environ[env_key]
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KEYS:
            raise ConfigError(f"unknown setting {key!r}")
        raw[key] = value
    settings = {}
    for key, value in raw.items():
        try:
            settings[key] = KEYS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return settings


def experiment_config(settings: dict) -> ExperimentConfig:
    names = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in settings.items() if k in names})


def synth_config(settings: dict) -> SynthConfig:
    names = {f.name for f in fields(SynthConfig)}
    return SynthConfig(**{k: v for k, v in settings.items() if k in names})


# ---------------------------------------------------------------------------
# experiment pipeline

@dataclass
class ExperimentResult:
    report: EvaluationReport
    table: str
    split: corpus.SplitDataset
    recommenders: list = field(repr=False)
    models: dict = field(repr=False)
    hybrid_dim: int = None
    seconds: float = 0.0


class stage:
    """Re-raise anything escaping the block as a :class:`StageError` naming the stage."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        log.info("stage %s", self.name)

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, (StageError, KeyboardInterrupt)):
            raise StageError(self.name, exc) from exc
        return False


def load_split(config: ExperimentConfig):
    with stage("load_jobs"):
        jobs = corpus.load_jobs(config.jobs)
    with stage("load_interactions"):
        data = corpus.load_interactions(config.interactions, jobs)
    with stage("split"):
        parts = corpus.split(data, config.min_history, config.holdout)
    return data, parts


def train_models(jobs, config: ExperimentConfig, dims=None) -> dict:
    docs = [(job.job_id, textproc.tokenize(job.description)) for job in sorted(jobs, key=lambda j: j.job_id)]
    models = {}
    for dim in dims or config.dims:
        with stage("train"):
            models[dim] = train(docs, config.train_config(dim))
            path = config.model_path(dim)
            if path:
                save_model(models[dim], path)
    return models


def run_experiment(config: ExperimentConfig, write=True) -> ExperimentResult:
    """load -> split -> fit every approach -> evaluate at each k -> CSV and table.

    The hybrid interleaves the BLL variant with the best mean Novelty* across
    ``ks`` (smaller dim on ties) with CF.
    """
    started = time.perf_counter()
    _, parts = load_split(config)
    train_data = parts.train
    models = train_models(train_data.jobs, config)

    with stage("fit"):
        bll = BLLConfig(reference_time=parts.split_time + 1, decay=config.decay, min_age=config.min_age)
        cf = UserKNN(train_data, config.k_nn)
        recs = [MostPopular(train_data), ContentBased(train_data), cf]
        by_strategy = {}
        for strategy in Strategy:
            for dim in config.dims:
                rec = EmbeddingRecommender(train_data, models[dim], strategy, bll)
                by_strategy[strategy, dim] = rec
                recs.append(rec)

    with stage("evaluate"):
        content = content_vectors(train_data)
        target = applied_novelty(train_data)
        report = evaluate(parts, recs, config.ks, content=content, target=target)
        bll_scores = {
            dim: np.mean([report.get(by_strategy[Strategy.BLL, dim].name, k).novelty_star for k in config.ks])
            for dim in config.dims
        }
        best = min(config.dims, key=lambda d: (-bll_scores[d], d))
        pair = (cf, by_strategy[Strategy.BLL, best])
        hybrid = RoundRobinHybrid(*(pair if config.hybrid_cf_first else pair[::-1]))
        report.rows.extend(evaluate(parts, [hybrid], config.ks, content=content, target=target).rows)
        recs.append(hybrid)

    table = report.render()
    if write:
        with stage("write_report"):
            report.to_csv(config.output)
    return ExperimentResult(report, table, parts, recs, models, best, time.perf_counter() - started)
