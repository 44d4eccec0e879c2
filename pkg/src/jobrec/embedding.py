"""PV-DBOW document embeddings trained with negative sampling, and exact cosine search.

Each job posting gets one dense vector. Training follows the distributed bag of
words scheme: the document vector is the input, and each word of the document
is a prediction target contrasted against noise words drawn from the
count**0.75 unigram distribution.
"""

from __future__ import annotations

import json
import logging
import struct
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numba
import numpy as np

from .errors import ConfigError, DataError
from .ranking import top_k

log = logging.getLogger(__name__)

REAL = np.float32
NOISE_POWER = 0.75
MAGIC = b"EMB1"


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    counts: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index


def build_vocab(docs, min_count: int = 2) -> Vocabulary:
    """Words seen at least ``min_count`` times, most frequent first (ties alphabetical)."""
    counter: Counter = Counter()
    n_docs = 0
    for _, tokens in docs:
        counter.update(tokens)
        n_docs += 1
    if n_docs == 0:
        raise DataError("cannot build a vocabulary from an empty corpus")
    kept = sorted((w for w, c in counter.items() if c >= min_count), key=lambda w: (-counter[w], w))
    if not kept:
        raise DataError(f"no word occurs at least min_count={min_count} times")
    counts = np.array([counter[w] for w in kept], dtype=np.int64)
    noise = counts.astype(np.float64) ** NOISE_POWER
    noise /= noise.sum()
    return Vocabulary(tuple(kept), counts, noise)


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters; defaults are the published final configuration.

    ``window`` has no effect in pure DBOW, where every word of a document is a
    target. It is kept so configurations from a window grid can be recorded.
    """

    dim: int = 100
    window: int = 20
    negatives: int = 10
    epochs: int = 1
    learning_rate: float = 0.025
    min_learning_rate: float = 0.0001
    min_count: int = 2
    seed: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if self.negatives < 0:
            raise ConfigError("negatives must be >= 0")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.min_count < 1:
            raise ConfigError("min_count must be >= 1")
        if not 0 < self.min_learning_rate <= self.learning_rate:
            raise ConfigError("need 0 < min_learning_rate <= learning_rate")


@dataclass
class EmbeddingModel:
    job_ids: tuple[str, ...]
    doc_vectors: np.ndarray
    vocab: Vocabulary
    word_vectors: np.ndarray
    config: TrainConfig
    epoch_losses: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.job_ids = tuple(self.job_ids)
        self._index = {j: i for i, j in enumerate(self.job_ids)}
        if len(self._index) != len(self.job_ids):
            raise DataError("duplicate job id in embedding model")
        self._unit = None
        self._id_order = None

    @property
    def dim(self):
        return self.doc_vectors.shape[1]

    def __contains__(self, job_id):
        return job_id in self._index

    def __getitem__(self, job_id) -> np.ndarray:
        return self.doc_vectors[self._index[job_id]]

    def index_of(self, job_id):
        return self._index[job_id]

    def unit_vectors(self):
        """Doc vectors scaled to unit length in float64; zero rows stay zero."""
        if self._unit is None:
            vecs = self.doc_vectors.astype(np.float64)
            norms = np.linalg.norm(vecs, axis=1, keepdims=True)
            self._unit = np.divide(vecs, norms, out=np.zeros_like(vecs), where=norms > 0)
        return self._unit

    def id_order(self):
        if self._id_order is None:
            self._id_order = np.argsort(np.argsort(np.array(self.job_ids, dtype=object)))
        return self._id_order


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def negative_sampling_loss(doc_vec, pos, negs) -> float:
    """-ln s(v.u_pos) - sum_n ln s(-v.u_n) for one target word."""
    doc_vec = np.asarray(doc_vec, dtype=np.float64)
    negs = np.asarray(negs, dtype=np.float64).reshape(-1, len(doc_vec))
    loss = -_log_sigmoid(np.dot(doc_vec, pos))
    if len(negs):
        loss -= _log_sigmoid(-(negs @ doc_vec)).sum()
    return float(loss)


def negative_sampling_gradient(doc_vec, pos, negs):
    """Exact gradient of :func:`negative_sampling_loss`.

    Returns ``(grad_doc, grad_pos, grad_negs)`` where ``grad_negs`` has one row
    per negative word.
    """
    doc_vec = np.asarray(doc_vec, dtype=np.float64)
    pos = np.asarray(pos, dtype=np.float64)
    negs = np.asarray(negs, dtype=np.float64).reshape(-1, len(doc_vec))
    g_pos = _sigmoid(np.dot(doc_vec, pos)) - 1.0
    g_neg = _sigmoid(negs @ doc_vec)
    grad_doc = g_pos * pos + g_neg @ negs
    grad_pos = g_pos * doc_vec
    grad_negs = np.outer(g_neg, doc_vec)
    return grad_doc, grad_pos, grad_negs


@numba.njit(cache=True, nogil=True)
def _sgd_document(v, word_vectors, targets, lrs, update_words):
    """One SGD step per row of ``targets`` (positive word first, then negatives)."""
    dim = v.shape[0]
    n_targets = targets.shape[1]
    grad_v = np.empty(dim)
    g = np.empty(n_targets)
    loss = 0.0
    for t in range(targets.shape[0]):
        for j in range(n_targets):
            row = targets[t, j]
            score = 0.0
            for c in range(dim):
                score += v[c] * word_vectors[row, c]
            sig = 0.5 * (1.0 + np.tanh(0.5 * score))
            if j == 0:
                loss -= np.log(max(sig, 1e-30))
                g[j] = (sig - 1.0) * lrs[t]
            else:
                loss -= np.log(max(1.0 - sig, 1e-30))
                g[j] = sig * lrs[t]
        grad_v[:] = 0.0
        for j in range(n_targets):
            row = targets[t, j]
            for c in range(dim):
                grad_v[c] += g[j] * word_vectors[row, c]
        if update_words:
            for j in range(n_targets):
                row = targets[t, j]
                for c in range(dim):
                    word_vectors[row, c] -= g[j] * v[c]
        for c in range(dim):
            v[c] -= grad_v[c]
    return loss


def _encode(docs, vocab):
    return [
        (job_id, np.array([vocab.index[t] for t in tokens if t in vocab.index], dtype=np.int64))
        for job_id, tokens in docs
    ]


def train(docs, config: TrainConfig = TrainConfig(), *, frozen: EmbeddingModel | None = None):
    """Train document vectors with plain sequential SGD.

    Every in-vocabulary token position triggers one update of the document
    vector and of the output vectors of the target word and its negatives. The
    step size decays linearly from ``learning_rate`` to ``min_learning_rate``
    over all scheduled updates.

    With ``frozen``, vocabulary and word vectors are taken from that model and
    left untouched; only the vectors of ``docs`` are fitted, and they are added
    to (or replace) the frozen model's doc vectors in the returned model.
    """
    docs = [(job_id, list(tokens)) for job_id, tokens in docs]
    if not docs:
        raise DataError("cannot train on an empty corpus")
    if frozen is not None:
        if frozen.dim != config.dim:
            raise ConfigError(f"frozen model has dim {frozen.dim}, config asks for {config.dim}")
        vocab = frozen.vocab
        word_vectors = frozen.word_vectors
    else:
        vocab = build_vocab(docs, config.min_count)
        word_vectors = np.zeros((len(vocab), config.dim), dtype=REAL)

    rng = np.random.default_rng(config.seed)
    dim = config.dim
    doc_vectors = ((rng.random((len(docs), dim)) - 0.5) / dim).astype(REAL)
    encoded = _encode(docs, vocab)
    cum_noise = np.cumsum(vocab.noise)
    cum_noise[-1] = 1.0

    total = config.epochs * sum(len(ids) for _, ids in encoded)
    lr0, lr_min = config.learning_rate, config.min_learning_rate
    update_words = frozen is None
    step = 0
    epoch_losses = []
    for epoch in range(config.epochs):
        loss_sum = 0.0
        n_steps = 0
        for d, (_, ids) in enumerate(encoded):
            if len(ids) == 0:
                continue
            draws = np.searchsorted(cum_noise, rng.random((len(ids), config.negatives)), side="right")
            targets = np.column_stack([ids, np.minimum(draws, len(vocab) - 1)])
            lrs = lr0 - (lr0 - lr_min) * (step + np.arange(len(ids))) / total
            loss_sum += _sgd_document(doc_vectors[d], word_vectors, targets, lrs, update_words)
            step += len(ids)
            n_steps += len(ids)
        mean_loss = loss_sum / max(n_steps, 1)
        if not np.isfinite(mean_loss) or not np.all(np.isfinite(doc_vectors)):
            raise FloatingPointError(f"training diverged in epoch {epoch}")
        epoch_losses.append(float(mean_loss))
        log.debug("epoch %d: mean loss %.5f", epoch, mean_loss)

    job_ids = [job_id for job_id, _ in docs]
    if frozen is not None:
        fresh = dict(zip(job_ids, doc_vectors))
        keep = [j for j in frozen.job_ids if j not in fresh]
        job_ids = keep + job_ids
        doc_vectors = np.vstack([frozen.doc_vectors[[frozen.index_of(j) for j in keep]].reshape(-1, dim), doc_vectors])
    return EmbeddingModel(job_ids, doc_vectors, vocab, word_vectors, config, epoch_losses)


def nearest(model: EmbeddingModel, query, k: int, exclude=frozenset()):
    """Exact top-k jobs by cosine similarity to ``query``.

    Ties (within 1e-12) go to the smaller job id. Returns ``(job_id, similarity)`` pairs.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (model.dim,):
        raise ValueError(f"query has shape {query.shape}, model dim is {model.dim}")
    qnorm = np.linalg.norm(query)
    sims = model.unit_vectors() @ (query / qnorm) if qnorm > 0 else np.zeros(len(model.job_ids))
    mask = None
    if exclude:
        mask = np.array([j not in exclude for j in model.job_ids])
    picked = top_k(sims, model.id_order(), k, mask)
    return [(model.job_ids[i], float(sims[i])) for i in picked]


def _put_str(out, text):
    raw = text.encode("utf-8")
    out.append(struct.pack("<I", len(raw)))
    out.append(raw)


def save_model(model: EmbeddingModel, path):
    """Binary layout: ``EMB1``, dim, doc count, docs; word count, words; config JSON.

    Integers are little-endian u32, strings are u32-length-prefixed UTF-8 and
    vectors are little-endian float32.
    """
    dim = model.dim
    out = [MAGIC, struct.pack("<II", dim, len(model.job_ids))]
    docs = model.doc_vectors.astype("<f4")
    for job_id, vec in zip(model.job_ids, docs):
        _put_str(out, job_id)
        out.append(vec.tobytes())
    out.append(struct.pack("<I", len(model.vocab)))
    words = model.word_vectors.astype("<f4")
    for word, count, vec in zip(model.vocab.words, model.vocab.counts, words):
        _put_str(out, word)
        out.append(struct.pack("<I", int(count)))
        out.append(vec.tobytes())
    _put_str(out, json.dumps({"config": asdict(model.config), "epoch_losses": model.epoch_losses}))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(out))


def load_model(path) -> EmbeddingModel:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != MAGIC:
        raise DataError(f"{path}: not an embedding model file")
    pos = 4

    def take(n):
        nonlocal pos
        if pos + n > len(buf):
            raise DataError(f"{path}: truncated model file")
        chunk = buf[pos : pos + n]
        pos += n
        return chunk

    def take_u32():
        return struct.unpack("<I", take(4))[0]

    def take_str():
        return take(take_u32()).decode("utf-8")

    dim, n_docs = struct.unpack("<II", take(8))
    job_ids, docs = [], np.empty((n_docs, dim), dtype=REAL)
    for i in range(n_docs):
        job_ids.append(take_str())
        docs[i] = np.frombuffer(take(4 * dim), dtype="<f4")
    n_words = take_u32()
    words, counts, wvecs = [], [], np.empty((n_words, dim), dtype=REAL)
    for i in range(n_words):
        words.append(take_str())
        counts.append(take_u32())
        wvecs[i] = np.frombuffer(take(4 * dim), dtype="<f4")
    meta = json.loads(take_str())
    counts = np.array(counts, dtype=np.int64)
    noise = counts.astype(np.float64) ** NOISE_POWER
    vocab = Vocabulary(tuple(words), counts, noise / noise.sum())
    return EmbeddingModel(job_ids, docs, vocab, wvecs, TrainConfig(**meta["config"]), meta["epoch_losses"])
