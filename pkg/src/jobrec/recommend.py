"""Top-k recommenders: MP, CBF, user-based CF, embedding strategies and the round-robin hybrid.

Every recommender is fitted on a training :class:`~jobrec.corpus.Dataset` only
and exposes ``recommend(user_id, k)``. Personalized recommenders never return
jobs from the user's own training history; users without one get the
most-popular list.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import textproc
from .corpus import Dataset, UserHistory
from .embedding import EmbeddingModel, nearest
from .profile import BLLConfig, Strategy, reference_vector
from .ranking import top_k


@dataclass(frozen=True)
class RecommendationList:
    user_id: str | None
    items: tuple[tuple[str, float], ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) > self.k:
            raise ValueError("recommendation list longer than k")
        if len({j for j, _ in self.items}) != len(self.items):
            raise ValueError("duplicate job in recommendation list")

    @property
    def job_ids(self) -> list[str]:
        return [j for j, _ in self.items]

    def __len__(self):
        return len(self.items)


class Recommender:
    name = "base"

    def __init__(self, train: Dataset):
        self.train = train
        counts = train.view_counts()
        self._popular = sorted(train.job_ids, key=lambda j: (-counts.get(j, 0), j))
        self._counts = counts

    def popular(self, history: UserHistory | None, k: int) -> RecommendationList:
        """Most-popular fallback, skipping jobs already in ``history``."""
        seen = history.jobs if history is not None else frozenset()
        items = []
        for job_id in self._popular:
            if len(items) == k:
                break
            if job_id not in seen:
                items.append((job_id, float(self._counts.get(job_id, 0))))
        user = history.user_id if history is not None else None
        return RecommendationList(user, items, k)

    def recommend(self, user_id: str, k: int) -> RecommendationList:
        history = self.train.history(user_id)
        if not history.events:
            return RecommendationList(user_id, self.popular(None, k).items, k)
        return self.recommend_history(history, k)

    def recommend_history(self, history: UserHistory, k: int) -> RecommendationList:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"


class MostPopular(Recommender):
    """The same list for everyone, ranked by training view count."""

    name = "MP"

    def recommend(self, user_id, k):
        return RecommendationList(user_id, self.popular(None, k).items, k)

    def recommend_history(self, history, k):
        return self.recommend(history.user_id, k)


class ContentBased(Recommender):
    """TF-IDF similarity to the most recently viewed job."""

    name = "CBF"

    def __init__(self, train: Dataset, tfidf: textproc.TfIdfModel | None = None):
        super().__init__(train)
        self.job_ids = train.job_ids
        by_id = {job.job_id: job for job in train.jobs}
        tokens = [textproc.tokenize(by_id[j].description) for j in self.job_ids]
        self.tfidf = tfidf or textproc.fit_tfidf(tokens)
        self.vectors = {j: textproc.vectorize(self.tfidf, t) for j, t in zip(self.job_ids, tokens)}
        self._index = {j: i for i, j in enumerate(self.job_ids)}
        self._matrix = textproc.to_csr([self.vectors[j] for j in self.job_ids], len(self.tfidf.vocabulary))

    def recommend_history(self, history, k):
        if not history.events:
            return RecommendationList(history.user_id, (), k)
        query = self._index[history.last_job()]
        sims = (self._matrix @ self._matrix[query].T).toarray().ravel()
        mask = np.ones(len(self.job_ids), dtype=bool)
        for job_id in history.jobs:
            mask[self._index[job_id]] = False
        picked = top_k(sims, np.arange(len(self.job_ids)), k, mask)
        return RecommendationList(history.user_id, [(self.job_ids[i], float(sims[i])) for i in picked], k)


class UserKNN(Recommender):
    """User-based collaborative filtering on binary view vectors.

    A candidate's score is the summed cosine similarity of the ``k_nn``
    nearest neighbors that viewed it.
    """

    name = "CF"

    def __init__(self, train: Dataset, k_nn: int = 50):
        super().__init__(train)
        if k_nn < 1:
            raise ValueError("k_nn must be >= 1")
        self.k_nn = k_nn
        self.job_ids = train.job_ids
        self.users = train.users
        self._job_index = {j: i for i, j in enumerate(self.job_ids)}
        self._user_index = {u: i for i, u in enumerate(self.users)}
        self.matrix = np.zeros((len(self.users), len(self.job_ids)), dtype=bool)
        for user, hist in train.histories().items():
            for job_id in hist.jobs:
                self.matrix[self._user_index[user], self._job_index[job_id]] = True
        self.sizes = self.matrix.sum(axis=1)

    def neighbors(self, history: UserHistory):
        """``(user_index, similarity)`` pairs of the nearest users, best first."""
        row = np.zeros(len(self.job_ids), dtype=bool)
        for job_id in history.jobs:
            row[self._job_index[job_id]] = True
        size = row.sum()
        if size == 0:
            return []
        overlap = self.matrix.astype(np.int64) @ row.astype(np.int64)
        denom = np.sqrt((self.sizes * size).astype(np.float64))
        sims = np.divide(overlap, denom, out=np.zeros(len(self.users)), where=denom > 0)
        mask = sims > 0
        me = self._user_index.get(history.user_id)
        if me is not None:
            mask[me] = False
        picked = top_k(sims, np.arange(len(self.users)), self.k_nn, mask)
        return [(int(i), float(sims[i])) for i in picked]

    def recommend_history(self, history, k):
        nbrs = self.neighbors(history)
        if not nbrs:
            return self.popular(history, k)
        scores = np.zeros(len(self.job_ids))
        for idx, sim in nbrs:
            scores[self.matrix[idx]] += sim
        mask = scores > 0
        for job_id in history.jobs:
            mask[self._job_index[job_id]] = False
        picked = top_k(scores, np.arange(len(self.job_ids)), k, mask)
        return RecommendationList(history.user_id, [(self.job_ids[i], float(scores[i])) for i in picked], k)


class EmbeddingRecommender(Recommender):
    """Nearest doc vectors to a LAST, AVG or BLL reference vector."""

    def __init__(self, train, model: EmbeddingModel, strategy: Strategy, bll: BLLConfig | None = None):
        super().__init__(train)
        self.model = model
        self.strategy = Strategy(strategy)
        if self.strategy is Strategy.BLL and bll is None:
            raise ValueError("BLL strategy needs a BLLConfig")
        self.bll = bll
        self.name = f"Doc2Vec {self.strategy.value} d={model.dim}"

    def recommend_history(self, history, k):
        if not history.events:
            return RecommendationList(history.user_id, (), k)
        ref = reference_vector(history, self.model, self.strategy, self.bll)
        items = nearest(self.model, ref.values, k, exclude=history.jobs)
        return RecommendationList(history.user_id, items, k)


def interleave(first, second, k: int):
    """Alternate between two ranked lists starting with ``first``.

    Items already emitted are skipped; once one list runs out the other fills
    the remaining slots.
    """
    sources = [iter(first), iter(second)]
    active = [True, True]
    out, seen = [], set()
    turn = 0
    while len(out) < k and any(active):
        if active[turn]:
            for item in sources[turn]:
                if item[0] not in seen:
                    out.append(item)
                    seen.add(item[0])
                    break
            else:
                active[turn] = False
        turn = 1 - turn
    return out


class RoundRobinHybrid(Recommender):
    name = "Mixed Hybrid"

    def __init__(self, first: Recommender, second: Recommender, name: str | None = None):
        super().__init__(first.train)
        self.first = first
        self.second = second
        if name:
            self.name = name

    def recommend(self, user_id, k):
        a = self.first.recommend(user_id, k)
        b = self.second.recommend(user_id, k)
        return RecommendationList(user_id, interleave(a.items, b.items, k), k)

    def recommend_history(self, history, k):
        a = self.first.recommend_history(history, k)
        b = self.second.recommend_history(history, k)
        return RecommendationList(history.user_id, interleave(a.items, b.items, k), k)


class RandomRecommender(Recommender):
    """Uniform sample of unseen jobs, seeded per user so call order does not matter."""

    name = "Random"

    def __init__(self, train, seed: int = 0):
        super().__init__(train)
        self.seed = seed
        self.job_ids = train.job_ids

    def _rng(self, user_id):
        digest = hashlib.sha256(f"{self.seed}:{user_id}".encode()).digest()
        return np.random.default_rng(int.from_bytes(digest[:8], "little"))

    def recommend(self, user_id, k):
        return self.recommend_history(self.train.history(user_id), k)

    def recommend_history(self, history, k):
        pool = [j for j in self.job_ids if j not in history.jobs]
        picks = self._rng(history.user_id).permutation(len(pool))[:k]
        return RecommendationList(history.user_id, [(pool[i], 0.0) for i in picks], k)


def recommend_mp(train: Dataset, k: int) -> RecommendationList:
    return MostPopular(train).recommend(None, k)


def recommend_cbf(history: UserHistory, cbf: ContentBased, k: int) -> RecommendationList:
    return cbf.recommend_history(history, k)


def recommend_cf(history: UserHistory, train: Dataset, k: int, k_nn: int = 50) -> RecommendationList:
    return UserKNN(train, k_nn).recommend_history(history, k)


def recommend_embed(history, model, strategy, k, bll: BLLConfig | None = None, train=None):
    train = train if train is not None else Dataset((), ())
    return EmbeddingRecommender(train, model, strategy, bll).recommend_history(history, k)


def recommend_hybrid(history: UserHistory, first: Recommender, second: Recommender, k: int):
    return RoundRobinHybrid(first, second).recommend_history(history, k)

