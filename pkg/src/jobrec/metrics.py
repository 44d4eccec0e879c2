"""Accuracy and beyond-accuracy metrics for top-k job lists.

* nDCG@k with binary relevance,
* Diversity@k, the mean pairwise ``1 - cosine`` of TF-IDF description vectors,
* Novelty@k, one minus the mean popularity-normalized information content,
* Novelty*@k, ``1 - |N_A - Novelty@k|`` where ``N_A`` is the novelty of the
  jobs users actually applied to.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from itertools import combinations
from pathlib import Path

from . import textproc
from .corpus import Dataset, SplitDataset

DEFAULT_TARGET_NOVELTY = 0.58


@dataclass(frozen=True)
class PopularityTable:
    pop: dict[str, int]
    pop_max: int

    @classmethod
    def from_dataset(cls, data: Dataset) -> "PopularityTable":
        counts = data.view_counts()
        return cls(counts, max(counts.values(), default=0))

    def information(self, job_id: str) -> float:
        """log2(pop + 1) / log2(pop_max + 1); 0 for never-viewed jobs."""
        return math.log2(self.pop.get(job_id, 0) + 1) / math.log2(self.pop_max + 1)


def ndcg_at_k(recommended, relevant, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    relevant = set(relevant)
    if not relevant:
        return 0.0
    dcg = sum(1.0 / math.log2(i + 2) for i, job in enumerate(list(recommended)[:k]) if job in relevant)
    idcg = sum(1.0 / math.log2(i + 2) for i in range(min(k, len(relevant))))
    return dcg / idcg


def diversity_at_k(recommended, content_vectors) -> float:
    items = list(recommended)
    if len(items) < 2:
        return 0.0
    pairs = list(combinations(items, 2))
    total = sum(1.0 - textproc.cosine(content_vectors[a], content_vectors[b]) for a, b in pairs)
    return total / len(pairs)


def novelty_at_k(lists, pops: PopularityTable, k: int) -> float:
    """One minus the mean normalized popularity information, averaged over users.

    ``lists`` maps user id to recommended job ids. Each list is divided by
    ``k`` regardless of its length, so unfilled slots count as fully novel.
    """
    if pops.pop_max == 0:
        return 1.0
    lists = dict(lists)
    if not lists:
        raise ValueError("no recommendation lists")
    total = 0.0
    for user in sorted(lists):
        total += sum(pops.information(j) for j in list(lists[user])[:k]) / k
    return 1.0 - total / len(lists)


def novelty_star(novelty: float, target: float = DEFAULT_TARGET_NOVELTY) -> float:
    if not 0.0 <= target <= 1.0:
        raise ValueError("target novelty must lie in [0, 1]")
    return 1.0 - abs(target - novelty)


def applied_novelty(train: Dataset, default: float = DEFAULT_TARGET_NOVELTY) -> float:
    """Mean novelty of apply events, with popularity taken from training views.

    Falls back to ``default`` when there are no apply events or no views.
    """
    applies = train.applies()
    pops = PopularityTable.from_dataset(train)
    if not applies or pops.pop_max == 0:
        return default
    return sum(1.0 - pops.information(it.job_id) for it in applies) / len(applies)


@dataclass(frozen=True)
class ReportRow:
    approach: str
    k: int
    ndcg: float
    novelty: float
    diversity: float
    novelty_star: float


@dataclass
class EvaluationReport:
    rows: list[ReportRow]
    target_novelty: float

    def __iter__(self):
        return iter(self.rows)

    def get(self, approach: str, k: int) -> ReportRow:
        for row in self.rows:
            if row.approach == approach and row.k == k:
                return row
        raise KeyError((approach, k))

    @property
    def approaches(self) -> list[str]:
        return list(dict.fromkeys(row.approach for row in self.rows))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f.name for f in fields(ReportRow)])
        for row in self.rows:
            writer.writerow([row.approach, row.k] + [f"{v:.4f}" for v in astuple(row)[2:]])
        text = buf.getvalue()
        if path is not None:
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(text.encode("utf-8"))
        return text

    def render(self) -> str:
        width = max([len("approach")] + [len(r.approach) for r in self.rows])
        head = f"{'approach':<{width}} | {'k':>3} | {'nDCG':>6} | {'Novelty':>7} | {'Diversity':>9} | {'Novelty*':>8}"
        lines = [head, "-" * len(head)]
        prev_group = None
        for r in self.rows:
            group = r.approach.split(" d=")[0]
            if prev_group is not None and group != prev_group:
                lines.append("-" * len(head))
            prev_group = group
            lines.append(
                f"{r.approach:<{width}} | {r.k:>3} | {r.ndcg:>6.4f} | {r.novelty:>7.4f} | "
                f"{r.diversity:>9.4f} | {r.novelty_star:>8.4f}"
            )
        return "\n".join(lines)


def content_vectors(data: Dataset) -> dict[str, textproc.SparseVector]:
    tokens = {job.job_id: textproc.tokenize(job.description) for job in data.jobs}
    model = textproc.fit_tfidf([tokens[j] for j in sorted(tokens)])
    return {j: textproc.vectorize(model, t) for j, t in tokens.items()}


def evaluate(split: SplitDataset, recommenders, ks=(3, 6), *, content=None, target=None) -> EvaluationReport:
    """Score every recommender at every k over the test users.

    ``content`` defaults to TF-IDF vectors of the job descriptions and
    ``target`` to the applied-job novelty of the training data.
    """
    users = sorted(split.test)
    if not users:
        raise ValueError("split has no test users")
    if content is None:
        content = content_vectors(split.train)
    if target is None:
        target = applied_novelty(split.train)
    pops = PopularityTable.from_dataset(split.train)
    rows = []
    for rec in recommenders:
        for k in ks:
            lists = {u: rec.recommend(u, k).job_ids for u in users}
            ndcg = sum(ndcg_at_k(lists[u], split.test[u], k) for u in users) / len(users)
            div = sum(diversity_at_k(lists[u], content) for u in users) / len(users)
            nov = novelty_at_k(lists, pops, k)
            rows.append(ReportRow(rec.name, k, ndcg, nov, div, novelty_star(nov, target)))
    return EvaluationReport(rows, target)
