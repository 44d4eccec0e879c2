"""Job postings, interaction logs, dataset statistics and the holdout split."""

from __future__ import annotations

import csv
import enum
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError

log = logging.getLogger(__name__)

INTERACTION_HEADER = ["user_id", "job_id", "timestamp", "action"]


class Action(enum.Enum):
    VIEW = "view"
    APPLY = "apply"


@dataclass(frozen=True)
class JobPosting:
    job_id: str
    description: str
    created_at: int

    def __post_init__(self):
        if not self.job_id:
            raise DataError("job id must be non-empty")
        if not self.description.strip():
            raise DataError(f"job {self.job_id!r} has an empty description")


@dataclass(frozen=True)
class Interaction:
    user_id: str
    job_id: str
    timestamp: int
    action: Action = Action.VIEW

    def __post_init__(self):
        if self.timestamp <= 0:
            raise DataError(f"timestamp must be positive, got {self.timestamp}")

    @property
    def sort_key(self):
        return (self.timestamp, self.user_id, self.job_id, self.action.value)


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str


@dataclass(frozen=True)
class UserHistory:
    """Time-ordered view events of a single user."""

    user_id: str
    events: tuple[tuple[str, int], ...]

    def __len__(self):
        return len(self.events)

    @property
    def counts(self) -> dict[str, int]:
        out: dict[str, int] = defaultdict(int)
        for job_id, _ in self.events:
            out[job_id] += 1
        return dict(out)

    @property
    def jobs(self) -> frozenset[str]:
        return frozenset(job_id for job_id, _ in self.events)

    def timestamps(self, job_id: str) -> list[int]:
        return [ts for j, ts in self.events if j == job_id]

    def last_job(self) -> str:
        """Most recently viewed job; equal timestamps go to the smaller job id."""
        if not self.events:
            raise ValueError(f"user {self.user_id!r} has an empty history")
        latest = max(ts for _, ts in self.events)
        return min(j for j, ts in self.events if ts == latest)


@dataclass(frozen=True)
class Dataset:
    """Jobs plus interactions, the latter kept in ascending time order.

    Ties in time are broken by ``(user_id, job_id)``.
    """

    jobs: tuple[JobPosting, ...]
    interactions: tuple[Interaction, ...]
    rejected: tuple[Rejection, ...] = ()
    _histories: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(
            self, "interactions", tuple(sorted(self.interactions, key=lambda it: it.sort_key))
        )

    @property
    def job_ids(self) -> list[str]:
        return sorted(job.job_id for job in self.jobs)

    @property
    def users(self) -> list[str]:
        return sorted({it.user_id for it in self.interactions})

    def views(self):
        return [it for it in self.interactions if it.action is Action.VIEW]

    def applies(self):
        return [it for it in self.interactions if it.action is Action.APPLY]

    def histories(self) -> dict[str, UserHistory]:
        """View histories keyed by user id (cached)."""
        if self._histories is None:
            events = defaultdict(list)
            for it in self.views():
                events[it.user_id].append((it.job_id, it.timestamp))
            hist = {u: UserHistory(u, tuple(ev)) for u, ev in sorted(events.items())}
            object.__setattr__(self, "_histories", hist)
        return self._histories

    def history(self, user_id: str) -> UserHistory:
        return self.histories().get(user_id, UserHistory(user_id, ()))

    def view_counts(self) -> dict[str, int]:
        counts: dict[str, int] = defaultdict(int)
        for it in self.views():
            counts[it.job_id] += 1
        return dict(counts)


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    test: dict[str, frozenset[str]]
    split_time: int


@dataclass(frozen=True)
class DatasetStats:
    users: int
    jobs: int
    interactions: int

    @property
    def sparsity(self) -> float:
        cells = self.users * self.jobs
        if cells == 0:
            return 1.0
        return 1.0 - self.interactions / cells

    def __str__(self):
        return (
            f"users={self.users} jobs={self.jobs} interactions={self.interactions} "
            f"sparsity={100 * self.sparsity:.2f}%"
        )


def load_jobs(path) -> list[JobPosting]:
    """Read postings from a JSON Lines file with ``id``, ``description``, ``created_at``."""
    jobs = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                job_id = obj["id"]
                description = obj["description"]
                created_at = obj["created_at"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"cannot parse job posting: {exc}", line=lineno) from None
            if not isinstance(job_id, str) or not isinstance(description, str):
                raise DataError("id and description must be strings", line=lineno)
            if not isinstance(created_at, int) or isinstance(created_at, bool):
                raise DataError("created_at must be an integer", line=lineno)
            if job_id in seen:
                raise DataError(f"duplicate job id {job_id!r}", line=lineno)
            try:
                jobs.append(JobPosting(job_id, description, created_at))
            except DataError as exc:
                raise DataError(str(exc), line=lineno) from None
            seen.add(job_id)
    return jobs


def load_interactions(path, jobs) -> Dataset:
    """Read the interaction CSV.

    Rows naming unknown jobs are not fatal: they are collected into
    ``Dataset.rejected`` and written to ``<stem>.rejected.csv`` beside the input.
    """
    path = Path(path)
    known = {job.job_id for job in jobs}
    interactions = []
    rejected = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError("missing header", line=1)
        if [h.strip() for h in header] != INTERACTION_HEADER:
            raise DataError(f"expected header {','.join(INTERACTION_HEADER)}", line=1)
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"expected 4 fields, got {len(row)}", line=lineno)
            user_id, job_id, ts, action = (x.strip() for x in row)
            if not user_id or not job_id:
                raise DataError("empty user or job id", line=lineno)
            try:
                ts = int(ts)
            except ValueError:
                raise DataError(f"bad timestamp {ts!r}", line=lineno) from None
            try:
                act = Action(action)
            except ValueError:
                raise DataError(f"unknown action {action!r}", line=lineno) from None
            if job_id not in known:
                rejected.append(Rejection(lineno, f"unknown job id {job_id}"))
                continue
            try:
                interactions.append(Interaction(user_id, job_id, ts, act))
            except DataError as exc:
                raise DataError(str(exc), line=lineno) from None

    if rejected:
        report = path.with_suffix(".rejected.csv")
        log.warning("%d interaction rows rejected, see %s", len(rejected), report)
        with open(report, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["line", "reason"])
            for rej in rejected:
                writer.writerow([rej.line, rej.reason])
    return Dataset(tuple(jobs), tuple(interactions), tuple(rejected))


def split(data: Dataset, min_history: int = 11, holdout: int = 10) -> SplitDataset:
    """Temporal holdout of each eligible user's most recently discovered jobs.

    A user is eligible with at least ``min_history`` distinct viewed jobs.
    The ``holdout`` jobs with the latest first-view time (ties to the larger
    job id, so the kept set is the lexicographically smaller one) move to the
    test set along with every view of them. Apply events always stay in train.
    """
    if min_history <= holdout:
        raise ValueError("min_history must exceed holdout")

    first_view: dict[str, dict[str, int]] = defaultdict(dict)
    for it in data.views():
        first_view[it.user_id].setdefault(it.job_id, it.timestamp)

    test: dict[str, frozenset[str]] = {}
    for user, firsts in sorted(first_view.items()):
        if len(firsts) < min_history:
            continue
        order = sorted(firsts.items(), key=lambda kv: (kv[1], kv[0]))
        test[user] = frozenset(job for job, _ in order[-holdout:])

    train = [
        it
        for it in data.interactions
        if not (it.action is Action.VIEW and it.job_id in test.get(it.user_id, ()))
    ]
    split_time = max((it.timestamp for it in train), default=0)
    return SplitDataset(Dataset(data.jobs, tuple(train)), test, split_time)


def stats(data: Dataset) -> DatasetStats:
    """Counts over view events; apply events do not contribute."""
    views = data.views()
    return DatasetStats(
        users=len({it.user_id for it in views}),
        jobs=len(data.jobs),
        interactions=len(views),
    )
