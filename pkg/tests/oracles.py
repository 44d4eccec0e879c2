"""Brute-force reference implementations used to cross-check the fast paths.

They share only the input types with the package and recompute everything
with plain Python loops over sets and dicts.
"""

import math
from collections import Counter

import numpy as np

from jobrec.corpus import Dataset, Interaction, JobPosting


def tie(score):
    return float(np.round(score, 12))


def popularity_order(train, exclude=()):
    counts = Counter(it.job_id for it in train.views())
    ids = sorted(job.job_id for job in train.jobs)
    return [j for j in sorted(ids, key=lambda j: (-counts[j], j)) if j not in exclude]


def cf(train, target_user, target_jobs, k, k_nn):
    users = {}
    for it in train.views():
        users.setdefault(it.user_id, set()).add(it.job_id)
    sims = []
    for user, jobs in users.items():
        if user == target_user:
            continue
        overlap = len(jobs & target_jobs)
        if overlap:
            sims.append((user, overlap / math.sqrt(len(jobs) * len(target_jobs))))
    sims.sort(key=lambda p: (-tie(p[1]), p[0]))
    neighbors = sims[:k_nn]
    if not neighbors:
        return popularity_order(train, target_jobs)[:k]
    candidates = set().union(*(users[user] for user, _ in neighbors)) - target_jobs
    # summed in neighbor order, the same order a left-to-right accumulation uses
    scores = {job: sum(sim for user, sim in neighbors if job in users[user]) for job in candidates}
    ranked = sorted(scores.items(), key=lambda p: (-tie(p[1]), p[0]))
    return [j for j, _ in ranked[:k]]


def dict_cosine(a, b):
    dot = sum(w * b[i] for i, w in a.items() if i in b)
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    return dot / (na * nb) if na and nb else 0.0


def cbf(vectors, last_job, history_jobs, k):
    query = vectors[last_job].entries
    ranked = sorted(
        ((j, dict_cosine(query, v.entries)) for j, v in vectors.items() if j not in history_jobs),
        key=lambda p: (-tie(p[1]), p[0]),
    )
    return [j for j, _ in ranked[:k]]


def nearest(vectors, query, k, exclude):
    out = []
    qn = math.sqrt(sum(float(x) ** 2 for x in query))
    for job, vec in vectors.items():
        if job in exclude:
            continue
        vn = math.sqrt(sum(float(x) ** 2 for x in vec))
        dot = sum(float(a) * float(b) for a, b in zip(vec, query))
        out.append((job, dot / (vn * qn) if vn and qn else 0.0))
    out.sort(key=lambda p: (-tie(p[1]), p[0]))
    return [j for j, _ in out[:k]]


WORDS = [f"w{i:02d}" for i in range(40)]


def random_instance(rng, max_jobs=100, max_users=50):
    """Small random catalog with short overlapping descriptions and view logs."""
    n_jobs = int(rng.integers(5, max_jobs + 1))
    n_users = int(rng.integers(2, max_users + 1))
    vocab = WORDS[: int(rng.integers(5, len(WORDS)))]
    jobs = tuple(
        JobPosting(f"j{i:03d}", " ".join(rng.choice(vocab, size=int(rng.integers(1, 8)))), 1)
        for i in rng.permutation(n_jobs)
    )
    inters = []
    for u in range(n_users):
        for _ in range(int(rng.integers(0, 12))):
            inters.append(Interaction(f"u{u:02d}", f"j{int(rng.integers(n_jobs)):03d}", int(rng.integers(1, 500))))
    return Dataset(jobs, tuple(inters))
