# %% [markdown]
# # A synthetic job portal
#
# Generate a small two-topic portal, load it back, look at the view logs
# and hold out each active user's ten most recently discovered jobs.

# %%
import tempfile
from pathlib import Path

from jobrec import corpus
from jobrec.harness import SynthConfig, synth

workdir = Path(tempfile.mkdtemp(prefix="jobrec-demo-"))
cfg = SynthConfig(num_topics=2, jobs_per_topic=100, users=300, views_per_user=30, seed=42)
result = synth(cfg, workdir / "jobs.jsonl", workdir / "interactions.csv")
print("files:", result.jobs_path.name, result.interactions_path.name, result.users_path.name)

# %% each posting is a JSON line with an id, free text and a topic label
jobs = corpus.load_jobs(result.jobs_path)
print(len(jobs), "postings, e.g.")
print("  ", jobs[0].job_id, "|", jobs[0].description[:90], "...")

# %% interactions are timestamped views plus the occasional apply
data = corpus.load_interactions(result.interactions_path, jobs)
print(corpus.stats(data))
print("apply events:", len(data.applies()))

# %% one user's history, oldest first
user = data.users[0]
hist = data.history(user)
print(user, "home topic", result.home_topic[user], "->",
      [(job, result.job_topic[job]) for job, _ in hist.events[:8]], "...")

# %% popularity is long-tailed within each topic
counts = sorted(data.view_counts().values(), reverse=True)
print("top 5 view counts:", counts[:5], " median:", counts[len(counts) // 2])

# %% temporal holdout: the last 10 distinct jobs of users with >= 11 of them
parts = corpus.split(data, min_history=11, holdout=10)
print("test users:", len(parts.test), " split time:", parts.split_time)
print("train:", corpus.stats(parts.train))
