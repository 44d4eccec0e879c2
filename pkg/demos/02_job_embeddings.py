# %% [markdown]
# # Document vectors for job postings
#
# Train PV-DBOW vectors on the posting texts, watch the loss go down, and
# check that nearest neighbors stay within a topic.

# %%
import tempfile
from pathlib import Path

import numpy as np

from jobrec.embedding import TrainConfig, load_model, nearest, save_model, train
from jobrec.harness import SynthConfig, synth
from jobrec.corpus import load_jobs
from jobrec.textproc import tokenize

workdir = Path(tempfile.mkdtemp(prefix="jobrec-demo-"))
result = synth(SynthConfig(seed=7), workdir / "jobs.jsonl", workdir / "interactions.csv")
jobs = load_jobs(result.jobs_path)
docs = [(job.job_id, tokenize(job.description)) for job in jobs]
print(len(docs), "documents, mean length", np.mean([len(t) for _, t in docs]).round(1), "tokens")

# %% twenty passes over the corpus, 50 dimensions
model = train(docs, TrainConfig(dim=50, epochs=20, seed=7))
print("vocabulary:", len(model.vocab), "words")
print("mean loss per epoch:", np.round(model.epoch_losses, 3))

# %% neighbors of one posting
query = jobs[0].job_id
print("query", query, "topic", result.job_topic[query])
for job_id, sim in nearest(model, model[query], 5, exclude={query}):
    print(f"   {job_id}  cos={sim:.3f}  topic={result.job_topic[job_id]}")

# %% how often is the single nearest neighbor from the same topic?
same = 0
for job_id in model.job_ids:
    (best, _), = nearest(model, model[job_id], 1, exclude={job_id})
    same += result.job_topic[best] == result.job_topic[job_id]
print(f"same-topic nearest neighbor: {same / len(model.job_ids):.1%}")

# %% the binary model file round-trips exactly
path = workdir / "jobs.emb"
save_model(model, path)
again = load_model(path)
print(path.name, path.stat().st_size, "bytes; identical vectors:",
      np.array_equal(again.doc_vectors, model.doc_vectors))
