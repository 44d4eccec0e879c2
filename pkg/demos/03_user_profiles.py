# %% [markdown]
# # Three ways to summarize a user
#
# LAST uses the most recent job, AVG the frequency-weighted mean, and BLL
# weights each job by a recency-and-frequency activation passed through a
# softmax.

# %%
import numpy as np

from jobrec.corpus import UserHistory
from jobrec.embedding import EmbeddingModel, TrainConfig, Vocabulary, nearest
from jobrec.profile import BLLConfig, Strategy, bll_activation, reference_vector, softmax_weights

# a tiny hand-made embedding: two clusters on a circle
angles = {"data-1": 0.0, "data-2": 0.2, "data-3": 0.4, "ops-1": 2.0, "ops-2": 2.2, "ops-3": 2.4}
ids = list(angles)
vectors = np.array([[np.cos(a), np.sin(a)] for a in angles.values()], dtype=np.float32)
model = EmbeddingModel(ids, vectors, Vocabulary(("w",), np.array([1]), np.array([1.0])),
                       np.zeros((1, 2), np.float32), TrainConfig(dim=2))

# %% a user who looked at data-1 many times long ago, then ops-1 once recently
hour = 3600
hist = UserHistory("alice", tuple([("data-1", t * hour) for t in range(1, 6)] + [("ops-1", 48 * hour)]))
cfg = BLLConfig(reference_time=48 * hour + 1, decay=0.5)

# %% activations: recency helps ops-1, frequency helps data-1
acts = {job: bll_activation(hist, job, cfg) for job in sorted(hist.jobs)}
for job, a in acts.items():
    print(f"{job}: activation {a:+.3f}")
print("softmax weights:", {j: round(float(w), 3) for j, w in zip(acts, softmax_weights(list(acts.values())))})

# %% the three reference vectors and what they retrieve
for strategy in Strategy:
    ref = reference_vector(hist, model, strategy, cfg)
    recs = [job for job, _ in nearest(model, ref.values, 3, exclude=hist.jobs)]
    print(f"{strategy.value:>4}: angle {np.arctan2(ref.values[1], ref.values[0]):.2f} rad -> {recs}")

# %% with a single distinct job the three strategies coincide
one = UserHistory("bob", (("ops-2", 10), ("ops-2", 20)))
refs = [reference_vector(one, model, s, BLLConfig(reference_time=21)).values for s in Strategy]
print("identical:", all(np.array_equal(r, refs[0]) for r in refs))
