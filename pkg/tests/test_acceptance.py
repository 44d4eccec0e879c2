"""Acceptance criteria, one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
Every check returns ``(ok, detail)``; the pytest wrapper prints the line and
asserts ``ok``.
"""

import functools
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from conftest import fixed_model, history  # noqa: E402
from jobrec.corpus import DatasetStats  # noqa: E402
from jobrec.embedding import nearest, negative_sampling_gradient, negative_sampling_loss  # noqa: E402
from jobrec.harness import ExperimentConfig, SynthConfig, run_experiment, synth  # noqa: E402
from jobrec.metrics import (  # noqa: E402
    PopularityTable, diversity_at_k, evaluate, ndcg_at_k, novelty_at_k, novelty_star,
)
from jobrec.profile import BLLConfig, Strategy, bll_activation, reference_vector, softmax_weights  # noqa: E402
from jobrec.recommend import ContentBased, EmbeddingRecommender, RandomRecommender, UserKNN  # noqa: E402
from jobrec.textproc import SparseVector  # noqa: E402

# (approach, k, novelty, reported novelty*) for a production job portal
REPORTED = [
    ("MP", 3, 0.1649, 0.5849), ("MP", 6, 0.1857, 0.6057),
    ("CBF", 3, 0.7676, 0.8124), ("CBF", 6, 0.7835, 0.7965),
    ("CF", 3, 0.3518, 0.7718), ("CF", 6, 0.3660, 0.7860),
    ("LAST d=100", 3, 0.7469, 0.8331), ("LAST d=100", 6, 0.7639, 0.8161),
    ("LAST d=200", 3, 0.7389, 0.8411), ("LAST d=200", 6, 0.7588, 0.8212),
    ("LAST d=300", 3, 0.7352, 0.8448), ("LAST d=300", 6, 0.7594, 0.8206),
    ("AVG d=100", 3, 0.7525, 0.8275), ("AVG d=100", 6, 0.7656, 0.8144),
    ("AVG d=200", 3, 0.7870, 0.7930), ("AVG d=200", 6, 0.7750, 0.8050),
    ("AVG d=300", 3, 0.8085, 0.7715), ("AVG d=300", 6, 0.7797, 0.8003),
    ("BLL d=100", 3, 0.7300, 0.8500), ("BLL d=100", 6, 0.7478, 0.8322),
    ("BLL d=200", 3, 0.7516, 0.8284), ("BLL d=200", 6, 0.7525, 0.8275),
    ("BLL d=300", 3, 0.7609, 0.8191), ("BLL d=300", 6, 0.7578, 0.8222),
    ("Mixed Hybrid", 3, 0.4531, 0.8731), ("Mixed Hybrid", 6, 0.5378, 0.9578),
]

E2E_SYNTH = SynthConfig(num_topics=2, jobs_per_topic=100, users=300, views_per_user=30, seed=42)


def hypothesis_holds(test):
    try:
        test()
    except AssertionError as exc:
        return False, str(exc).splitlines()[0] if str(exc) else "falsified"
    return True, None


# 1 -------------------------------------------------------------------------
def check_novelty_star_table():
    worst = max(abs(novelty_star(n, 0.58) - printed) for _, _, n, printed in REPORTED)
    return worst <= 5e-4, f"{len(REPORTED)} pairs, max |error| = {worst:.2e} (tol 5e-4)"


# 2 -------------------------------------------------------------------------
def check_sparsity():
    s = DatasetStats(users=3011, jobs=2345, interactions=140411)
    pct = 100 * s.sparsity
    return abs(pct - 98.01) <= 0.01, f"sparsity = {pct:.4f}% (want 98.01 +- 0.01)"


# 3 -------------------------------------------------------------------------
def check_bll():
    single = bll_activation(history([("j", 0)]), "j", BLLConfig(reference_time=100, decay=0.5))
    double = bll_activation(history([("j", 99), ("j", 99)]), "j", BLLConfig(reference_time=100, decay=0.5))
    units = abs(single - -2.302585) <= 1e-6 and abs(double - 0.693147) <= 1e-6

    times = st.lists(st.integers(1, 10**6), min_size=1, max_size=20)

    @settings(max_examples=1000, derandomize=True, deadline=None)
    @given(times, st.integers(1, 10**5), st.floats(0.05, 2.0))
    def recency(ts, shift, decay):
        # moving every view closer to the reference time never lowers activation
        ref = max(ts) + shift + 1
        cfg = BLLConfig(reference_time=ref, decay=decay)
        older = bll_activation(history([("j", t) for t in ts]), "j", cfg)
        newer = bll_activation(history([("j", t + shift) for t in ts]), "j", cfg)
        assert newer >= older

    @settings(max_examples=1000, derandomize=True, deadline=None)
    @given(times, st.integers(1, 10**6), st.floats(0.05, 2.0))
    def frequency(ts, extra, decay):
        # one more view never lowers activation
        cfg = BLLConfig(reference_time=max(ts + [extra]) + 1, decay=decay)
        base = bll_activation(history([("j", t) for t in ts]), "j", cfg)
        more = bll_activation(history([("j", t) for t in ts + [extra]]), "j", cfg)
        assert more > base

    rec_ok, rec_msg = hypothesis_holds(recency)
    freq_ok, freq_msg = hypothesis_holds(frequency)
    detail = (f"single = {single:.7f}, double = {double:.7f}; recency {'ok' if rec_ok else rec_msg}, "
              f"frequency {'ok' if freq_ok else freq_msg} (1000 cases each)")
    return units and rec_ok and freq_ok, detail


# 4 -------------------------------------------------------------------------
def check_softmax():
    rng = np.random.default_rng(4)
    worst_sum = worst_shift = 0.0
    positive = True
    for i in range(1000):
        n = int(rng.integers(1, 30))
        scale = [1.0, 50.0, 500.0][i % 3]
        a = rng.uniform(-scale, scale, n)
        if i % 10 == 0:
            a[: max(1, n // 2)] = rng.choice([-500.0, 500.0], size=max(1, n // 2))
        w = softmax_weights(a)
        shifted = softmax_weights(a + rng.uniform(-100, 100))
        worst_sum = max(worst_sum, abs(w.sum() - 1.0))
        worst_shift = max(worst_shift, float(np.max(np.abs(w - shifted))))
        positive &= bool(np.all(w > 0))
    ok = worst_sum <= 1e-9 and worst_shift <= 1e-12 and positive
    return ok, f"max |sum-1| = {worst_sum:.1e}, max shift diff = {worst_shift:.1e}, all positive = {positive}"


# 5 -------------------------------------------------------------------------
def check_gradient():
    rng = np.random.default_rng(5)
    h, worst = 1e-5, 0.0
    for _ in range(120):
        v, pos = rng.normal(0, 0.5, 8), rng.normal(0, 0.5, 8)
        negs = rng.normal(0, 0.5, (int(rng.integers(1, 11)), 8))
        grads = negative_sampling_gradient(v, pos, negs)
        params = [v, pos, negs]
        for g, p in zip(grads, params):
            num = np.zeros_like(p)
            flat, nflat = p.reshape(-1), num.reshape(-1)
            for i in range(flat.size):
                keep = flat[i]
                flat[i] = keep + h
                up = negative_sampling_loss(*params)
                flat[i] = keep - h
                down = negative_sampling_loss(*params)
                flat[i] = keep
                nflat[i] = (up - down) / (2 * h)
            rel = np.linalg.norm(g - num) / max(np.linalg.norm(g) + np.linalg.norm(num), 1e-12)
            worst = max(worst, rel)
    return worst < 1e-4, f"120 cases, max relative error = {worst:.2e} (tol 1e-4)"


# 6 -------------------------------------------------------------------------
def check_oracles():
    rng = np.random.default_rng(6)
    mismatches = {"nearest": 0, "CF": 0, "CBF": 0}
    for _ in range(50):
        n = int(rng.integers(2, 101))
        # a coarse integer grid produces plenty of exact cosine ties
        vectors = {f"j{i:03d}": rng.integers(-2, 3, 4).astype(float) for i in rng.permutation(n)}
        vectors = {j: v if v.any() else np.ones(4) for j, v in vectors.items()}
        model = fixed_model(vectors)
        query = rng.integers(-2, 3, 4).astype(float) + 0.01
        exclude = {j for j in vectors if rng.random() < 0.2}
        k = int(rng.integers(1, 15))
        got = [j for j, _ in nearest(model, query, k, exclude)]
        mismatches["nearest"] += got != oracles.nearest(vectors, query, k, exclude)

    for _ in range(50):
        data = oracles.random_instance(rng, 100, 50)
        k, k_nn = int(rng.integers(1, 12)), int(rng.integers(1, 20))
        cf, cbf = UserKNN(data, k_nn), ContentBased(data)
        bad_cf = bad_cbf = False
        for user, hist in data.histories().items():
            bad_cf |= cf.recommend(user, k).job_ids != oracles.cf(data, user, set(hist.jobs), k, k_nn)
            bad_cbf |= cbf.recommend(user, k).job_ids != oracles.cbf(cbf.vectors, hist.last_job(), hist.jobs, k)
        mismatches["CF"] += bad_cf
        mismatches["CBF"] += bad_cbf
    ok = not any(mismatches.values())
    return ok, "mismatching instances out of 50 each: " + ", ".join(f"{k}={v}" for k, v in mismatches.items())


# 7 -------------------------------------------------------------------------
def check_metric_values():
    # k=3, ten relevant jobs, the only hit at rank 2
    ndcg = ndcg_at_k(["x", "r0", "y"], {f"r{i}" for i in range(10)}, 3)
    same = SparseVector({0: 0.6, 1: 0.8})
    div = diversity_at_k(["a", "b", "c"], {"a": same, "b": same, "c": same})
    nov = novelty_at_k({"u": ["top", "never"]}, PopularityTable({"top": 9}, 9), 2)
    ok = abs(ndcg - 0.29608) <= 1e-5 and abs(div) <= 1e-12 and abs(nov - 0.5) <= 1e-9
    return ok, f"ndcg = {ndcg:.6f}, diversity = {div:.1e}, novelty = {nov:.12f}"


# 8 -------------------------------------------------------------------------
@functools.lru_cache(maxsize=None)
def end_to_end():
    root = Path(tempfile.mkdtemp(prefix="jobrec-acceptance-"))
    data = synth(E2E_SYNTH, root / "jobs.jsonl", root / "interactions.csv")
    runs = []
    for name in ("first", "second"):
        cfg = ExperimentConfig(jobs=str(root / "jobs.jsonl"), interactions=str(root / "interactions.csv"),
                               output=str(root / f"{name}.csv"), seed=E2E_SYNTH.seed)
        started = time.perf_counter()
        result = run_experiment(cfg)
        runs.append((result, time.perf_counter() - started, (root / f"{name}.csv").read_bytes()))
    return data, runs


def check_end_to_end():
    data, runs = end_to_end()
    result, seconds, csv_bytes = runs[0]
    users = sorted(result.split.test)
    lines, ok = [], True

    ok_a = seconds < 60
    lines.append(f"(a) runtime {seconds:.1f}s < 60s: {ok_a}")

    home = []
    for rec in result.recommenders:
        if isinstance(rec, EmbeddingRecommender) and rec.strategy in (Strategy.LAST, Strategy.BLL):
            slots = [data.job_topic[j] == data.home_topic[u] for u in users for j in rec.recommend(u, 6).job_ids]
            home.append((rec.name, sum(slots) / len(slots)))
    ok_b = all(frac >= 0.85 for _, frac in home)
    lines.append(f"(b) min home-topic share {min(f for _, f in home):.3f} >= 0.85: {ok_b}")

    rand = evaluate(result.split, [RandomRecommender(result.split.train, seed=E2E_SYNTH.seed)], (6,),
                    target=result.report.target_novelty).get("Random", 6).ndcg
    cf = result.report.get("CF", 6).ndcg
    ok_c = cf >= 2 * rand
    lines.append(f"(c) CF nDCG@6 {cf:.4f} >= 2 x random {rand:.4f}: {ok_c}")

    dims = sorted(result.models)
    divs = [(result.report.get(f"Doc2Vec AVG d={d}", 6).diversity,
             result.report.get(f"Doc2Vec LAST d={d}", 6).diversity) for d in dims]
    ok_d = all(avg >= last for avg, last in divs)
    lines.append("(d) AVG vs LAST Diversity@6 " + ", ".join(
        f"d={d}: {a:.4f}/{l:.4f}" for d, (a, l) in zip(dims, divs)) + f": {ok_d}")

    ok_e = csv_bytes == runs[1][2]
    lines.append(f"(e) identical CSV across runs: {ok_e}")
    ok = ok_a and ok_b and ok_c and ok_d and ok_e
    return ok, "; ".join(lines)


# 9 -------------------------------------------------------------------------
def check_single_job_identity():
    rng = np.random.default_rng(9)
    worst, same_lists = 0.0, True
    for _ in range(200):
        vectors = {f"j{i:02d}": rng.normal(size=16) for i in range(20)}
        model = fixed_model(vectors)
        job = f"j{int(rng.integers(20)):02d}"
        times = sorted(int(t) for t in rng.integers(1, 10**6, int(rng.integers(1, 8))))
        hist = history([(job, t) for t in times])
        bll = BLLConfig(reference_time=times[-1] + 1)
        refs = [reference_vector(hist, model, s, bll).values for s in Strategy]
        worst = max(worst, max(float(np.max(np.abs(r - refs[0]))) for r in refs))
        lists = [[j for j, _ in nearest(model, r, 5, exclude=hist.jobs)] for r in refs]
        same_lists &= all(lst == lists[0] for lst in lists)
    return worst <= 1e-12 and same_lists, f"200 histories, max diff = {worst:.1e}, identical lists = {same_lists}"


CRITERIA = [
    ("1 Novelty* consistency with reported results", check_novelty_star_table),
    ("2 dataset sparsity", check_sparsity),
    ("3 BLL unit values and monotonicity", check_bll),
    ("4 softmax contract", check_softmax),
    ("5 negative-sampling gradient check", check_gradient),
    ("6 oracle equivalence (nearest, CF, CBF)", check_oracles),
    ("7 metric hand values", check_metric_values),
    ("8 end-to-end synthetic run", check_end_to_end),
    ("9 single-job composition identity", check_single_job_identity),
]


def run_one(label, check):
    ok, detail = check()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
    return ok, line


@pytest.mark.parametrize("label,check", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(label, check, capsys):
    ok, line = run_one(label, check)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_one(label, check) for label, check in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
