"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed together at the end
of the pytest run (see ``conftest.py``). Run just this suite with::

    pytest tests/test_acceptance.py -v
"""

import filecmp
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import binom

from lexclean.assoc import Lexicon, build_initial_lexicon, count_cooccurrences
from lexclean.cli import main
from lexclean.corpus import Corpus
from lexclean.eval import GeneratorConfig, exact_precision, generate_bitext, measure_recall, precision_at_recall
from lexclean.linker import align_lexicon, link_segment
from lexclean.mixture import (
    MixtureParams,
    binomial_log_pmf,
    estimate_params,
    likelihood_ratio_log,
)
from lexclean.pipeline import CutoffSpec, apply_cutoff, clean, greedy_baseline

RESULTS: list[str] = []

# tolerances
RECOVERY_TOL = 0.01
RECOVERY_SECONDS = 10.0
GRID_SLACK = 1e-6
RATIO_TOL = 1e-9
IDENTITY_TOL = 1e-12
PRECISION_1_1 = 0.95
RECALL_1_1 = 85.0
PRECISION_3_3 = 0.99

# frozen from the first seed-42 run of the canonical configuration
FROZEN = {
    "iterations": 3,
    "final_entries": 1523,
    "lambda_wrong_final": 0.08345129227897988,
    "precision_1_1": 0.9802371541501976,
    "recall_1_1": 99.94984954864594,
    "precision_3_3": 0.9978858350951374,
    "recall_3_3": 94.88465396188566,
    "baseline_precision": 0.5107913669064749,
}


def record(cid: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"{'PASS' if ok else 'FAIL'} {cid}: {detail}")
    assert ok, detail


# -- 1 ---------------------------------------------------------------------

def _simulate_tallies(seed=2024, size=10_000, n=20, tau=0.3, lr=0.95, lw=0.02):
    rng = np.random.default_rng(seed)
    right = rng.random(size) < tau
    k = rng.binomial(n, np.where(right, lr, lw))
    return np.column_stack([k, np.full(size, n)])


def test_c1_mixture_recovery():
    data = _simulate_tallies()
    t0 = time.perf_counter()
    p = estimate_params(data)
    elapsed = time.perf_counter() - t0
    # collapse to distinct (k, n) rows for the grid oracle
    rows, counts = np.unique(data, axis=0, return_counts=True)
    grid_r = np.linspace(0.80, 0.999, 200)
    grid_w = np.linspace(0.001, 0.2, 200)
    lam = p.lam
    # independent grid oracle straight from scipy's binomial pmf
    tau = (lam - grid_w[None, :, None]) / (grid_r[:, None, None] - grid_w[None, :, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        mix = tau * binom.pmf(rows[:, 0], rows[:, 1], grid_r[:, None, None]) \
            + (1 - tau) * binom.pmf(rows[:, 0], rows[:, 1], grid_w[None, :, None])
        grid = (np.log(mix) * counts).sum(axis=2)
    feasible = (grid_w[None, :] < lam) & (lam <= grid_r[:, None])
    best_grid = float(np.max(np.where(feasible, grid, -np.inf)))
    ok = (abs(p.lambda_right - 0.95) <= RECOVERY_TOL and abs(p.lambda_wrong - 0.02) <= RECOVERY_TOL
          and elapsed < RECOVERY_SECONDS and best_grid <= p.log_data_prob + GRID_SLACK)
    record("C1 mixture recovery", ok,
           f"lambda_right={p.lambda_right:.4f} lambda_wrong={p.lambda_wrong:.4f} (tol {RECOVERY_TOL}), "
           f"{elapsed:.3f}s (< {RECOVERY_SECONDS}s), best grid {best_grid:.6f} vs fit {p.log_data_prob:.6f}")


# -- 2 ---------------------------------------------------------------------

def test_c2_log_ratio_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        lw, lr = np.sort(rng.uniform(1e-6, 1 - 1e-6, 2))
        params = MixtureParams(float(lr), float(lw), 0.5, float((lr + lw) / 2), 1, 2, 0.0)
        for n in range(51):
            ks = np.arange(n + 1)
            got = likelihood_ratio_log(ks, np.full(n + 1, n), params)
            want = [binomial_log_pmf(k, n, lr) - binomial_log_pmf(k, n, lw) for k in range(n + 1)]
            worst = max(worst, float(np.max(np.abs(got - want))))
    record("C2 log-likelihood-ratio identity", worst <= RATIO_TOL,
           f"max |difference| {worst:.3e} over 0<=k<=n<=50, 100 parameter pairs (tol {RATIO_TOL:g})")


# -- 3 ---------------------------------------------------------------------

def _oracle_links(src, tgt, scores):
    free_s, free_t = set(range(len(src))), set(range(len(tgt)))
    links = []
    while True:
        cands = sorted(
            (-scores[(src[i], tgt[j])], src[i], tgt[j], i, j)
            for i in free_s for j in free_t if (src[i], tgt[j]) in scores
        )
        if not cands:
            return sorted(links)
        _, s, t, i, j = cands[0]
        links.append((i, j, s, t))
        free_s.discard(i)
        free_t.discard(j)


def test_c3_linking_oracle():
    rng = np.random.default_rng(11)
    src_words, tgt_words = list("abcde"), list("vwxyz")
    mismatches = 0
    for _ in range(1000):
        src = list(rng.choice(src_words, rng.integers(0, 7)))
        tgt = list(rng.choice(tgt_words, rng.integers(0, 7)))
        scores = {}
        for s in src_words:
            for t in tgt_words:
                if rng.random() < 0.5:
                    # coarse values make ties common
                    scores[(s, t)] = float(rng.integers(-2, 5))
        corpus = Corpus.from_pairs([(src, tgt)])
        lex = align_lexicon(Lexicon.from_entries([(s, t, v, 0, 0) for (s, t), v in scores.items()]), corpus)
        sw, tw = corpus.source_vocab.words, corpus.target_vocab.words
        got = sorted((l.i, l.j, sw[l.v], tw[l.w]) for l in link_segment(corpus[0], lex).links)
        mismatches += got != _oracle_links(src, tgt, scores)
    record("C3 linking oracle", mismatches == 0, f"{mismatches} mismatches in 1000 random segment pairs")


# -- canonical run -----------------------------------------------------------

@pytest.fixture(scope="module")
def canonical():
    corpus, truth = generate_bitext(GeneratorConfig(seed=42))
    table = count_cooccurrences(corpus)
    lexicon, history = clean(corpus, build_initial_lexicon(table), table=table)
    return corpus, truth, table, lexicon, history


def test_c4_iteration_trends(canonical):
    _, _, _, _, history = canonical
    lw = [r.lambda_wrong for r in history]
    sizes = [r.entries_in_lexicon for r in history]
    mean_ll = [r.mean_entry_log_likelihood for r in history]
    ok = (all(b <= a for a, b in zip(lw, lw[1:]))
          and all(b <= a for a, b in zip(sizes, sizes[1:]))
          and all(b >= a for a, b in zip(mean_ll[1:], mean_ll[2:]))
          and history.converged and len(history) <= 10)
    record("C4 iteration trends", ok,
           f"{len(history)} iterations, fixed point={history.converged}, lambda_wrong "
           f"{', '.join(f'{x:.6f}' for x in lw)}, entries {sizes}, "
           f"mean log-likelihood {' '.join(f'{x:.4f}' for x in mean_ll)}")


def _quality(canonical):
    corpus, truth, table, lexicon, _ = canonical
    gold = set(truth.pairs)
    out = {}
    for preset in ("1/1", "3/3"):
        cut = apply_cutoff(lexicon, CutoffSpec.parse(preset))
        out[preset] = exact_precision(cut, gold), measure_recall(cut, corpus).combined.percent
    return out


def test_c5_closed_loop_quality(canonical):
    q = _quality(canonical)
    (p1, r1), (p3, r3) = q["1/1"], q["3/3"]
    ok = p1 >= PRECISION_1_1 and r1 >= RECALL_1_1 and p3 >= PRECISION_3_3 and r3 < r1
    record("C5 closed-loop quality", ok,
           f"1/1 precision {p1:.4f} (>= {PRECISION_1_1}) recall {r1:.2f}% (>= {RECALL_1_1}); "
           f"3/3 precision {p3:.4f} (>= {PRECISION_3_3}) recall {r3:.2f}% (< 1/1)")


def test_c5_frozen_regression(canonical):
    _, _, _, lexicon, history = canonical
    q = _quality(canonical)
    got = {
        "iterations": len(history),
        "final_entries": len(lexicon),
        "lambda_wrong_final": history[-1].lambda_wrong,
        "precision_1_1": q["1/1"][0],
        "recall_1_1": q["1/1"][1],
        "precision_3_3": q["3/3"][0],
        "recall_3_3": q["3/3"][1],
    }
    drift = {k: (v, FROZEN[k]) for k, v in got.items() if not math.isclose(v, FROZEN[k], rel_tol=1e-9)}
    record("C5 frozen regression values", not drift, f"drift: {drift}" if drift else "all values match")


def test_c6_beats_greedy_baseline(canonical):
    corpus, truth, table, lexicon, _ = canonical
    p1, r1 = _quality(canonical)["1/1"]
    baseline = greedy_baseline(corpus, -math.inf, table)
    bp, br, taken = precision_at_recall(baseline, set(truth.pairs), corpus, r1)
    ok = bp < p1 and br >= r1 and math.isclose(bp, FROZEN["baseline_precision"], rel_tol=1e-9)
    record("C6 cleaning beats the greedy baseline", ok,
           f"baseline precision {bp:.4f} at recall {br:.2f}% ({taken} entries) vs cleaned {p1:.4f} at {r1:.2f}%")


# -- 7 ---------------------------------------------------------------------

def _run_all(root: Path, workers: int, bitext: Path, gold: Path) -> Path:
    out = root / f"w{workers}"
    common = ["--workers", str(workers)]
    assert main(["clean", "--corpus", str(bitext), "--out", str(out / "clean"), "--dump-links",
                 "--plateau", "1/1", *common]) == 0
    assert main(["induce", "--corpus", str(bitext), "--out", str(out / "induce"), *common]) == 0
    assert main(["baseline", "--corpus", str(bitext), "--threshold", "10", "--out", str(out / "base"), *common]) == 0
    assert main(["eval", "--corpus", str(bitext), "--lexicon", str(out / "clean" / "lexicon.tsv"),
                 "--gold", str(gold), "--plateau", "2/2", "--out", str(out / "eval"), *common]) == 0
    return out


def _tree(path: Path) -> dict[str, bytes]:
    return {str(p.relative_to(path)): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_c7_determinism(tmp_path):
    assert main(["synth", "--segments", "8000", "--pairs", "300", "--seed", "42", "--out", str(tmp_path / "s")]) == 0
    assert main(["synth", "--segments", "8000", "--pairs", "300", "--seed", "42", "--out", str(tmp_path / "s2")]) == 0
    bitext, gold = tmp_path / "s" / "bitext.txt", tmp_path / "s" / "gold.tsv"
    same_corpus = filecmp.cmp(bitext, tmp_path / "s2" / "bitext.txt", shallow=False)
    trees = {}
    for w in (1, 2, 3):
        trees[w] = _tree(_run_all(tmp_path, w, bitext, gold))
    trees["1b"] = _tree(_run_all(tmp_path / "again", 1, bitext, gold))
    # config.resolved records the worker count and output path by design
    strip = lambda t: {k: v for k, v in t.items() if not k.endswith("config.resolved")}
    ref = strip(trees[1])
    differing = sorted({k for t in trees.values() for k, v in strip(t).items() if ref.get(k) != v}
                       | {k for t in trees.values() for k in set(ref) ^ set(strip(t))})
    ok = same_corpus and not differing and len(ref) > 10
    record("C7 determinism", ok,
           f"{len(ref)} output files compared across workers 1/2/3 and a repeat run; "
           f"differing: {differing or 'none'}; synthetic corpora identical: {same_corpus}")


# -- 8 ---------------------------------------------------------------------

def test_c8_parameter_identities(canonical, tmp_path):
    _, _, table, lexicon, _ = canonical
    estimates = [lexicon.params]
    estimates += [estimate_params(_simulate_tallies(seed=s, size=2000)) for s in range(5)]
    with pytest.warns(RuntimeWarning):
        estimates.append(estimate_params([[3, 3], [2, 2]]))
    estimates.append(estimate_params([[1, 1], [0, 1]]))
    worst, exact = 0.0, True
    for p in estimates:
        exact &= p.lam == p.K / p.N
        worst = max(worst, abs(p.tau * p.lambda_right + (1 - p.tau) * p.lambda_wrong - p.lam))
    record("C8 parameter identities", exact and worst <= IDENTITY_TOL,
           f"{len(estimates)} estimates: lambda == K/N exactly: {exact}; "
           f"max |tau*lambda_right + (1-tau)*lambda_wrong - lambda| = {worst:.2e} (tol {IDENTITY_TOL:g})")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
