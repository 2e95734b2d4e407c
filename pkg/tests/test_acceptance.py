"""Acceptance criteria, one marked group per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints
one PASS/FAIL line per criterion. Criterion 10 is marked ``slow`` and runs
with ``pytest -m slow tests/test_acceptance.py``.
"""

import hashlib
import io
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import (
    auc_pairwise,
    dnn_oracle,
    hbos_oracle,
    knn_score_oracle,
    lof_oracle,
)
from outlierkit.cli import main
from outlierkit.config import parse_config
from outlierkit.core import Label, fit, score, validate_dataset
from outlierkit.data import (
    BUILTIN_MANIFEST,
    ManifestEntry,
    fetch,
    load_dataset,
    parse_csv,
    write_csv,
)
from outlierkit.detectors.neighbors import KNNDetector
from outlierkit.ensemble import EnsembleConfig, combine, fit_ensemble, predict_labels, predict_proba
from outlierkit.exceptions import ChecksumMismatch
from outlierkit.index import build_index
from outlierkit.metrics import precision_at_n, roc_auc
from outlierkit.split import train_test_split
from outlierkit.transform import apply_calibration, calibrate, classify, normalize, unify


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b))), initial=0.0))


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


# -- 1 ----------------------------------------------------------------------


C1 = criterion(1, "index oracle equivalence (tree == brute, 50 datasets)")


@C1
def test_index_tree_equals_brute():
    gen = np.random.default_rng(1)
    start = time.perf_counter()
    checked = 0
    for _ in range(50):
        n, d = int(gen.integers(1, 501)), int(gen.integers(1, 9))
        pts = gen.normal(size=(n, d))
        if gen.random() < 0.3:  # coarse grid values force many exact ties
            pts = np.round(pts * 2) / 2
        tree, brute = build_index(pts, "tree"), build_index(pts, "brute")
        queries = np.vstack([pts[gen.integers(0, n, size=10)], gen.normal(size=(10, d)) * 1.5])
        for q in queries:
            k = int(gen.integers(1, n + 1))
            a, b = tree.query_knn(q, k), brute.query_knn(q, k)
            assert np.array_equal(a.indices, b.indices) and np.array_equal(a.distances, b.distances)
            r = float(gen.uniform(0.1, 2.0)) * math.sqrt(d)
            a, b = tree.query_radius(q, r), brute.query_radius(q, r)
            assert np.array_equal(a.indices, b.indices) and np.array_equal(a.distances, b.distances)
            checked += 2
        if n > 1:
            k = int(gen.integers(1, n))
            ti, td = tree.knn_batch(None, k, exclude_self=True)
            bi, bd = brute.knn_batch(None, k, exclude_self=True)
            assert np.array_equal(ti, bi) and np.array_equal(td, bd)
            r = float(gen.uniform(0.1, 1.5))
            assert np.array_equal(tree.radius_count_batch(None, r, exclude_self=True),
                                  brute.radius_count_batch(None, r, exclude_self=True))
    elapsed = time.perf_counter() - start
    print(f"criterion 1: {checked} single queries plus batches in {elapsed:.2f}s")
    assert elapsed < 10.0


# -- 2 ----------------------------------------------------------------------


C2 = criterion(2, "detector oracle equivalence within 1e-12 relative")


@C2
def test_detectors_match_naive_formulas():
    gen = np.random.default_rng(2)
    start = time.perf_counter()
    worst = 0.0
    for n, d in ((300, 3), (120, 1), (80, 5)):
        train = gen.normal(size=(n, d))
        train[1] = train[0]  # one exact duplicate
        test = gen.normal(size=(40, d)) * 1.5
        pts, qs = train.tolist(), test.tolist()
        for reduction in ("mean", "maximum", "median"):
            fitted = fit(("knn", {"k": 4, "reduction": reduction}), train)
            worst = max(worst,
                        rel_err(fitted.train_scores, [knn_score_oracle(pts, p, 4, reduction, i) for i, p in enumerate(pts)]),
                        rel_err(score(fitted, test), [knn_score_oracle(pts, q, 4, reduction) for q in qs]))
        fitted = fit(("lof", {"k": 5}), train)
        worst = max(worst, rel_err(fitted.train_scores, lof_oracle(pts, pts, 5, exclude_self=True)),
                    rel_err(score(fitted, test), lof_oracle(pts, qs, 5)))
        radius = 0.5 * math.sqrt(d)
        fitted = fit(("dnn", {"radius": radius}), train)
        worst = max(worst,
                    rel_err(fitted.train_scores, [dnn_oracle(pts, p, radius, i) for i, p in enumerate(pts)]),
                    rel_err(score(fitted, test), [dnn_oracle(pts, q, radius) for q in qs]))
        fitted = fit(("hbos", {"bins": 8}), train)
        worst = max(worst, rel_err(fitted.train_scores, [hbos_oracle(pts, p, 8) for p in pts]),
                    rel_err(score(fitted, test), [hbos_oracle(pts, q, 8) for q in qs]))
    elapsed = time.perf_counter() - start
    print(f"criterion 2: worst relative error {worst:.3g} in {elapsed:.2f}s")
    assert worst <= 1e-12
    assert elapsed < 30.0


# -- 3 ----------------------------------------------------------------------


C3 = criterion(3, "LOF sanity on a uniform grid and a planted point")


@C3
def test_lof_grid():
    grid = np.arange(20, dtype=float)[:, None]
    lof = fit(("lof", {"k": 3}), grid).train_scores
    oracle = lof_oracle(grid.tolist(), grid.tolist(), 3, exclude_self=True)
    assert rel_err(lof, oracle) <= 1e-12
    interior = lof[3:-3]
    print(f"criterion 3: interior LOF in [{interior.min():.4f}, {interior.max():.4f}]")
    assert np.all((interior >= 0.9) & (interior <= 1.1))


@C3
def test_lof_planted():
    grid = np.arange(20, dtype=float)[:, None]
    data = np.vstack([grid, [[5.0 * 19.0]]])
    lof = fit(("lof", {"k": 3}), data).train_scores
    oracle = lof_oracle(data.tolist(), data.tolist(), 3, exclude_self=True)
    assert rel_err(lof, oracle) <= 1e-12
    print(f"criterion 3: planted LOF {lof[-1]:.3f}")
    assert lof[-1] > 2


# -- 4 ----------------------------------------------------------------------


C4 = criterion(4, "score-conversion invariants over 1,000 trials each")
score_vectors = arrays(np.float64, st.integers(1, 50), elements=st.floats(-1e6, 1e6))
fractions = st.floats(0.001, 0.999)


@C4
@settings(max_examples=1000)
@given(score_vectors, score_vectors, st.sampled_from(["minmax", "unify"]))
def test_conversion_rank_preservation_and_range(train, test, kind):
    cal = calibrate(train, kind)
    out = normalize(cal, test) if kind == "minmax" else unify(cal, test)
    assert np.all((out >= 0.0) & (out <= 1.0))
    order = np.argsort(test, kind="stable")
    assert np.all(np.diff(out[order]) >= 0.0)


@C4
@settings(max_examples=1000)
@given(score_vectors, score_vectors, fractions, st.integers(0, 2))
def test_classify_strictly_increasing_invariance(train, test, f, which):
    maps = (lambda x: 2.0 * x - 7.0, lambda x: np.exp(x / 1e6), lambda x: (x / 1e6) ** 3 + x / 1e6)
    g = maps[which]
    both = np.concatenate([train, test])
    order = np.argsort(both, kind="stable")
    mapped = g(both)[order]
    # discard draws where floating-point rounding makes the map non-strict
    strict = np.all(np.diff(mapped)[np.diff(both[order]) > 0] > 0)
    if strict:
        assert classify(train, test, f) == classify(g(train), g(test), f)


@C4
@settings(max_examples=1000)
@given(arrays(np.float64, st.integers(1, 80), elements=st.floats(-1e6, 1e6), unique=True), fractions)
def test_fraction_bound(train, f):
    flagged = sum(label is Label.OUTLIER for label in classify(train, train, f))
    assert flagged <= math.floor(Fraction(repr(f)) * len(train))


# -- 5 ----------------------------------------------------------------------


C5 = criterion(5, "predict_labels equals the hand-composed pipeline (100 configs)")
MEMBERS = [("knn", {"k": 3}), ("knn", {"k": 4, "reduction": "median"}),
           ("knn", {"k": 2, "reduction": "maximum"}), ("lof", {"k": 4}),
           ("dnn", {"radius": 0.7}), ("hbos", {"bins": 5})]


@C5
def test_separation_of_scoring_and_conversion():
    gen = np.random.default_rng(5)
    for _ in range(100):
        d = int(gen.integers(1, 5))
        train = gen.normal(size=(int(gen.integers(12, 80)), d))
        test = np.vstack([gen.normal(size=(int(gen.integers(0, 30)), d)) * 2, np.full((1, d), 6.0)])
        picks = gen.integers(0, len(MEMBERS), size=int(gen.integers(1, 4)))
        config = EnsembleConfig(
            members=tuple(MEMBERS[i] for i in picks),
            normalization=str(gen.choice(["minmax", "unify"])),
            combination=str(gen.choice(["mean", "maximum", "median"])),
            outlier_fraction=float(gen.choice([0.02, 0.1, 0.15, 0.3])),
        )
        one_shot = predict_labels(fit_ensemble(config, train), test)

        train_cols, test_cols = [], []
        for member in config.members:
            fitted = fit(member, train)
            cal = calibrate(fitted.train_scores, config.normalization)
            train_cols.append(apply_calibration(cal, fitted.train_scores))
            test_cols.append(apply_calibration(cal, score(fitted, test)))
        combined_train = combine(np.column_stack(train_cols), config.combination)
        combined_test = combine(np.column_stack(test_cols), config.combination)
        manual = classify(combined_train, combined_test, config.outlier_fraction)
        assert one_shot == manual
        assert predict_proba(fit_ensemble(config, train), test).tobytes() == combined_test.tobytes()


# -- 6 ----------------------------------------------------------------------


C6 = criterion(6, "planted-outlier benchmark via cmd_evaluate")


def _report(text):
    return dict(line.split(" = ", 1) for line in text.splitlines())


@C6
def test_planted_benchmark(tmp_path):
    single = tmp_path / "knn.cfg"
    single.write_text("[member]\ndetector = knn\n")
    double = tmp_path / "knn2.cfg"
    double.write_text("combination = mean\n[member]\ndetector = knn\n[member]\ndetector = knn\n")
    base = ["evaluate", "--dataset", "planted", "--seed", "7", "--cache", str(tmp_path / "cache")]

    start = time.perf_counter()
    code, out, err = run_cli(base)
    elapsed = time.perf_counter() - start
    assert code == 0, err
    report = _report(out)
    auc, prec = float(report["roc_auc"]), float(report["precision_at_n"])
    print(f"criterion 6: roc_auc={auc} precision_at_n={prec} "
          f"(n={report['n_outliers_test']}) in {elapsed:.2f}s")
    assert auc >= 0.95
    assert prec >= 0.8
    assert elapsed < 5.0

    for cfg in (single, double):
        code, out_cfg, _ = run_cli(base + ["--config", str(cfg)])
        assert code == 0
        assert out_cfg == out


@C6
def test_planted_precision_at_25(tmp_path):
    # precision@25 over all 525 rows: fit on the seeded training split, score everything
    dataset = load_dataset("planted", cache_root=tmp_path)
    assert (dataset.n_samples, int(dataset.outlier_mask.sum())) == (525, 25)
    train, _ = train_test_split(dataset, 0.7, 7)
    config = parse_config("[member]\ndetector = knn\n")
    proba = predict_proba(fit_ensemble(config, train), dataset)
    p25 = precision_at_n(proba, dataset.labels, 25)
    print(f"criterion 6: precision@25 over the full dataset = {p25}")
    assert p25 >= 0.8


@C6
def test_planted_dataset_is_pinned():
    manifest = BUILTIN_MANIFEST.read_text().splitlines()
    line = next(row for row in manifest if row.startswith("planted\t"))
    sha = line.split("\t")[2]
    data = (BUILTIN_MANIFEST.parent / "planted.csv").read_bytes()
    assert hashlib.sha256(data).hexdigest() == sha


# -- 7 ----------------------------------------------------------------------


C7 = criterion(7, "ROC-AUC equals the pairwise oracle; complement identity")


@C7
def test_auc_oracle_and_complement():
    gen = np.random.default_rng(7)
    worst = 0.0
    for trial in range(100):
        n = int(gen.integers(2, 1001))
        mask = gen.random(n) < gen.uniform(0.05, 0.6)
        mask[0], mask[1] = True, False
        if trial % 2:
            scores = gen.integers(0, 12, size=n).astype(float)  # heavy ties
        else:
            scores = gen.normal(size=n)
        labels = mask.astype(int)
        auc = roc_auc(scores, labels)
        worst = max(worst, abs(auc - auc_pairwise(scores.tolist(), mask.tolist())))
        assert auc + roc_auc(-scores, labels) == 1.0
    print(f"criterion 7: worst |rank - pairwise| = {worst:.3g}")
    assert worst <= 1e-12


# -- 8 ----------------------------------------------------------------------


C8 = criterion(8, "ingestion contract: warm cache, corrupt payload, CSV round trip")
PAYLOAD = b"a,b,label\n1.5,2,0\n-3e-5,4,1\n"


class Counting:
    def __init__(self, payload):
        self.payload, self.calls = payload, 0

    def __call__(self, url):
        self.calls += 1
        return self.payload


def _entry():
    return ManifestEntry("toy", "https://example.invalid/toy.csv",
                         hashlib.sha256(PAYLOAD).hexdigest(), "label", "1")


@C8
def test_warm_cache_zero_transport(tmp_path):
    fetch(_entry(), tmp_path, Counting(PAYLOAD))
    transport = Counting(PAYLOAD)
    assert fetch(_entry(), tmp_path, transport).verified
    assert transport.calls == 0


@C8
def test_corruption_leaves_no_file(tmp_path):
    with pytest.raises(ChecksumMismatch):
        fetch(_entry(), tmp_path, Counting(PAYLOAD.replace(b"4", b"5")))
    assert not (tmp_path / "toy.csv").exists()
    assert list(tmp_path.iterdir()) == []


@C8
@settings(max_examples=200)
@given(arrays(np.float64, st.tuples(st.integers(1, 15), st.integers(1, 5)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_csv_round_trip_exact(features):
    labels = [Label.OUTLIER if i % 2 else Label.NORMAL for i in range(features.shape[0])]
    ds = validate_dataset(features, labels, [f"c{j}" for j in range(features.shape[1])])
    back = parse_csv(write_csv(ds), label_column="label")
    assert back == ds and back.features.tobytes() == ds.features.tobytes()


# -- 9 ----------------------------------------------------------------------


C9 = criterion(9, "CLI determinism and the 0/1/2 exit-code matrix")


@C9
def test_cli_determinism_and_exit_codes(tmp_path):
    gen = np.random.default_rng(9)
    train = validate_dataset(gen.normal(size=(40, 2)), names=["a", "b"])
    test = validate_dataset(np.vstack([gen.normal(size=(5, 2)), [[9.0, 9.0]]]), names=["a", "b"])
    (tmp_path / "train.csv").write_text(write_csv(train))
    (tmp_path / "test.csv").write_text(write_csv(test))
    (tmp_path / "ok.cfg").write_text("normalization = unify\n[member]\ndetector = knn\n"
                                     "[member]\ndetector = hbos\n")
    (tmp_path / "bad.cfg").write_text("outlier_fraction = 1.5\n[member]\ndetector = knn\n")
    files = ["--train", str(tmp_path / "train.csv"), "--test", str(tmp_path / "test.csv")]
    cache = ["--cache", str(tmp_path / "cache")]

    matrix = [
        (["list"], 0),
        (["list", "--format", "machine"], 0),
        (["score", "--config", str(tmp_path / "ok.cfg"), *files], 0),
        (["labels", "--config", str(tmp_path / "ok.cfg"), *files], 0),
        (["evaluate", "--dataset", "planted", "--seed", "3", *cache], 0),
        (["score", "--config", str(tmp_path / "missing.cfg"), *files], 1),
        (["labels", "--config", str(tmp_path / "bad.cfg"), *files], 1),
        (["evaluate", "--dataset", "unknown", "--seed", "3", *cache], 1),
        (["list", "--format", "xml"], 2),
        (["score", "--config", str(tmp_path / "ok.cfg")], 2),
        (["evaluate", "--dataset", "planted", *cache], 2),
        (["bogus"], 2),
    ]
    for argv, expected in matrix:
        first, second = run_cli(argv), run_cli(argv)
        assert first == second, argv
        assert first[0] == expected, (argv, first)

    for cmd in ("score", "labels"):
        outs = []
        for i in range(2):
            path = tmp_path / f"{cmd}{i}.csv"
            assert run_cli([cmd, "--config", str(tmp_path / "ok.cfg"), *files, "--out", str(path)])[0] == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]


# -- 10 ---------------------------------------------------------------------


C10 = criterion(10, "performance smoke: 1M queries against 100k points; tree >= 10x brute")


@C10
@pytest.mark.slow
def test_performance_smoke():
    gen = np.random.default_rng(10)
    train = gen.normal(size=(100_000, 8))
    det = KNNDetector(k=5).fit(train)
    # warm the compiled kernels before timing
    det.decision_function(train[:10])

    start = time.perf_counter()
    total = 0
    for _ in range(10):
        total += det.decision_function(gen.normal(size=(100_000, 8))).size
    full = time.perf_counter() - start
    assert total == 1_000_000

    subset = gen.normal(size=(2_000, 8))
    tree_index = build_index(train, "tree")
    brute_index = build_index(train, "brute")
    tree_index.knn_batch(subset[:5], 5)
    brute_index.knn_batch(subset[:5], 5)
    start = time.perf_counter()
    ti, td = tree_index.knn_batch(subset, 5)
    tree_time = time.perf_counter() - start
    start = time.perf_counter()
    bi, bd = brute_index.knn_batch(subset, 5)
    brute_time = time.perf_counter() - start
    assert np.array_equal(ti, bi) and np.array_equal(td, bd)
    speedup = brute_time / tree_time
    print(f"criterion 10: 1,000,000 queries in {full:.1f}s; tree {speedup:.1f}x faster than brute")
    assert speedup >= 10.0
