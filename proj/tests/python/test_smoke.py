import math
import os
import pathlib

import pytest

import litclass

ROOT = pathlib.Path(os.environ.get("LITCLASS_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
FIXTURES = ROOT / "tests" / "fixtures"


def test_build_query():
    assert litclass.build_query(["x"], "OR", 2000, 2000) == '("x") AND ("2000"[pdat] : "2000"[pdat])'
    with pytest.raises(ValueError):
        litclass.build_query([])


def test_curate_fixture(tmp_path):
    records = litclass.read_corpus(FIXTURES / "curation_fixture.csv")
    kept, steps = litclass.curate(records)
    assert [r.pmid for r in kept] == ["101", "104", "108", "109", "110"]
    assert [s[2] for s in steps] == [10, 7, 5]
    assert litclass.write_corpus(kept, tmp_path / "c.csv") == 5
    assert litclass.read_corpus(tmp_path / "c.csv") == kept


def test_missing_corpus_is_os_error(tmp_path):
    with pytest.raises(OSError):
        litclass.read_corpus(tmp_path / "missing.csv")


def test_text_and_lda():
    assert litclass.tokenize("Speech-sound disorders in 8-year-olds.") == ["speech", "sound", "disorders", "year", "olds"]
    docs = [["alpha", "beta", "gamma"] * 5 if i % 2 else ["delta", "epsilon", "zeta"] * 5 for i in range(20)]
    model = litclass.train_lda(docs, 2, alpha=0.1, iterations=100, burn_in=10)
    assert model.num_topics == 2
    assert all(abs(sum(row) - 1.0) < 1e-9 for row in model.phi)
    tops = [set(model.top_words(k, 3)) for k in range(2)]
    assert {"alpha", "beta", "gamma"} in tops
    assert litclass.heldout_log_likelihood(model, docs[:2]) <= 0.0
    score, per_topic = litclass.cv_coherence([["a", "b"]], [["a", "b"], ["a", "b"], ["a", "c"]], window=2)
    assert abs(score - 1 / math.sqrt(2)) < 1e-9


def test_reduce_and_cluster():
    pts = [[float(i % 7) * 0.01, float(i % 5) * 0.01] for i in range(30)]
    pts += [[10.0 + float(i % 7) * 0.01, 10.0 + float(i % 5) * 0.01] for i in range(30)]
    reduced = litclass.umap_reduce(pts, n_neighbors=8, n_components=2, epochs=50)
    assert len(reduced) == 60 and len(reduced[0]) == 2
    res = litclass.hdbscan(pts, min_cluster_size=10)
    assert res.n_clusters == 2
    labels = litclass.reassign_outliers(res.labels, pts)
    assert litclass.outlier_ratio(labels) <= litclass.outlier_ratio(res.labels)
    a, b = litclass.fit_ab(0.1, 1.0)
    assert abs(a - 1.577) < 1e-2 and abs(b - 0.895) < 1e-2


def test_topic_math():
    w = litclass.ctfidf([[4, 0], [0, 2]])
    assert abs(w[0][0] - 2.2384) < 1e-4
    assert litclass.jsd([1, 0], [0, 1]) == pytest.approx(1.0, abs=1e-12)


def test_validate_config():
    ok, diags = litclass.validate_config(ROOT / "data" / "sample" / "config.json")
    assert ok
    ok, diags = litclass.validate_config(FIXTURES / "bad_config.json")
    assert not ok
    assert any("umap.min_dist" in d for d in diags)
