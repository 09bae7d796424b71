"""Smoke tests for the pydinids extension module."""

import numpy as np
import pytest

import pydinids


def shift_data(n, seed, target=False):
    # mirrors the synthetic fixture used by the C++ tests: class signal in
    # columns 0-1 (shifted in the target), domain tag in columns 2-3
    rng = np.random.default_rng(seed)
    y = (rng.random(n) >= 0.7).astype(int)
    x = rng.normal(0.5, 0.02, size=(n, 39))
    base = np.where(y == 0, 0.3, 0.7) + (0.4 if target else 0.0)
    x[:, 0] = base + rng.normal(0, 0.05, n)
    x[:, 1] = base + rng.normal(0, 0.05, n)
    x[:, 2] = (0.9 if target else 0.1) + rng.normal(0, 0.05, n)
    x[:, 3] = (0.9 if target else 0.1) + rng.normal(0, 0.05, n)
    return x, y.tolist()


def test_train_and_predict():
    sx, sy = shift_data(400, 1)
    tx, _ = shift_data(400, 2, target=True)
    model, history = pydinids.train_dann(
        sx, sy, tx, epochs=30, learning_rate=2.5, batch_size=32, seed=4
    )
    assert len(history) <= 30
    assert all(np.isfinite(rec["label_loss"]) for rec in history)

    feats = model.extract_features(sx)
    assert feats.shape == (400, 10)
    assert np.all((feats > 0.0) & (feats < 1.0))

    labels = model.predict_labels(sx)
    assert set(labels) <= {0, 1}
    m = pydinids.metrics(sy, labels)
    assert 0.0 <= m["f1"] <= 1.0


def test_determinism():
    sx, sy = shift_data(200, 3)
    tx, _ = shift_data(200, 4, target=True)
    kwargs = dict(epochs=5, learning_rate=2.5, batch_size=32, seed=7)
    m1, _ = pydinids.train_dann(sx, sy, tx, **kwargs)
    m2, _ = pydinids.train_dann(sx, sy, tx, **kwargs)
    assert np.array_equal(m1.extract_features(sx), m2.extract_features(sx))


def test_osvm():
    rng = np.random.default_rng(11)
    x = rng.normal(0.0, 1.0, size=(500, 3))
    model = pydinids.train_osvm(x, nu=0.1)
    assert model.n_support >= 1
    scores = model.decision_function(x)
    frac_out = np.mean(scores < 0.0)
    assert 0.05 <= frac_out <= 0.15
    # a far-away query is an anomaly
    assert model.predict(np.full((1, 3), 50.0)) == [1]


def test_metrics_and_degradation():
    m = pydinids.metrics([1, 1, 0, 0], [1, 0, 0, 0])
    assert m["precision"] == 1.0
    assert m["recall"] == 0.5
    assert m["f1"] == pytest.approx(2 / 3)
    assert pydinids.degradation(93.23, 85.79) == pytest.approx(7.44)


def test_pca_embed_and_separation():
    sx, _ = shift_data(150, 5)
    tx, _ = shift_data(150, 6, target=True)
    both = np.vstack([sx, tx])
    tags = [0] * 150 + [1] * 150
    emb = pydinids.pca_embed(both, dims=2, seed=7, domain_tags=tags)
    assert emb["coords"].shape == (300, 2)
    ratio = pydinids.separation_ratio(emb["coords"], emb["domain"])
    assert ratio > 1.0  # raw domains are visibly separated


def test_errors():
    with pytest.raises(Exception):
        pydinids.train_osvm(np.zeros((1, 2)), nu=0.5)  # too few rows
    with pytest.raises(Exception):
        pydinids.metrics([1, 0], [1])  # length mismatch
