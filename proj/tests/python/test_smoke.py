import math

import numpy as np
import pytest

import qcnn_workbench as qw


def test_param_counts():
    pooled = [qw.param_count(f"a{i}-pool") for i in range(1, 10)]
    bare = [qw.param_count(f"a{i}-nopool") for i in range(1, 10)]
    assert pooled == [12, 12, 18, 24, 24, 24, 36, 36, 51]
    assert bare == [6, 6, 12, 18, 18, 18, 30, 30, 45]
    assert len(qw.all_ansatzes()) == 18
    assert qw.parse_ansatz("a3-nopool").name == "a3-nopool"


def test_unknown_ansatz_raises():
    with pytest.raises(ValueError):
        qw.parse_ansatz("a12-pool")


def test_amplitude_encoding():
    amps = qw.encode("amplitude", 1, [3.0, 4.0])
    np.testing.assert_allclose(amps, [0.6, 0.8])


def test_bce_loss():
    assert qw.bce_loss([0.9, 0.2], [1, 0]) == pytest.approx(-0.5 * (math.log(0.9) + math.log(0.8)))
    with pytest.raises(ValueError):
        qw.bce_loss([0.5], [1, 0])


def test_predict_and_gradient():
    x = [1.0] + [0.0] * 255
    zeros = [0.0] * qw.param_count("a1-nopool")
    assert qw.predict_prob("a1-nopool", zeros, x) == pytest.approx(0.0)

    rng = np.random.default_rng(0)
    params = list(rng.uniform(0, 2 * math.pi, qw.param_count("a3-nopool")))
    feats = rng.normal(size=256)
    batch = [qw.FeatureRecord(1, list(feats / np.linalg.norm(feats)))]
    shift = qw.gradient("a3-nopool", params, batch)
    fd = qw.gradient("a3-nopool", params, batch, mode="finite-difference")
    np.testing.assert_allclose(shift, fd, atol=1e-5)


def test_noisy_prediction_is_a_probability():
    x = list(np.ones(256) / 16.0)
    params = [0.3] * qw.param_count("a2-pool")
    p = qw.predict_prob("a2-pool", params, x, noise="depol", p=0.05)
    assert 0.0 <= p <= 1.0


def test_data_pipeline_and_short_training(tmp_path):
    records = qw.synthesize_gaussians(256, 10, 8.0, 0)
    assert len(records) == 20
    path = tmp_path / "d.csv"
    qw.write_features(records, str(path))
    loaded = qw.load_features(str(path))
    assert [r.features for r in loaded] == [r.features for r in records]

    train_set, test_set = qw.split(loaded, 0.8, 0)
    train_set, test_set = qw.preprocess(train_set, test_set)
    report = qw.train("a2-nopool", train_set, test_set, epochs=2, batch_size=4)
    assert len(report["losses"]) == 3
    assert 0.0 <= report["test_acc"] <= 1.0
    base = qw.train_baseline("cnn1", train_set, test_set, epochs=2, batch_size=4)
    assert set(base) == set(report)


def test_parse_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("label,f0\n0,zz\n")
    with pytest.raises(qw.ParseError):
        qw.load_features(str(path))


def test_entropy():
    values = qw.conv_unit_entropies(2, 50)
    assert all(abs(v - 1.0) < 1e-6 for v in values)
    layers = qw.layerwise_entropies("a8-nopool", 20)
    assert len(layers) == 3


def test_cli_entry():
    code, out, _ = qw.run_cli(["encode-dump", "--x", "3,4"])
    assert code == 0
    assert "0.6" in out
    code, _, _ = qw.run_cli(["baseline", "--variant", "cnn9"])
    assert code == 2
