"""Distribution metrics and the style recognizer used to compute them."""

import numpy as np
import pytest
from scipy.special import gamma

from fallsynth.dataset.synthetic import synthesize_dataset
from fallsynth.metrics.evaluation import (
    DegenerateCovariance,
    EmbeddingSet,
    EmptyInput,
    TooFewEmbeddings,
    diversity,
    evaluation_report,
    fid,
    recognition_accuracy,
)
from fallsynth.metrics.recognizer import (
    HEAD_CLASSES,
    HEADS,
    FallRecognizer,
    InsufficientData,
    class_targets,
    load_recognizer,
    save_recognizer,
    train_recognizer,
)


def whitened(rng, n: int, d: int) -> np.ndarray:
    """Embeddings whose sample mean is exactly 0 and covariance exactly I."""
    x = rng.normal(size=(n, d))
    x -= x.mean(axis=0)
    cov = np.cov(x, rowvar=False)
    values, vectors = np.linalg.eigh(cov)
    return x @ (vectors / np.sqrt(values)) @ vectors.T


def test_fid_identity_is_zero(rng):
    e = rng.normal(size=(64, 6))
    assert fid(e, e.copy()) < 1e-6


def test_fid_symmetry(rng):
    a = rng.normal(size=(50, 5))
    b = rng.normal(size=(40, 5)) + 0.3
    assert abs(fid(a, b) - fid(b, a)) < 1e-8


def test_fid_unit_mean_shift_is_one(rng):
    a = whitened(rng, 400, 6)
    shift = np.zeros(6)
    shift[2] = 1.0
    assert abs(fid(a, a + shift) - 1.0) < 1e-6


def test_fid_diagonal_closed_form(rng):
    """Independent oracle: for diagonal Gaussians the distance is
    ||m1-m2||^2 + sum(a + b - 2 sqrt(ab))."""
    d = 4
    base = whitened(rng, 600, d)
    scale_a = np.array([1.0, 2.0, 0.5, 1.5])
    scale_b = np.array([0.8, 1.2, 2.5, 1.0])
    mean_b = np.array([0.3, -0.2, 0.5, 0.0])
    a = base * np.sqrt(scale_a)
    b = base * np.sqrt(scale_b) + mean_b
    reg = 1e-6
    va, vb = scale_a + reg, scale_b + reg
    want = float((mean_b ** 2).sum() + (va + vb - 2.0 * np.sqrt(va * vb)).sum())
    assert abs(fid(a, b) - want) < 1e-8


def test_fid_invariant_under_joint_rotation(rng):
    a = rng.normal(size=(80, 5))
    b = rng.normal(size=(70, 5)) * 1.3 + 0.4
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    assert abs(fid(a, b) - fid(a @ q, b @ q)) < 1e-6


def test_fid_row_order_invariant(rng):
    a = rng.normal(size=(30, 4))
    b = rng.normal(size=(30, 4)) + 1.0
    assert abs(fid(a, b) - fid(a[::-1].copy(), b[rng.permutation(30)])) < 1e-9


def test_embedding_set_validation():
    with pytest.raises(TooFewEmbeddings):
        EmbeddingSet(np.zeros(5))
    with pytest.raises(TooFewEmbeddings):
        EmbeddingSet(np.zeros((1, 5)))
    s = EmbeddingSet(np.eye(3))
    assert s.count == 3
    assert np.allclose(s.mean, 1.0 / 3.0)


def test_diversity_identical_rows_is_zero():
    e = np.tile(np.array([1.0, 2.0, 3.0]), (10, 1))
    assert diversity(e, num_pairs=50) == 0.0


def test_diversity_two_points_is_their_distance():
    a, b = np.array([0.0, 0.0]), np.array([3.0, 4.0])
    e = np.stack([a, b])
    assert diversity(e, num_pairs=64) == 5.0


def test_diversity_matches_analytic_gaussian_value():
    """E||x - y|| for x, y ~ N(0, I_d) is sqrt(2) * sqrt(2) G((d+1)/2)/G(d/2)."""
    d = 4
    rng = np.random.default_rng(7)
    e = rng.standard_normal((4000, d))
    want = 2.0 * gamma((d + 1) / 2.0) / gamma(d / 2.0)
    got = diversity(e, num_pairs=20_000, rng=np.random.default_rng(1))
    assert abs(got - want) < 0.05


def test_diversity_validation():
    with pytest.raises(TooFewEmbeddings):
        diversity(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        diversity(np.zeros((4, 3)), num_pairs=0)


def test_diversity_deterministic_given_rng():
    e = np.random.default_rng(2).normal(size=(50, 3))
    a = diversity(e, num_pairs=100, rng=np.random.default_rng(5))
    b = diversity(e, num_pairs=100, rng=np.random.default_rng(5))
    assert a == b


@pytest.fixture(scope="module")
def trained_recognizer():
    data = synthesize_dataset(80, master_seed=11)
    model, report = train_recognizer(data, epochs=20, lr=1e-3, batch_size=8, rng_seed=0)
    return data, model, report


def test_recognizer_learns_better_than_chance(trained_recognizer):
    _, _, report = trained_recognizer
    acc = report["val_accuracy"]
    for head in HEADS:
        assert acc[head] > 1.0 / HEAD_CLASSES[head], head
    assert report["history"][-1]["loss"] < report["history"][0]["loss"]


def test_recognizer_outputs_well_formed(trained_recognizer):
    data, model, _ = trained_recognizer
    subset = data[:6]
    predictions = model.predict(subset)
    for head in HEADS:
        assert predictions[head].shape == (6,)
        assert predictions[head].min() >= 0
        assert predictions[head].max() < HEAD_CLASSES[head]
    embeddings = model.embed(subset)
    assert embeddings.shape == (6, model.embedding_dim)
    assert np.isfinite(embeddings).all()
    # batched and unbatched paths agree
    assert np.allclose(embeddings, model.embed(subset, batch_size=2), atol=1e-12)


def test_class_targets_match_attribute_classes(trained_recognizer):
    data, _, _ = trained_recognizer
    targets = class_targets(data[:8])
    for i, seq in enumerate(data[:8]):
        assert targets["impact"][i] == seq.attributes.impact_class()
        assert targets["glitch"][i] == seq.attributes.glitch_class()
        assert targets["fall"][i] == seq.attributes.fall_class()


def test_recognition_accuracy_pairs_and_bare_sequences(trained_recognizer):
    data, model, _ = trained_recognizer
    subset = data[:10]
    bare = recognition_accuracy(model, subset)
    paired = recognition_accuracy(model, [(s, s.attributes) for s in subset])
    assert bare == paired
    assert set(bare) == {"impact", "glitch", "fall", "mean"}
    assert 0.0 <= bare["mean"] <= 1.0


def test_permuted_labels_score_below_true_labels(trained_recognizer):
    data, model, _ = trained_recognizer
    true = recognition_accuracy(model, data)
    perm = np.random.default_rng(3).permutation(len(data))
    shuffled = recognition_accuracy(
        model, [(data[i], data[int(perm[i])].attributes) for i in range(len(data))])
    assert shuffled["mean"] < true["mean"]


def test_recognition_accuracy_empty_input(trained_recognizer):
    _, model, _ = trained_recognizer
    with pytest.raises(EmptyInput):
        recognition_accuracy(model, [])


def test_insufficient_data_rejected():
    with pytest.raises(InsufficientData):
        train_recognizer(synthesize_dataset(3, master_seed=0), epochs=1)
    # 5 trials leave singleton impact classes on the grid walk
    with pytest.raises(InsufficientData):
        train_recognizer(synthesize_dataset(5, master_seed=0), epochs=1)


def test_recognizer_checkpoint_round_trip(tmp_path, trained_recognizer):
    data, model, _ = trained_recognizer
    path = tmp_path / "recognizer.fsck"
    save_recognizer(path, model, step=9)
    loaded = load_recognizer(path)
    ours, theirs = model.predict(data[:8]), loaded.predict(data[:8])
    for head in HEADS:
        assert np.array_equal(ours[head], theirs[head])
    assert np.allclose(model.embed(data[:4]), loaded.embed(data[:4]), atol=1e-12)


def test_cvae_checkpoint_is_not_a_recognizer(tmp_path, tiny_config):
    from fallsynth.model.checkpoint import CorruptCheckpoint, save_model
    from fallsynth.model.cvae import AttributeCvae

    path = tmp_path / "cvae.fsck"
    save_model(path, AttributeCvae(tiny_config, rng_seed=0))
    with pytest.raises(CorruptCheckpoint):
        load_recognizer(path)


def test_evaluation_report_schema(trained_recognizer):
    data, model, _ = trained_recognizer
    report = evaluation_report(model, data[:20], data[20:40], num_pairs=50, rng_seed=0,
                               config={"note": "self-check"})
    assert set(report) == {"fid", "accuracy", "diversity", "n_real", "n_gen", "config_hash"}
    assert report["n_real"] == 20 and report["n_gen"] == 20
    assert report["fid"] >= 0.0 and report["diversity"] > 0.0
    same = evaluation_report(model, data[:20], data[20:40], num_pairs=50, rng_seed=0,
                             config={"note": "self-check"})
    assert report == same
