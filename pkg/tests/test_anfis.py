import copy

import numpy as np
import pytest

from fuzzyblock.surrogate.dataset import NormalizationRecord
from fuzzyblock.surrogate.model import (
    TrainingError,
    TskModel,
    bell_membership,
    damage_map,
    extract_rules,
    firing_strengths,
    forward,
    forward_batch,
    init_model,
    load_model,
    lse_consequents,
    mf_labels,
    model_from_dict,
    model_to_dict,
    premise_gradients,
    rmse,
    save_model,
    train,
)


def grid_2d(n=11):
    g = np.linspace(-1, 1, n)
    gx, gy = np.meshgrid(g, g)
    return np.column_stack([gx.ravel(), gy.ravel()])


def sinc(v):
    with np.errstate(invalid="ignore"):
        return np.where(np.abs(v) < 1e-12, 1.0, np.sin(np.pi * v) / (np.pi * v))


class TestInit:
    def test_structural_counts(self):
        X = np.linspace(-1, 1, 20).reshape(-1, 2)
        m = init_model(2, 2, X)
        assert m.rule_count == 4
        assert m.consequents.size == 12

    def test_rule_count_power(self):
        X = np.zeros((10, 5)) + np.linspace(-1, 1, 10).reshape(-1, 1)
        m = init_model(5, 3, X, max_rules=1024)
        assert m.rule_count == 243

    def test_centers_equispaced(self):
        X = np.array([[-1.0], [1.0]])
        m = init_model(1, 3, X)
        assert np.allclose(m.mf_params[0][:, 0], [-1, 0, 1])
        assert np.allclose(m.mf_params[0][:, 1], 0.5)
        assert np.allclose(m.mf_params[0][:, 2], 2.0)

    def test_rule_explosion_rejected(self):
        X = np.zeros((4, 5)) + np.linspace(0, 1, 4).reshape(-1, 1)
        with pytest.raises(ValueError, match="rule"):
            init_model(5, 5, X)

    def test_min_mfs(self):
        with pytest.raises(ValueError):
            init_model(1, 1, np.array([[0.0], [1.0]]))


class TestForward:
    def test_single_rule_linear(self):
        m = TskModel([np.array([[0.0, 1.0, 2.0]])], np.array([[2.0, 1.0]]), ("x1",))
        y, wbar = forward(m, [3.0])
        assert y == pytest.approx(7.0)
        assert wbar == pytest.approx([1.0])

    def test_symmetric_two_rule_midpoint(self):
        m = TskModel(
            [np.array([[-1.0, 1.0, 2.0], [1.0, 1.0, 2.0]])],
            np.array([[0.0, 2.0], [0.0, 4.0]]),
            ("x1",),
        )
        y, wbar = forward(m, [0.0])
        assert wbar == pytest.approx([0.5, 0.5])
        assert y == pytest.approx(3.0)

    def test_normalized_strengths_sum_to_one(self):
        rng = np.random.Generator(np.random.Philox(3))
        X = rng.uniform(-1, 1, size=(100, 2))
        m = init_model(2, 3, X)
        _, wbar = firing_strengths(m, X)
        assert np.allclose(wbar.sum(axis=1), 1.0, atol=1e-12)

    def test_dimension_checked(self):
        m = init_model(2, 2, np.array([[0.0, 0.0], [1.0, 1.0]]))
        with pytest.raises(ValueError):
            forward(m, [1.0])

    def test_underflow_fallback_uniform(self):
        m = TskModel([np.array([[0.0, 1e-6, 40.0], [0.1, 1e-6, 40.0]])],
                     np.array([[1.0, 0.0], [2.0, 0.0]]), ("x1",))
        _, wbar = firing_strengths(m, np.array([[1e8]]))
        assert np.allclose(wbar, 0.5)


class TestTrain:
    def test_exactly_representable_one_epoch(self):
        X = np.linspace(-1, 1, 21).reshape(-1, 1)
        y = 2 * X[:, 0] + 1
        model, history = train(init_model(1, 2, X), X, y, epochs=1)
        assert history[0] < 1e-6

    def test_smooth_target_converges(self):
        X = grid_2d(11)
        y = sinc(1.5 * X[:, 0]) * sinc(1.5 * X[:, 1])
        model, history = train(init_model(2, 3, X), X, y, epochs=100)
        assert len(history) == 100
        assert history[-1] < 0.05

    def test_premise_gradients_match_finite_differences(self):
        rng = np.random.Generator(np.random.Philox(7))
        X = rng.uniform(-1, 1, size=(40, 2))
        y = np.sin(2 * X[:, 0]) * np.cos(X[:, 1]) + 0.3 * X[:, 1]
        m = init_model(2, 3, X)
        m.consequents = rng.normal(size=m.consequents.shape) * 0.3
        grads = premise_gradients(m, X, y)

        def mse(model):
            pred, _ = forward_batch(model, X)
            return float(np.mean((pred - y) ** 2))

        h = 1e-6
        for i in range(2):
            for mf in range(3):
                for p in range(3):
                    up = copy.deepcopy(m)
                    dn = copy.deepcopy(m)
                    up.mf_params[i][mf, p] += h
                    dn.mf_params[i][mf, p] -= h
                    fd = (mse(up) - mse(dn)) / (2 * h)
                    an = grads[i][mf, p]
                    denom = max(abs(fd), abs(an), 1e-8)
                    assert abs(fd - an) / denom < 1e-4

    def test_lse_is_optimal_for_frozen_premises(self):
        rng = np.random.Generator(np.random.Philox(11))
        X = rng.uniform(-1, 1, size=(50, 2))
        y = X[:, 0] ** 2 - 0.5 * X[:, 1]
        m = init_model(2, 2, X)
        m.consequents = lse_consequents(m, X, y)
        base = rmse(m, X, y)
        for _ in range(20):
            perturbed = copy.deepcopy(m)
            delta = rng.normal(size=perturbed.consequents.shape)
            delta *= 1e-3 / np.linalg.norm(delta)
            perturbed.consequents = perturbed.consequents + delta
            assert rmse(perturbed, X, y) >= base - 1e-12

    def test_pass1_rmse_never_worse_on_same_premises(self):
        rng = np.random.Generator(np.random.Philox(13))
        X = rng.uniform(-1, 1, size=(50, 2))
        y = np.tanh(X[:, 0] + X[:, 1])
        m = init_model(2, 2, X)
        m.consequents = lse_consequents(m, X, y)
        first = rmse(m, X, y)
        m.consequents = rng.normal(size=m.consequents.shape)
        m.consequents = lse_consequents(m, X, y)
        assert rmse(m, X, y) <= first + 1e-12

    def test_ridge_variant_trains(self):
        X = grid_2d(7)
        y = X[:, 0] + X[:, 1]
        model, history = train(init_model(2, 2, X), X, y, epochs=3, ridge=1e-2)
        assert history[-1] < 0.2

    def test_empty_data_rejected(self):
        m = init_model(1, 2, np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            train(m, np.zeros((0, 1)), np.zeros(0), epochs=1)

    def test_epochs_checked(self):
        m = init_model(1, 2, np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            train(m, np.array([[0.0], [1.0]]), np.array([0.0, 1.0]), epochs=0)

    def test_nonfinite_loss_diagnosed(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([0.0, 1e300])
        m = init_model(1, 2, X)
        with np.errstate(all="ignore"):
            with pytest.raises((TrainingError, np.linalg.LinAlgError)):
                model, _ = train(m, X, y, epochs=3, learn_rate=1e280)


class TestRulesAndSerialization:
    def test_rule_count_lines(self):
        X = grid_2d(5)
        m = init_model(2, 2, X)
        lines = extract_rules(m)
        assert len(lines) == 4
        assert all(line.startswith("IF ") and " THEN sf = " in line for line in lines)

    def test_labels(self):
        assert mf_labels(3) == ("low", "medium", "high")
        assert mf_labels(2) == ("low", "high")
        assert mf_labels(7) == tuple(f"level{i}" for i in range(1, 8))

    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(17))
        X = rng.uniform(-1, 1, size=(30, 2))
        y = X[:, 0] * X[:, 1]
        model, _ = train(init_model(2, 2, X), X, y, epochs=5)
        model.normalization = NormalizationRecord(
            ("a", "b"), (0.0, -1.0, -2.0), (1.0, 1.0, 2.0)
        )
        model.input_medians = (0.25, -0.5)
        path = tmp_path / "model.json"
        save_model(model, str(path))
        again = load_model(str(path))
        assert extract_rules(again) == extract_rules(model)
        assert np.array_equal(again.consequents, model.consequents)
        for p, q in zip(again.mf_params, model.mf_params):
            assert np.array_equal(p, q)
        save_model(again, str(tmp_path / "model2.json"))
        assert (tmp_path / "model.json").read_bytes() == (tmp_path / "model2.json").read_bytes()

    def test_schema_version_checked(self):
        doc = model_to_dict(init_model(1, 2, np.array([[0.0], [1.0]])))
        doc["schema_version"] = 99
        with pytest.raises(ValueError):
            model_from_dict(doc)

    def test_deterministic_retrain(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(19))
        X = rng.uniform(-1, 1, size=(40, 3))
        y = X[:, 0] - X[:, 1] * X[:, 2]

        def run(path):
            m, _ = train(init_model(3, 2, X), X, y, epochs=10)
            save_model(m, str(path))

        run(tmp_path / "a.json")
        run(tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


class TestDamageMap:
    def _model_with_metadata(self):
        rng = np.random.Generator(np.random.Philox(23))
        X = rng.uniform(-1, 1, size=(60, 5))
        y = X[:, 3] ** 2
        names = ("dip_deg", "dipdir_deg", "phi_deg", "angle_deg", "volume_m3")
        m, _ = train(init_model(5, 2, X, input_names=names), X, y, epochs=2)
        m.normalization = NormalizationRecord(
            ("dip_deg", "dipdir_deg", "phi_deg", "angle_deg", "volume_m3"),
            (10.0, 100.0, 15.0, 31.0, 0.0, 0.0),
            (35.0, 160.0, 25.0, 391.0, 400.0, 5.0),
        )
        m.input_medians = (22.0, 130.0, 20.0, 200.0, 150.0)
        return m

    def test_uniform_model_uniform_map(self):
        m = self._model_with_metadata()
        m.consequents = np.zeros_like(m.consequents)
        m.consequents[:, -1] = 0.25
        series = damage_map(m, 36)
        values = {round(v, 9) for _, v in series}
        assert len(values) == 1

    def test_angles_span_trained_domain(self):
        m = self._model_with_metadata()
        series = damage_map(m, 36)
        assert len(series) == 36
        assert all(0.0 <= a < 360.0 for a, _ in series)

    def test_denormalization_round_trip(self):
        m = self._model_with_metadata()
        rec = m.normalization
        raw = np.array([[20.0, 120.0, 18.0, 100.0, 50.0]])
        normd = rec.apply_features(raw)
        pred, _ = forward_batch(m, normd)
        assert rec.invert_target(rec.apply_target(np.array([2.5])))[0] == pytest.approx(2.5)

    def test_per_bin_overrides(self):
        m = self._model_with_metadata()
        vols = np.linspace(10, 300, 36)
        series = damage_map(m, 36, per_bin_inputs={"volume_m3": vols})
        assert len(series) == 36
        with pytest.raises(ValueError):
            damage_map(m, 36, per_bin_inputs={"volume_m3": vols[:10]})

    def test_requires_metadata(self):
        m = init_model(5, 2, np.zeros((4, 5)) + np.linspace(0, 1, 4).reshape(-1, 1))
        with pytest.raises(ValueError):
            damage_map(m, 16)

    def test_min_bins(self):
        m = self._model_with_metadata()
        with pytest.raises(ValueError):
            damage_map(m, 4)


def test_bell_membership_shape():
    params = np.array([[0.0, 1.0, 2.0], [1.0, 0.5, 1.0]])
    vals = bell_membership(np.array([0.0, 1.0]), params)
    assert vals.shape == (2, 2)
    assert vals[0, 0] == pytest.approx(1.0)
    assert vals[1, 1] == pytest.approx(1.0)
