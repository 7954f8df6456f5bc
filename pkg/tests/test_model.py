import json

import numpy as np
import pytest

from frocc import (
    ConfigError,
    DataError,
    FroccModel,
    Kernel,
    ModelFileError,
    fit,
    fit_standardizer,
    load,
)
from frocc.intervals import IntervalSet
from frocc.model import _serialize_body

ALL_KERNELS = [Kernel.linear(), Kernel.rbf(), Kernel.poly(), Kernel.sigmoid()]

TWO_POINTS = np.array([[0.0, 0.0], [1.0, 1.0]])


class TestFit:
    def test_training_points_score_one(self):
        model = fit(TWO_POINTS, m=4, epsilon=1.0, kernel=Kernel.linear(), seed=1)
        assert model.decision_score(TWO_POINTS).tolist() == [1.0, 1.0]

    def test_convex_combination_is_inlier(self):
        model = fit(TWO_POINTS, m=4, epsilon=1.0, kernel=Kernel.linear(), seed=1)
        assert model.predict(np.array([0.5, 0.5]))

    def test_far_point_is_outlier(self):
        model = fit(TWO_POINTS, m=4, epsilon=1.0, kernel=Kernel.linear(), seed=1)
        assert not model.predict(np.array([10.0, 10.0]))

    def test_one_point_training_set_is_legal(self):
        model = fit(np.array([[2.0, 3.0]]), m=3, epsilon=0.5, seed=0)
        assert model.decision_score(np.array([2.0, 3.0])) == 1.0

    def test_validation(self):
        with pytest.raises(DataError):
            fit(np.empty((0, 2)), m=1, epsilon=0.5)
        with pytest.raises(DataError):
            fit(np.array([[np.nan, 1.0]]), m=1, epsilon=0.5)
        with pytest.raises(ConfigError):
            fit(TWO_POINTS, m=0, epsilon=0.5)
        with pytest.raises(ConfigError):
            fit(TWO_POINTS, m=1, epsilon=0.0)
        with pytest.raises(ConfigError):
            fit(TWO_POINTS, m=1, epsilon=1.5)
        with pytest.raises(ConfigError):
            fit(TWO_POINTS, m=1, epsilon=0.5, mode="fuzzy")
        with pytest.raises(ConfigError):
            fit(TWO_POINTS, m=1, epsilon=0.5, seed=-3)

    def test_dimension_mismatch_at_score_time(self):
        model = fit(TWO_POINTS, m=2, epsilon=1.0, seed=0)
        with pytest.raises(DataError):
            model.decision_score(np.array([1.0, 2.0, 3.0]))

    def test_deterministic_bytes(self):
        a = fit(TWO_POINTS, m=8, epsilon=0.3, kernel=Kernel.rbf(), seed=9)
        b = fit(TWO_POINTS, m=8, epsilon=0.3, kernel=Kernel.rbf(), seed=9)
        assert _serialize_body(a) == _serialize_body(b)

    def test_n_jobs_does_not_change_model(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(2600, 6))
        a = fit(X, m=10, epsilon=0.2, seed=5, n_jobs=1)
        b = fit(X, m=10, epsilon=0.2, seed=5, n_jobs=4)
        assert _serialize_body(a) == _serialize_body(b)


def _hand_model():
    # Two axis directions; direction 0 accepts [0, 1], direction 1 accepts [10, 11].
    mk = lambda lo, hi: IntervalSet(
        lows=np.array([lo]), highs=np.array([hi]), min_raw=lo, max_raw=hi, epsilon=0.5
    )
    return FroccModel(
        m=2, epsilon=0.5, kernel=Kernel.linear(),
        directions=np.array([[1.0, 0.0], [0.0, 1.0]]),
        per_direction=[mk(0.0, 1.0), mk(10.0, 11.0)],
        mode="exact", seed=0, d=2,
    )


class TestScoring:
    def test_half_score_when_one_direction_accepts(self):
        model = _hand_model()
        assert model.decision_score(np.array([0.5, 0.0])) == 0.5

    def test_zero_score_when_no_direction_accepts(self):
        model = _hand_model()
        assert model.decision_score(np.array([5.0, 5.0])) == 0.0

    def test_predict_requires_all_directions(self):
        model = _hand_model()
        assert model.predict(np.array([0.5, 10.5]))
        assert not model.predict(np.array([0.5, 0.0]))  # score 0.5 is a NO

    def test_single_direction_model(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(size=(30, 2))
        model = fit(X, m=1, epsilon=1.0, seed=0)
        assert model.predict(X.mean(axis=0))

    def test_score_equals_hit_fraction(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 3))
        model = fit(X, m=7, epsilon=0.1, seed=2)
        probes = rng.normal(size=(20, 3)) * 2
        hits = model.direction_hits(probes)
        assert np.array_equal(model.decision_score(probes), hits.sum(axis=1) / 7)
        assert np.array_equal(model.predict(probes), hits.all(axis=1))


class TestTrainingContainment:
    @pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: k.variant)
    @pytest.mark.parametrize("mode", ["exact", "binned"])
    def test_every_training_point_scores_one(self, kernel, mode):
        rng = np.random.default_rng(17)
        for round_ in range(6):
            n = int(rng.integers(1, 300))
            d = int(rng.integers(1, 15))
            X = rng.normal(size=(n, d)) * rng.uniform(0.1, 5)
            eps = float(rng.choice([0.05, 0.1, 0.5, 1.0]))
            model = fit(X, m=int(rng.integers(1, 40)), epsilon=eps,
                        kernel=kernel, seed=round_, mode=mode)
            scores = model.decision_score(X)
            assert np.all(scores == 1.0), f"round={round_} kernel={kernel.variant}"


class TestMonotonicity:
    def test_score_nondecreasing_in_epsilon(self):
        rng = np.random.default_rng(21)
        X = rng.normal(size=(120, 4))
        probes = rng.normal(size=(100, 4)) * 1.5
        grid = [0.01, 0.05, 0.1, 0.5, 1.0]
        models = [fit(X, m=24, epsilon=e, seed=3) for e in grid]
        scores = np.stack([m.decision_score(probes) for m in models])
        assert np.all(np.diff(scores, axis=0) >= 0)
        sizes = [m.model_size().total for m in models]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))

    def test_yes_set_shrinks_with_m(self):
        rng = np.random.default_rng(22)
        X = rng.normal(size=(80, 3))
        probes = rng.normal(size=(200, 3)) * 2
        ms = [1, 2, 4, 8, 16, 32]
        models = [fit(X, m=m, epsilon=0.2, seed=6) for m in ms]
        yes = np.stack([mod.predict(probes) for mod in models])
        # YES at larger m implies YES at every smaller m.
        assert np.all(yes[1:] <= yes[:-1])
        sizes = [mod.model_size().total for mod in models]
        assert all(a <= b for a, b in zip(sizes, sizes[1:]))


class TestModelSize:
    def test_epsilon_one_gives_two_per_direction(self):
        model = fit(np.random.default_rng(0).normal(size=(30, 3)), m=11, epsilon=1.0, seed=0)
        size = model.model_size()
        assert size.total == 22 and not size.approximate

    def test_hand_traced_interval_count(self):
        # Projections {0, 0.05, 0.9} at eps=0.2: margin 0.18 splits once.
        model = fit(np.array([[0.0], [0.05], [0.9]]), m=1, epsilon=0.2, seed=4)
        assert model.model_size().total == 4

    def test_lower_bound(self):
        rng = np.random.default_rng(5)
        for seed in range(5):
            m = int(rng.integers(1, 30))
            model = fit(rng.normal(size=(60, 4)), m=m, epsilon=0.1, seed=seed)
            assert model.model_size().total >= 2 * m

    def test_binned_size_is_flagged_approximate(self):
        model = fit(np.array([[0.0], [0.05], [0.9]]), m=1, epsilon=0.2, seed=4, mode="binned")
        size = model.model_size()
        assert size.approximate
        assert size.total == 4  # two occupied runs in the 5-bin bitmap


class TestSaveLoad:
    def _model(self, **kw):
        rng = np.random.default_rng(30)
        X = rng.normal(size=(70, 5))
        defaults = dict(m=9, epsilon=0.15, kernel=Kernel.rbf(), seed=8)
        defaults.update(kw)
        return fit(X, **defaults), X

    def test_round_trip_scores_bit_identical(self, tmp_path):
        model, _ = self._model()
        path = tmp_path / "model.json"
        model.save(path)
        clone = load(path)
        probes = np.random.default_rng(31).normal(size=(100, 5)) * 2
        assert np.array_equal(model.decision_score(probes), clone.decision_score(probes))

    def test_round_trip_binned(self, tmp_path):
        model, X = self._model(mode="binned")
        path = tmp_path / "model.json"
        model.save(path)
        clone = load(path)
        assert np.array_equal(model.decision_score(X), clone.decision_score(X))

    def test_saved_bytes_are_stable(self, tmp_path):
        model, _ = self._model()
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        model.save(p1)
        load(p1).save(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_file_is_malformed(self, tmp_path):
        model, _ = self._model()
        path = tmp_path / "model.json"
        model.save(path)
        path.write_bytes(path.read_bytes()[:-40])
        with pytest.raises(ModelFileError):
            load(path)

    def test_future_version_rejected(self, tmp_path):
        model, _ = self._model()
        path = tmp_path / "model.json"
        model.save(path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelFileError, match="format_version"):
            load(path)

    def test_out_of_range_epsilon_rejected_at_load(self, tmp_path):
        model, _ = self._model()
        path = tmp_path / "model.json"
        model.save(path)
        doc = json.loads(path.read_text())
        doc["epsilon"] = 2.0
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelFileError, match="epsilon"):
            load(path)

    def test_tampered_value_fails_checksum(self, tmp_path):
        model, _ = self._model()
        path = tmp_path / "model.json"
        model.save(path)
        doc = json.loads(path.read_text())
        doc["per_direction"][0]["min_raw"] -= 1e-9
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelFileError, match="checksum"):
            load(path)

    def test_standardizer_round_trips(self, tmp_path):
        rng = np.random.default_rng(33)
        X = rng.normal(size=(60, 3)) * np.array([100.0, 0.01, 1.0])
        std = fit_standardizer(X)
        model = fit(X, m=6, epsilon=0.2, kernel=Kernel.rbf(), seed=2, standardizer=std)
        assert np.all(model.decision_score(X) == 1.0)
        path = tmp_path / "model.json"
        model.save(path)
        clone = load(path)
        probes = rng.normal(size=(40, 3)) * np.array([120.0, 0.02, 2.0])
        assert np.array_equal(model.decision_score(probes), clone.decision_score(probes))
