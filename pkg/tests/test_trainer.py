import json
import logging
import os

import numpy as np
import pytest

from dicnet.data import MaskSpec, corrupt, generate_synthetic
from dicnet.engine.diffcore import Graph
from dicnet.engine.errors import ConfigError, DataError, ShapeError
from dicnet.engine.gradcheck import finite_diff_check
from dicnet.engine.settings import Settings
from dicnet.losses import LossWeights
from dicnet.model import DICNetModel, ModelConfig, init_model
from dicnet.trainer import (RunDir, TrainConfig, TrainState, batches,
                            build_objective, check_stopping, predict, train)


def config (**kwargs):
    kwargs.setdefault('batch_size', 16)
    kwargs.setdefault('max_epochs', 5)
    kwargs.setdefault('learning_rate', 1e-2)
    kwargs.setdefault('seed', 0)
    return TrainConfig(**kwargs)


class TestConfig:

    @pytest.mark.parametrize('kwargs', [
        dict(batch_size = 1), dict(max_epochs = 0), dict(stop_threshold = 0.),
        dict(learning_rate = -1.), dict(mode = 'transductive'),
        dict(threshold = 1.5), dict(change_threshold = -1.),
        dict(checkpoint_every = -1),
    ])
    def test_invalid (self, kwargs):
        with pytest.raises(ConfigError):
            TrainConfig(**kwargs)

    def test_from_settings (self):
        class Defaults (object):
            BATCH_SIZE = 8
            MAX_EPOCHS = 3
            STOP_THRESHOLD = 1e-3
            LEARNING_RATE = 1e-2
            SEED = 5
            MODE = 'supervised'
            THRESHOLD = .4
            CHANGE_THRESHOLD = 0.
            CHECKPOINT_EVERY = 1
            BETA = 0.
            GAMMA = .1
            TAU = 1.

        d = TrainConfig.from_settings(Settings(Defaults.__dict__)).to_dict()
        assert d['batch_size'] == 8 and d['mode'] == 'supervised'
        assert d['beta'] == 0. and d['tau'] == 1.


class TestStopping:

    def test_first_epoch_only_records (self):
        state = TrainState(config())
        stop, reason, rate = check_stopping(state, 1., np.ones((3, 2)), .1)
        assert not stop and reason is None and rate is None
        assert state.last_loss == 1.

    def test_loss_plateau (self):
        state = TrainState(config())
        P = np.ones((3, 2))
        check_stopping(state, 1., P, 1e-5)
        stop, reason, rate = check_stopping(state, 1. + 1e-6, 1. - P, 1e-5)
        assert stop and reason == 'loss_plateau'
        # the rate is still reported
        assert rate == 1.

    def test_prediction_agreement (self):
        state = TrainState(config())
        P = np.array([[1., 0.], [0., 1.]])
        check_stopping(state, 2., P, 1e-5, 1e-7)
        stop, reason, rate = check_stopping(state, 1., P, 1e-5, 1e-7)
        assert stop and reason == 'prediction_agreement' and rate == 0.

    def test_continues_and_updates (self):
        state = TrainState(config())
        P = np.array([[1., 0.], [0., 1.]])
        check_stopping(state, 2., P, 1e-5, .1)
        Q = P.copy()
        Q[0, 0] = 0.
        stop, reason, rate = check_stopping(state, 1., Q, 1e-5, .1)
        assert not stop and rate == .25
        assert state.last_loss == 1.
        np.testing.assert_array_equal(state.last_pred, Q)

    def test_empty_test_set_uses_loss_rule_only (self):
        state = TrainState(config())
        empty = np.zeros((0, 3))
        check_stopping(state, 2., empty, 1e-5, 1.)
        stop, reason, rate = check_stopping(state, 1., empty, 1e-5, 1.)
        assert not stop and rate is None

    def test_bad_predictions (self):
        state = TrainState(config())
        with pytest.raises(DataError):
            check_stopping(state, 1., np.array([[.5]]), .1)
        check_stopping(state, 1., np.ones((2, 2)), .1)
        with pytest.raises(ShapeError):
            check_stopping(state, 2., np.ones((3, 2)), .1)


class TestPredict:

    def test_threshold_is_inclusive (self, small_model, corrupted):
        P, P_bin = predict(small_model, corrupted)
        assert P.shape == (corrupted.n, corrupted.c)
        t = float(P[0, 0])
        np.testing.assert_array_equal(predict(small_model, corrupted, t)[1],
                                      (P >= t).astype(float))
        assert predict(small_model, corrupted, t)[1][0, 0] == 1.

    def test_dims_must_match (self, corrupted):
        model = init_model(ModelConfig([6, 5, 3], 4, [4], 2))
        with pytest.raises(ShapeError):
            predict(model, corrupted)


class TestBatches:

    @pytest.mark.parametrize('n, size, sizes', [
        (32, 16, [16, 16]), (33, 16, [16, 17]), (34, 16, [16, 16, 2]),
        (5, 16, [5]), (1, 16, [1]), (3, 2, [3]), (0, 4, []),
    ])
    def test_sizes (self, n, size, sizes):
        order = np.arange(n)[::-1]
        parts = batches(order, size)
        assert [len(b) for b in parts] == sizes
        if parts:
            np.testing.assert_array_equal(np.concatenate(parts), order)

    def test_no_single_sample_batch_in_training (self, small_model,
                                                 corrupted, caplog):
        caplog.set_level(logging.DEBUG, logger = 'dicnet.trainer')
        train_ds, test_ds = corrupted.train_test()
        # 40 pooled samples leave one over for batches of 13
        train(small_model, train_ds, test_ds,
              config(batch_size = 13, max_epochs = 1))
        assert len([r for r in caplog.records
                    if r.getMessage().startswith('epoch 1 batch')]) == 3


class TestObjective:

    def test_gradients_match_finite_differences (self):
        ds = corrupt(generate_synthetic(8, 2, 3, 3, 2, .1, 1),
                     MaskSpec(.25, .25, 1., 2))
        model = init_model(ModelConfig(ds.dims, ds.c, [5], 3, seed = 1))
        weights = LossWeights(.3, .2, .5)

        def loss (params):
            total, parts = build_objective(model.with_params(params),
                                           Graph(params), ds.views, ds.W,
                                           ds.Y, ds.G, weights)
            return total

        report = finite_diff_check(loss, model.params, 1e-6, 1e-4, 10)
        assert report.passed, report.format()

    def test_parts_combine (self, small_model, corrupted):
        g = Graph(small_model.params)
        weights = LossWeights(.3, .2, .5)
        total, parts = build_objective(small_model, g, corrupted.views,
                                       corrupted.W, corrupted.Y, corrupted.G,
                                       weights)
        value = float(g.forward(total)[0, 0])
        mc, ic, fr = (float(g.value(parts[k])[0, 0])
                      for k in ('mc', 'ic', 'fr'))
        assert value == pytest.approx(mc + .3 * ic + .2 * fr)


class TestTrain:

    def test_reports_and_determinism (self, small_model, corrupted):
        train_ds, test_ds = corrupted.train_test()
        a, ra = train(small_model, train_ds, test_ds, config())
        b, rb = train(small_model, train_ds, test_ds, config())
        assert a.params.equals(b.params)
        assert [r.to_record() for r in ra] == [r.to_record() for r in rb]
        assert ra[-1].stopped and all(not r.stopped for r in ra[:-1])
        assert [r.epoch for r in ra] == list(range(1, len(ra) + 1))
        for r in ra:
            s = r.losses
            assert s.total == s.mc + s.beta * s.ic + s.gamma * s.fr
        # the input model is left unchanged
        assert not a.params.equals(small_model.params)

    def test_seed_changes_the_run (self, small_model, corrupted):
        train_ds, test_ds = corrupted.train_test()
        a = train(small_model, train_ds, test_ds, config(max_epochs = 1))[0]
        b = train(small_model, train_ds, test_ds,
                  config(max_epochs = 1, seed = 1))[0]
        assert not a.params.equals(b.params)

    def test_max_epochs (self, small_model, corrupted):
        train_ds, test_ds = corrupted.train_test()
        reports = train(small_model, train_ds, test_ds,
                        config(max_epochs = 2, stop_threshold = 1e-300,
                               change_threshold = 0.))[1]
        assert len(reports) == 2
        assert reports[-1].reason == 'max_epochs'

    def test_loss_decreases (self, small_model, corrupted):
        train_ds, test_ds = corrupted.train_test()
        reports = train(small_model, train_ds, test_ds,
                        config(max_epochs = 20, stop_threshold = 1e-300,
                               change_threshold = 0.))[1]
        assert reports[-1].losses.total < reports[0].losses.total

    def test_test_labels_never_reach_the_loss (self, small_model, corrupted):
        train_ds, test_ds = corrupted.train_test()
        flipped = test_ds.derive(Y = 1. - test_ds.Y)
        a = train(small_model, train_ds, test_ds, config(max_epochs = 2))
        b = train(small_model, train_ds, flipped, config(max_epochs = 2))
        assert a[0].params.equals(b[0].params)
        assert [r.losses.total for r in a[1]] == \
            [r.losses.total for r in b[1]]

    def test_supervised_mode_ignores_test_features (self, small_model,
                                                    corrupted):
        train_ds, test_ds = corrupted.train_test()
        noisy = test_ds.derive(views = [x + 1. for x in test_ds.views])
        cfg = config(max_epochs = 1, mode = 'supervised')
        a = train(small_model, train_ds, test_ds, cfg)[0]
        b = train(small_model, train_ds, noisy, cfg)[0]
        assert a.params.equals(b.params)
        semi = config(max_epochs = 1)
        c = train(small_model, train_ds, test_ds, semi)[0]
        d = train(small_model, train_ds, noisy, semi)[0]
        assert not c.params.equals(d.params)

    def test_stops_on_loss_plateau (self, small_model, corrupted):
        train_ds, test_ds = corrupted.train_test()
        reports = train(small_model, train_ds, test_ds,
                        config(max_epochs = 10, stop_threshold = 1e6,
                               change_threshold = 0.))[1]
        assert len(reports) == 2
        assert reports[-1].stopped and reports[-1].reason == 'loss_plateau'

    def test_stops_on_prediction_agreement (self, small_model, corrupted):
        train_ds, test_ds = corrupted.train_test()
        reports = train(small_model, train_ds, test_ds,
                        config(max_epochs = 10, stop_threshold = 1e-300,
                               change_threshold = 2.))[1]
        assert len(reports) == 2
        assert reports[-1].reason == 'prediction_agreement'
        assert 0. <= reports[-1].change_rate <= 1.

    def test_agreement_needs_test_samples (self, small_model, corrupted):
        train_ds = corrupted.train_test()[0]
        reports = train(small_model, train_ds, None,
                        config(max_epochs = 3, stop_threshold = 1e-300,
                               change_threshold = 2.))[1]
        assert len(reports) == 3 and reports[-1].reason == 'max_epochs'

    def test_without_test_set (self, small_model, corrupted):
        train_ds = corrupted.train_test()[0]
        reports = train(small_model, train_ds, None, config(max_epochs = 2))[1]
        assert all(r.change_rate is None for r in reports)

    def test_empty_training_set (self, small_model, corrupted):
        with pytest.raises(DataError):
            train(small_model, corrupted.subset([]), None, config())

    def test_run_directory (self, small_model, corrupted, tmp_path):
        train_ds, test_ds = corrupted.train_test()
        path = str(tmp_path / 'run')
        model, reports = train(small_model, train_ds, test_ds,
                               config(max_epochs = 3, checkpoint_every = 2,
                                      stop_threshold = 1e-300,
                                      change_threshold = 0.),
                               RunDir(path))
        records = RunDir.read_epochs(path)
        assert records == [json.loads(json.dumps(r.to_record()))
                           for r in reports]
        with open(os.path.join(path, 'timing.jsonl')) as f:
            assert len(f.read().splitlines()) == 3
        ckpt = os.path.join(path, 'checkpoints')
        assert sorted(os.listdir(ckpt)) == ['epoch_0002.npz', 'final.npz']
        final = DICNetModel.load(os.path.join(ckpt, 'final.npz'))
        assert final.params.equals(model.params)


def tiny_problem (seed):
    ds = corrupt(generate_synthetic(8, 3, 3, [3, 4, 2], 2, .1, seed),
                 MaskSpec(.3, .3, 1., seed))
    model = init_model(ModelConfig(ds.dims, ds.c, [6], 4, seed = seed))
    return ds, model


class TestGradientsAndGating:

    @pytest.mark.parametrize('term', ['total', 'mc', 'ic', 'fr'])
    def test_each_term_matches_finite_differences (self, term):
        ds, model = tiny_problem(4)
        weights = LossWeights(.5, .5, .5)

        def loss (params):
            total, parts = build_objective(model.with_params(params),
                                           Graph(params), ds.views, ds.W,
                                           ds.Y, ds.G, weights)
            return total if term == 'total' else parts[term]

        report = finite_diff_check(loss, model.params, 1e-6, 1e-4, 20)
        assert report.passed, report.format()

    def test_masked_cells_change_nothing (self, rng):
        ds, model = tiny_problem(6)
        weights = LossWeights(.5, .5, .5)

        def evaluate (views, Y):
            g = Graph(model.params)
            total = build_objective(model, g, views, ds.W, Y, ds.G,
                                    weights)[0]
            value = g.forward(total)
            return value, g.backward(total)

        base_value, base_grads = evaluate(ds.views, ds.Y)
        missing = [(v, i) for v in range(ds.l)
                   for i in np.flatnonzero(ds.W[:, v] == 0)]
        hidden = list(zip(*np.nonzero(ds.G == 0)))
        assert missing and hidden
        for k in range(100):
            views = [np.array(x) for x in ds.views]
            Y = np.array(ds.Y)
            if k % 2:
                i, j = hidden[rng.integers(len(hidden))]
                Y[i, j] = 1. - Y[i, j]
            else:
                v, i = missing[rng.integers(len(missing))]
                views[v][i, rng.integers(ds.dims[v])] = \
                    rng.standard_normal() * 100
            value, grads = evaluate(views, Y)
            np.testing.assert_array_equal(value, base_value)
            for name in base_grads:
                np.testing.assert_array_equal(grads[name], base_grads[name])
