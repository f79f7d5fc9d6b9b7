"""Mini-batch training with the loss-plateau and prediction-agreement stops.

Run directory
-------------

:func:`train` can record its progress in a directory (see :class:`RunDir`)::

    config.json           effective configuration (written by the caller)
    epochs.jsonl          one JSON record per epoch: epoch, losses
                          (total, mc, ic, fr), change_rate, stopped, reason
    timing.jsonl          one JSON record per epoch: epoch, duration (seconds)
    checkpoints/
        epoch_0005.npz    every CHECKPOINT_EVERY epochs, if set
        final.npz         the model when training stopped
    eval.json             test-set evaluation (written by the caller)

``epochs.jsonl`` depends only on the data, configuration and seeds; wall-clock
times are kept apart in ``timing.jsonl``.

"""

import json
import logging
import os
from time import perf_counter

import numpy as np

from .engine.conf import conf
from .engine.diffcore import Graph
from .engine.errors import ConfigError, DataError, ShapeError
from .engine.optim import AdamState, adam_step
from .engine.util import rng, check_rate, is_binary
from .losses import (LossWeights, LossBreakdown, reconstruction_loss,
                     contrastive_loss_total, classification_loss, objective,
                     total_loss)
from .model import fuse

__all__ = ('MODES', 'TrainConfig', 'TrainState', 'EpochReport', 'RunDir',
           'batches', 'build_objective', 'check_stopping', 'predict', 'train')

log = logging.getLogger(__name__)

MODES = ('semi-supervised', 'supervised')


class TrainConfig (object):
    """Training hyper-parameters.

TrainConfig([batch_size][, max_epochs][, stop_threshold][, weights]
            [, learning_rate][, seed][, mode][, threshold][, change_threshold]
            [, checkpoint_every])

Anything not given comes from :obj:`conf`.  Raises
:class:`engine.errors.ConfigError` for invalid values.

"""

    def __init__ (self, batch_size = None, max_epochs = None,
                  stop_threshold = None, weights = None, learning_rate = None,
                  seed = None, mode = None, threshold = None,
                  change_threshold = None, checkpoint_every = None):
        def get (x, default):
            return default if x is None else x

        self.batch_size = int(get(batch_size, conf.BATCH_SIZE))
        self.max_epochs = int(get(max_epochs, conf.MAX_EPOCHS))
        self.stop_threshold = float(get(stop_threshold, conf.STOP_THRESHOLD))
        self.weights = LossWeights() if weights is None else weights
        self.learning_rate = float(get(learning_rate, conf.LEARNING_RATE))
        self.seed = int(get(seed, conf.SEED))
        self.mode = get(mode, conf.MODE)
        self.threshold = float(get(threshold, conf.THRESHOLD))
        self.change_threshold = float(get(change_threshold,
                                          conf.CHANGE_THRESHOLD))
        self.checkpoint_every = int(get(checkpoint_every,
                                        conf.CHECKPOINT_EVERY))
        if self.batch_size < 2:
            raise ConfigError('batch size must be >= 2; got {0}'
                              .format(self.batch_size))
        if self.max_epochs < 1:
            raise ConfigError('max epochs must be >= 1; got {0}'
                              .format(self.max_epochs))
        if not self.stop_threshold > 0:
            raise ConfigError('stop threshold must be > 0; got {0}'
                              .format(self.stop_threshold))
        if not self.learning_rate > 0:
            raise ConfigError('learning rate must be > 0; got {0}'
                              .format(self.learning_rate))
        if self.mode not in MODES:
            raise ConfigError('unknown mode \'{0}\' (expected one of {1})'
                              .format(self.mode, ', '.join(MODES)))
        check_rate('threshold', self.threshold, high_open = False,
                   error = ConfigError)
        if self.change_threshold < 0:
            raise ConfigError('change threshold must be >= 0; got {0}'
                              .format(self.change_threshold))
        if self.checkpoint_every < 0:
            raise ConfigError('checkpoint interval must be >= 0; got {0}'
                              .format(self.checkpoint_every))

    @classmethod
    def from_settings (cls, settings = conf):
        """Build from a :class:`engine.settings.Settings` object."""
        weights = LossWeights(settings.BETA, settings.GAMMA, settings.TAU)
        return cls(settings.BATCH_SIZE, settings.MAX_EPOCHS,
                   settings.STOP_THRESHOLD, weights, settings.LEARNING_RATE,
                   settings.SEED, settings.MODE, settings.THRESHOLD,
                   settings.CHANGE_THRESHOLD, settings.CHECKPOINT_EVERY)

    def to_dict (self):
        d = {'batch_size': self.batch_size, 'max_epochs': self.max_epochs,
             'stop_threshold': self.stop_threshold,
             'learning_rate': self.learning_rate, 'seed': self.seed,
             'mode': self.mode, 'threshold': self.threshold,
             'change_threshold': self.change_threshold,
             'checkpoint_every': self.checkpoint_every}
        d.update(self.weights.to_dict())
        return d


class TrainState (object):
    """Loop state carried between epochs.

TrainState(config)

:ivar epoch: number of completed epochs.
:ivar last_loss: total loss of the previous epoch, ``None`` before the first.
:ivar last_pred: previous binarised test predictions, ``None`` before the
                 first.
:ivar adam: :class:`engine.optim.AdamState`.
:ivar rng: generator used for shuffling.

"""

    def __init__ (self, config):
        self.epoch = 0
        self.last_loss = None
        self.last_pred = None
        self.adam = AdamState(config.learning_rate)
        self.rng = rng(config.seed)


class EpochReport (object):
    """What happened in one epoch.

:ivar epoch: 1-based epoch index.
:ivar losses: :class:`losses.LossBreakdown`, the mean over the epoch's
              batches.
:ivar change_rate: fraction of test predictions that flipped since the last
                   epoch, or ``None`` (first epoch, no test samples).
:ivar duration: wall-clock seconds.
:ivar stopped: whether training stopped after this epoch.
:ivar reason: ``'loss_plateau'``, ``'prediction_agreement'``,
              ``'max_epochs'`` or ``None``.

"""

    def __init__ (self, epoch, losses, change_rate, duration, stopped = False,
                  reason = None):
        self.epoch = epoch
        self.losses = losses
        self.change_rate = change_rate
        self.duration = duration
        self.stopped = stopped
        self.reason = reason

    def __repr__ (self):
        return '<EpochReport {0} loss={1:.6g}{2}>'.format(
            self.epoch, self.losses.total,
            ' stopped: ' + self.reason if self.stopped else '')

    def to_record (self):
        """The deterministic fields, as a JSON-ready dict."""
        return {'epoch': self.epoch, 'losses': self.losses.to_record(),
                'change_rate': self.change_rate, 'stopped': self.stopped,
                'reason': self.reason}

    def timing_record (self):
        return {'epoch': self.epoch, 'duration': self.duration}


class RunDir (object):
    """Writer for a run directory; see the module docstring for the layout."""

    def __init__ (self, path):
        self.path = path
        self.checkpoints = os.path.join(path, 'checkpoints')
        os.makedirs(self.checkpoints, exist_ok = True)

    def file (self, name):
        return os.path.join(self.path, name)

    def reset_logs (self):
        for name in ('epochs.jsonl', 'timing.jsonl'):
            open(self.file(name), 'w').close()

    def _append (self, name, record):
        with open(self.file(name), 'a') as f:
            f.write(json.dumps(record, sort_keys = True))
            f.write('\n')

    def log_epoch (self, report):
        self._append('epochs.jsonl', report.to_record())
        self._append('timing.jsonl', report.timing_record())

    def write_json (self, name, data):
        with open(self.file(name), 'w') as f:
            json.dump(data, f, indent = 4, sort_keys = True)
            f.write('\n')

    def checkpoint (self, model, epoch = None):
        """Save ``model`` as ``epoch_XXXX.npz``, or ``final.npz`` if ``epoch``
is ``None``; returns the file name."""
        name = 'final.npz' if epoch is None \
               else 'epoch_{0:04d}.npz'.format(epoch)
        fn = os.path.join(self.checkpoints, name)
        model.save(fn)
        return fn

    @staticmethod
    def read_epochs (path):
        """Read the epoch records of a run directory."""
        with open(os.path.join(path, 'epochs.jsonl')) as f:
            return [json.loads(line) for line in f if line.strip()]


def build_objective (model, graph, views, W, Y, G, weights):
    """Build the full objective for one batch into ``graph``.

build_objective(model, graph, views, W, Y, G, weights) -> (total, parts)

:return: the total loss node and ``{'mc': node, 'ic': node, 'fr': node}``.

"""
    Z, X_hat, H, P = model.forward(graph, views, W)
    fr = reconstruction_loss(views, X_hat, W)
    ic = contrastive_loss_total(Z, W, weights.tau)
    mc = classification_loss(P, Y, G)
    return objective(mc, ic, fr, weights), {'mc': mc, 'ic': ic, 'fr': fr}


def check_stopping (state, loss, P_bin, sigma, change_threshold = None):
    """Apply both stopping rules after an epoch.

check_stopping(state, loss, P_bin, sigma[, change_threshold])
    -> (stop, reason, change_rate)

:arg state: :class:`TrainState`; when not stopping, its last loss and last
            predictions are replaced by ``loss`` and ``P_bin``.
:arg loss: this epoch's total loss.
:arg P_bin: ``n_t x c`` binarised test predictions.
:arg sigma: loss-plateau threshold: stop if ``|last - loss| < sigma``.
:arg change_threshold: stop if the fraction of flipped predictions is below
                       this; defaults to ``conf.CHANGE_THRESHOLD``.

:return: whether to stop, ``'loss_plateau'``, ``'prediction_agreement'`` or
         ``None``, and the change rate (``None`` if it could not be computed).

Nothing is compared on the first call; it only records the values.  With no
test samples only the loss rule applies.

"""
    if change_threshold is None:
        change_threshold = conf.CHANGE_THRESHOLD
    P_bin = np.asarray(P_bin, dtype = np.float64)
    if P_bin.ndim != 2:
        raise ShapeError('check_stopping', P_bin.shape, module = 'trainer')
    if not is_binary(P_bin):
        raise DataError('predictions passed to check_stopping are not binary')
    if state.last_pred is not None and state.last_pred.shape != P_bin.shape:
        raise ShapeError('check_stopping', state.last_pred.shape, P_bin.shape,
                         detail = 'test prediction shape changed',
                         module = 'trainer')
    rate = None
    stop = False
    reason = None
    if state.last_loss is not None:
        if P_bin.size:
            rate = float(np.mean(P_bin != state.last_pred))
        if abs(state.last_loss - loss) < sigma:
            stop, reason = True, 'loss_plateau'
        elif rate is not None and rate < change_threshold:
            stop, reason = True, 'prediction_agreement'
    if not stop:
        state.last_loss = float(loss)
        state.last_pred = P_bin.copy()
    return stop, reason, rate


def predict (model, ds, threshold = None):
    """Run the network forward on a dataset.

predict(model, ds[, threshold]) -> (P, P_bin)

:arg model: :class:`model.DICNetModel`.
:arg ds: :class:`data.MultiViewDataset` whose dims match the model.
:arg threshold: scores ``>= threshold`` are positive; defaults to
                ``conf.THRESHOLD``.

:return: ``n x c`` continuous scores and their 0/1 binarisation.

"""
    if threshold is None:
        threshold = conf.THRESHOLD
    cfg = model.config
    if ds.dims != cfg.dims or ds.c != cfg.c:
        raise ShapeError('predict', (ds.n, ds.dims, ds.c),
                         (cfg.dims, cfg.c),
                         detail = 'dataset and model disagree',
                         module = 'trainer')
    if ds.n == 0:
        P = np.zeros((0, ds.c))
    else:
        g = Graph(model.params)
        Z = [model.encode(v, g.const(x)) for v, x in enumerate(ds.views)]
        P = g.forward(model.classify(fuse(Z, ds.W)))
    return P, (P >= threshold).astype(np.float64)


def batches (order, size):
    """Cut a sample order into batches of ``size``.

batches(order, size) -> list of index arrays

The last batch may be smaller; a single leftover sample joins the batch
before it, since a one-sample batch has no contrastive negatives.

"""
    bounds = list(range(0, len(order), size)) + [len(order)]
    if len(bounds) > 2 and bounds[-1] - bounds[-2] == 1:
        del bounds[-2]
    return [order[a:b] for a, b in zip(bounds[:-1], bounds[1:])]


def _pool (train_ds, test_ds, mode):
    """Samples seen by training: labelled training rows, plus test rows with
their labels withheld in semi-supervised mode."""
    if mode == 'supervised' or test_ds is None or test_ds.n == 0:
        return (list(train_ds.views), np.array(train_ds.W),
                np.array(train_ds.Y), np.array(train_ds.G))
    views = [np.concatenate([a, b]) for a, b in zip(train_ds.views,
                                                    test_ds.views)]
    W = np.concatenate([train_ds.W, test_ds.W])
    hidden = np.zeros((test_ds.n, test_ds.c))
    Y = np.concatenate([train_ds.Y, hidden])
    G = np.concatenate([train_ds.G, hidden])
    return views, W, Y, G


def train (model, train_ds, test_ds, config, run_dir = None):
    """Train a model.

train(model, train_ds, test_ds, config[, run_dir]) -> (model, reports)

:arg model: initial :class:`model.DICNetModel` (left unchanged).
:arg train_ds: labelled training :class:`data.MultiViewDataset`.
:arg test_ds: test dataset (may be ``None``); used for the prediction
              stopping rule and, in semi-supervised mode, as unlabelled
              training input.
:arg config: :class:`TrainConfig`.
:arg run_dir: optional :class:`RunDir` to log epochs and checkpoints to.

:return: the trained model and the list of :class:`EpochReport`, the last of
         which has ``stopped`` set.

Each epoch shuffles the pool of samples, takes one Adam step per batch of
``config.batch_size`` (cut by :func:`batches`), then predicts on the
test set and applies :func:`check_stopping`.

"""
    if train_ds.n == 0:
        raise DataError('training set is empty')
    if test_ds is not None and (test_ds.dims != train_ds.dims or
                                test_ds.c != train_ds.c):
        raise DataError('training and test sets have different shapes')
    views, W, Y, G = _pool(train_ds, test_ds, config.mode)
    N = W.shape[0]
    n_t = 0 if test_ds is None else test_ds.n
    log.info('training on %d samples (%d labelled, mode %s), %d test',
             N, train_ds.n, config.mode, n_t)
    if run_dir is not None:
        run_dir.reset_logs()
    state = TrainState(config)
    params = model.params
    weights = config.weights
    reports = []
    for epoch in range(1, config.max_epochs + 1):
        start = perf_counter()
        order = state.rng.permutation(N)
        parts = []
        for k, idx in enumerate(batches(order, config.batch_size)):
            graph = Graph(params)
            total, nodes = build_objective(
                model, graph, [x[idx] for x in views], W[idx], Y[idx], G[idx],
                weights)
            graph.forward(total)
            grads = graph.backward(total)
            values = dict((k, float(graph.value(n)[0, 0]))
                          for k, n in nodes.items())
            parts.append(total_loss(values['mc'], values['ic'], values['fr'],
                                    weights))
            log.debug('epoch %d batch %d: loss %.6g', epoch, k,
                      parts[-1].total)
            params = adam_step(params, grads, state.adam)
        model = model.with_params(params)
        losses = LossBreakdown.mean(parts)
        state.epoch = epoch
        if test_ds is not None:
            P_bin = predict(model, test_ds, config.threshold)[1]
        else:
            P_bin = np.zeros((0, train_ds.c))
        stop, reason, rate = check_stopping(state, losses.total, P_bin,
                                            config.stop_threshold,
                                            config.change_threshold)
        if not stop and epoch == config.max_epochs:
            stop, reason = True, 'max_epochs'
        report = EpochReport(epoch, losses, rate, perf_counter() - start,
                             stop, reason)
        reports.append(report)
        log.info('epoch %d: loss %.6g (mc %.6g, ic %.6g, fr %.6g)%s', epoch,
                 losses.total, losses.mc, losses.ic, losses.fr,
                 '' if rate is None else ', change rate {0:.3g}'.format(rate))
        if run_dir is not None:
            run_dir.log_epoch(report)
            if config.checkpoint_every and \
               epoch % config.checkpoint_every == 0:
                run_dir.checkpoint(model, epoch)
        if stop:
            log.info('stopped after epoch %d: %s', epoch, reason)
            break
    if run_dir is not None:
        run_dir.checkpoint(model)
    return model, reports
