"""Multi-label evaluation measures.

- :func:`average_precision`: example-based; labels of a sample are ranked by
  descending score, ties broken by label index.
- :func:`ranking_loss`: example-based; a (positive, negative) pair scores 1 if
  misordered and 1/2 if tied.
- :func:`hamming_loss`: fraction of cells where the binarised prediction and
  the truth differ.
- :func:`auc_adapted`: macro average over labels of the rank-statistic ROC
  AUC, ties counting 1/2.

Samples (for AP and RL) or labels (for AUC) that cannot be scored are skipped;
:func:`evaluate_all` reports how many.  Reports state ``1 - HL`` and ``1 - RL``
so that every headline value is better when larger.

"""

import logging

import numpy as np
from scipy.stats import rankdata

from .engine.errors import MetricError, ShapeError
from .engine.util import as_matrix, is_binary

__all__ = ('METRICS', 'average_precision', 'ranking_loss', 'hamming_loss',
           'auc_adapted', 'evaluate_all', 'EvalReport')

log = logging.getLogger(__name__)

#: Headline metric names, in report order.
METRICS = ('ap', 'one_minus_hl', 'one_minus_rl', 'auc')
_TITLES = {'ap': 'AP', 'one_minus_hl': '1-HL', 'one_minus_rl': '1-RL',
           'auc': 'AUC'}


def _inputs (P, Y, what):
    P = as_matrix(P, what)
    Y = as_matrix(Y, 'labels')
    if P.shape != Y.shape:
        raise ShapeError(what, P.shape, Y.shape, module = 'metrics')
    if not is_binary(Y):
        raise MetricError('labels have entries other than 0 and 1')
    return P, Y


def _average_precision (P, Y):
    P, Y = _inputs(P, Y, 'average_precision')
    c = Y.shape[1]
    values = []
    skipped = 0
    for p, y in zip(P, Y):
        if not y.any():
            skipped += 1
            continue
        order = np.lexsort((np.arange(c), -p))
        hits = y[order]
        # rank of each position and positives ranked at or above it
        found = np.cumsum(hits)[hits == 1]
        ranks = np.flatnonzero(hits) + 1.
        values.append(np.mean(found / ranks))
    if not values:
        raise MetricError('average precision: no sample has a positive label')
    return float(np.mean(values)), skipped


def _ranking_loss (P, Y):
    P, Y = _inputs(P, Y, 'ranking_loss')
    values = []
    skipped = 0
    for p, y in zip(P, Y):
        pos = p[y == 1][:, None]
        neg = p[y == 0][None, :]
        if not (pos.size and neg.size):
            skipped += 1
            continue
        bad = np.sum(pos < neg) + .5 * np.sum(pos == neg)
        values.append(bad / (pos.size * neg.size))
    if not values:
        raise MetricError('ranking loss: no sample has both positive and '
                          'negative labels')
    return float(np.mean(values)), skipped


def _auc (P, Y):
    P, Y = _inputs(P, Y, 'auc_adapted')
    values = []
    skipped = 0
    for p, y in zip(P.T, Y.T):
        n_pos = int(y.sum())
        n_neg = y.size - n_pos
        if not (n_pos and n_neg):
            skipped += 1
            continue
        ranks = rankdata(p)
        values.append((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.) /
                      (n_pos * n_neg))
    if not values:
        raise MetricError('AUC: no label has both positive and negative '
                          'samples')
    return float(np.mean(values)), skipped


def average_precision (P, Y):
    """Example-based average precision.

average_precision(P, Y) -> AP

:arg P: ``n x c`` scores.
:arg Y: ``n x c`` binary truth.

For each sample with a positive label, the mean over its positives ``j`` of
(positives ranked at or above ``j``) / (rank of ``j``); averaged over those
samples.

"""
    return _average_precision(P, Y)[0]


def ranking_loss (P, Y):
    """Fraction of misordered (positive, negative) label pairs per sample,
averaged over samples having both."""
    return _ranking_loss(P, Y)[0]


def hamming_loss (P_bin, Y):
    """Fraction of the ``n x c`` cells where ``P_bin`` and ``Y`` differ."""
    P_bin, Y = _inputs(P_bin, Y, 'hamming_loss')
    if not is_binary(P_bin):
        raise MetricError('hamming loss needs binary predictions')
    if not P_bin.size:
        raise MetricError('hamming loss of an empty prediction')
    return float(np.mean(P_bin != Y))


def auc_adapted (P, Y):
    """Macro-averaged label-wise ROC AUC over labels with both classes."""
    return _auc(P, Y)[0]


def evaluate_all (P, P_bin, Y, seed = None):
    """Compute every metric for one run.

evaluate_all(P, P_bin, Y[, seed]) -> report

:arg P: ``n x c`` scores.
:arg P_bin: their binarisation.
:arg Y: binary truth.
:arg seed: seed of the run, recorded in the report.

:return: a single-run :class:`EvalReport`; combine runs with
         :meth:`EvalReport.combine`.

"""
    ap, ap_skipped = _average_precision(P, Y)
    rl, rl_skipped = _ranking_loss(P, Y)
    auc, auc_skipped = _auc(P, Y)
    hl = hamming_loss(P_bin, Y)
    if ap_skipped or rl_skipped or auc_skipped:
        log.debug('skipped %d sample(s) for AP, %d for RL, %d label(s) for '
                  'AUC', ap_skipped, rl_skipped, auc_skipped)
    run = {'seed': seed, 'ap': ap, 'one_minus_hl': 1. - hl,
           'one_minus_rl': 1. - rl, 'auc': auc}
    skipped = {'ap_samples': ap_skipped, 'rl_samples': rl_skipped,
               'auc_labels': auc_skipped}
    n, c = as_matrix(Y, 'labels').shape
    return EvalReport([run], n, c, skipped)


class EvalReport (object):
    """Metric values over one or more runs.

EvalReport(runs, n_test, c[, skipped])

:arg runs: list of ``{'seed': seed, 'ap': ..., 'one_minus_hl': ...,
           'one_minus_rl': ..., 'auc': ...}`` dicts.
:arg n_test: number of evaluated samples (per run).
:arg c: number of labels.
:arg skipped: ``{'ap_samples', 'rl_samples', 'auc_labels'}`` skip counts,
              summed over runs.

The headline attributes ``ap``, ``one_minus_hl``, ``one_minus_rl`` and ``auc``
are means over runs; :meth:`std` gives the sample standard deviation (``0`` for
a single run).

"""

    def __init__ (self, runs, n_test, c, skipped = None):
        if not runs:
            raise MetricError('an evaluation report needs at least one run')
        self.runs = [dict(r) for r in runs]
        self.n_test = n_test
        self.c = c
        self.skipped = dict(skipped or {})

    def __getattr__ (self, k):
        if k in METRICS:
            return self.mean(k)
        raise AttributeError(k)

    def __repr__ (self):
        return '<EvalReport {0} run(s): {1}>'.format(
            len(self.runs), ', '.join('{0}={1:.4f}'.format(_TITLES[m],
                                                           self.mean(m))
                                      for m in METRICS))

    @property
    def seeds (self):
        return [r['seed'] for r in self.runs]

    def values (self, metric):
        return np.array([r[metric] for r in self.runs], dtype = np.float64)

    def mean (self, metric):
        return float(np.mean(self.values(metric)))

    def std (self, metric):
        v = self.values(metric)
        return float(np.std(v, ddof = 1)) if v.size > 1 else 0.

    @staticmethod
    def combine (reports):
        """Merge the runs of several reports over the same test-set shape."""
        reports = list(reports)
        if not reports:
            raise MetricError('no reports to combine')
        runs = []
        skipped = {}
        for r in reports:
            if (r.n_test, r.c) != (reports[0].n_test, reports[0].c):
                raise MetricError('cannot combine reports over different '
                                  'test sets')
            runs.extend(r.runs)
            for k, v in r.skipped.items():
                skipped[k] = skipped.get(k, 0) + v
        return EvalReport(runs, reports[0].n_test, reports[0].c, skipped)

    def to_record (self):
        """A JSON-ready dict of means, standard deviations and runs."""
        d = {'n_test': self.n_test, 'c': self.c, 'runs': self.runs,
             'skipped': self.skipped}
        for m in METRICS:
            d[m] = self.mean(m)
            d[m + '_std'] = self.std(m)
        return d

    def format (self):
        """Render as text: one ``name  mean +- std`` line per metric."""
        lines = ['{0} run(s), {1} test samples, {2} labels'.format(
            len(self.runs), self.n_test, self.c)]
        for m in METRICS:
            lines.append('{0:<5} {1:.4f} +- {2:.4f}'.format(
                _TITLES[m], self.mean(m), self.std(m)))
        return '\n'.join(lines)
