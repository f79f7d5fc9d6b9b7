from itertools import product

import numpy as np
import pytest

from dicnet.engine.errors import MetricError, ShapeError
from dicnet.metrics import (EvalReport, auc_adapted, average_precision,
                            evaluate_all, hamming_loss, ranking_loss)


# enumeration oracles


def oracle_ap (P, Y):
    values = []
    for p, y in zip(P, Y):
        pos = [j for j in range(len(y)) if y[j]]
        if not pos:
            continue

        def rank (j):
            # ties go to the lower label index
            return 1 + sum(1 for k in range(len(p))
                           if p[k] > p[j] or (p[k] == p[j] and k < j))

        values.append(np.mean([
            sum(1 for k in pos if rank(k) <= rank(j)) / float(rank(j))
            for j in pos]))
    return np.mean(values)


def oracle_rl (P, Y):
    values = []
    for p, y in zip(P, Y):
        pairs = [(a, b) for a, b in product(range(len(y)), repeat = 2)
                 if y[a] and not y[b]]
        if not pairs:
            continue
        values.append(sum(1. if p[a] < p[b] else .5 if p[a] == p[b] else 0.
                          for a, b in pairs) / len(pairs))
    return np.mean(values)


def oracle_auc (P, Y):
    values = []
    for p, y in zip(P.T, Y.T):
        pairs = [(a, b) for a, b in product(range(len(y)), repeat = 2)
                 if y[a] and not y[b]]
        if not pairs:
            continue
        values.append(sum(1. if p[a] > p[b] else .5 if p[a] == p[b] else 0.
                          for a, b in pairs) / len(pairs))
    return np.mean(values)


def random_instance (rng, n, c):
    Y = (rng.random((n, c)) < .5).astype(float)
    # coarse scores so ties happen
    P = np.round(rng.random((n, c)), 1)
    return P, Y


class TestHandCases:

    def test_average_precision (self):
        assert average_precision([[.9, .1]], [[1, 0]]) == 1.
        assert average_precision([[.3, .5, .8]], [[1, 0, 1]]) == \
            pytest.approx(5. / 6, abs = 1e-15)

    def test_reversed_single_positive (self):
        assert average_precision([[.1, .2, .3, .4]], [[1, 0, 0, 0]]) == \
            pytest.approx(.25)

    def test_ranking_loss (self):
        assert ranking_loss([[.9, .1]], [[1, 0]]) == 0.
        assert ranking_loss([[.3, .5, .8]], [[1, 0, 1]]) == .5
        assert ranking_loss([[.5, .5, .5]], [[1, 0, 1]]) == .5

    def test_hamming_loss (self):
        assert hamming_loss([[1, 0, 1]], [[1, 0, 1]]) == 0.
        assert hamming_loss([[0, 1, 1]], [[1, 0, 1]]) == pytest.approx(2. / 3)
        assert hamming_loss([[0, 1, 0]], [[1, 0, 1]]) == 1.

    def test_auc (self):
        Y = np.array([[1], [0], [1], [0]])
        assert auc_adapted([[.9], [.8], [.4], [.1]], Y) == .75
        assert auc_adapted([[.9], [.1], [.8], [.2]], Y) == 1.
        assert auc_adapted(np.full((4, 1), .5), Y) == .5


class TestOracles:

    def test_random_instances (self, rng):
        checked = 0
        for _ in range(200):
            n, c = rng.integers(2, 7), rng.integers(2, 6)
            P, Y = random_instance(rng, n, c)
            try:
                ap = average_precision(P, Y)
            except MetricError:
                continue
            assert ap == pytest.approx(oracle_ap(P, Y), abs = 1e-12)
            checked += 1
            for ours, oracle in ((ranking_loss, oracle_rl),
                                 (auc_adapted, oracle_auc)):
                try:
                    value = ours(P, Y)
                except MetricError:
                    continue
                assert value == pytest.approx(oracle(P, Y), abs = 1e-12)
            P_bin = (P >= .5).astype(float)
            assert hamming_loss(P_bin, Y) == \
                pytest.approx(np.mean(P_bin != Y), abs = 1e-12)
        assert checked > 150

    def test_monotone_transform_invariance (self, rng):
        P, Y = random_instance(rng, 6, 5)
        Y[0] = [1, 0, 1, 0, 0]
        Y[:, 0] = [1, 0, 1, 0, 1, 0]
        Q = np.exp(3 * P) - 2
        assert average_precision(Q, Y) == average_precision(P, Y)
        assert ranking_loss(Q, Y) == ranking_loss(P, Y)
        assert auc_adapted(Q, Y) == auc_adapted(P, Y)

    def test_sample_permutation_invariance (self, rng):
        P, Y = random_instance(rng, 6, 4)
        Y[0] = [1, 0, 1, 0]
        Y[:, 0] = [1, 0, 1, 0, 1, 0]
        perm = rng.permutation(6)
        a = evaluate_all(P, (P >= .5).astype(float), Y)
        b = evaluate_all(P[perm], (P[perm] >= .5).astype(float), Y[perm])
        for m in ('ap', 'one_minus_hl', 'one_minus_rl', 'auc'):
            assert getattr(a, m) == pytest.approx(getattr(b, m), abs = 1e-12)


class TestSkipping:

    def test_degenerate_rows_and_columns_are_skipped (self):
        P = np.array([[.9, .2], [.4, .6], [.3, .1]])
        Y = np.array([[1, 0], [0, 0], [1, 1]])
        report = evaluate_all(P, (P >= .5).astype(float), Y)
        assert report.skipped == {'ap_samples': 1, 'rl_samples': 2,
                                  'auc_labels': 0}
        assert report.ap == pytest.approx(average_precision(P[[0, 2]],
                                                            Y[[0, 2]]))

    def test_all_skipped_is_an_error (self):
        with pytest.raises(MetricError):
            average_precision([[.5, .5]], [[0, 0]])
        with pytest.raises(MetricError):
            ranking_loss([[.5, .5]], [[1, 1]])
        with pytest.raises(MetricError):
            auc_adapted([[.5], [.2]], [[1], [1]])

    def test_input_errors (self):
        with pytest.raises(ShapeError):
            hamming_loss([[1, 0]], [[1, 0, 1]])
        with pytest.raises(MetricError):
            hamming_loss([[.5, 0]], [[1, 0]])
        with pytest.raises(MetricError):
            average_precision([[.5, .1]], [[2, 0]])


class TestReport:

    def test_single_run (self):
        P = np.array([[.9, .1], [.2, .7]])
        Y = np.array([[1, 0], [0, 1]])
        report = evaluate_all(P, (P >= .5).astype(float), Y, seed = 3)
        assert report.ap == 1. and report.auc == 1.
        assert report.one_minus_hl == 1. and report.one_minus_rl == 1.
        assert report.std('ap') == 0.
        assert report.seeds == [3]

    def test_combine (self):
        runs = [{'seed': s, 'ap': ap, 'one_minus_hl': .9,
                 'one_minus_rl': .8, 'auc': .7}
                for s, ap in ((0, .3), (1, .5))]
        report = EvalReport.combine([EvalReport([r], 10, 3, {'ap_samples': 1})
                                     for r in runs])
        assert report.ap == pytest.approx(.4)
        assert report.std('ap') == pytest.approx(np.sqrt(.02))
        assert report.std('auc') == 0.
        assert report.skipped == {'ap_samples': 2}
        record = report.to_record()
        assert record['ap_std'] == pytest.approx(.1414, abs = 1e-4)
        assert len(record['runs']) == 2
        assert 'AP    0.4000 +- 0.1414' in report.format()

    def test_values_in_unit_interval (self, rng):
        P, Y = random_instance(rng, 6, 4)
        Y[0] = [1, 0, 1, 0]
        Y[:, 0] = [1, 0, 1, 0, 1, 0]
        record = evaluate_all(P, (P >= .5).astype(float), Y).to_record()
        for m in ('ap', 'one_minus_hl', 'one_minus_rl', 'auc'):
            assert 0. <= record[m] <= 1.

    def test_combine_needs_matching_test_sets (self):
        run = {'seed': 0, 'ap': .5, 'one_minus_hl': .5, 'one_minus_rl': .5,
               'auc': .5}
        with pytest.raises(MetricError):
            EvalReport.combine([EvalReport([run], 10, 3),
                                EvalReport([run], 11, 3)])
        with pytest.raises(MetricError):
            EvalReport.combine([])
