import numpy as np
import pytest

from dicnet.engine.conf import conf
from dicnet.engine.diffcore import Graph
from dicnet.engine.errors import ConfigError, DataError, ShapeError
from dicnet.engine.params import ParamStore
from dicnet.losses import (LossBreakdown, LossWeights, classification_loss,
                           contrastive_loss_total, contrastive_pair_loss,
                           cosine_similarity, objective,
                           reconstruction_loss, total_loss)


# loop-by-loop reference implementations


def ref_reconstruction (X, X_hat, W):
    l = len(X)
    n = W.shape[0]
    total = 0.
    for v in range(l):
        m = X[v].shape[1]
        s = 0.
        for i in range(n):
            s += W[i, v] * np.sum((X_hat[v][i] - X[v][i]) ** 2)
        total += s / m / n
    return total / l


def ref_cos (a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    return 0. if na == 0 or nb == 0 else np.dot(a, b) / (na * nb)


def ref_pair (Zv, Zu, wv, wu, tau):
    n = Zv.shape[0]
    total = 0.
    for i in range(n):
        if not (wv[i] and wu[i]):
            continue
        num = np.exp(ref_cos(Zv[i], Zu[i]) / tau)
        neg = 0.
        for j in range(n):
            if j == i:
                continue
            neg += np.exp(ref_cos(Zv[i], Zu[j]) / tau) * wu[j]
            neg += np.exp(ref_cos(Zv[i], Zv[j]) / tau) * wv[j]
        total += np.log(max(num / (num + neg), conf.LOG_EPS))
    return -total / n


def ref_bce (P, Y, G):
    n, c = P.shape
    total = 0.
    eps = conf.LOG_EPS
    for i in range(n):
        for j in range(c):
            if G[i, j]:
                p = min(max(P[i, j], eps), 1 - eps)
                total += Y[i, j] * np.log(p) + (1 - Y[i, j]) * np.log(1 - p)
    return -total / (n * c)


@pytest.fixture
def views (rng):
    X = [rng.standard_normal((6, 4)), rng.standard_normal((6, 3))]
    X_hat = [x + rng.standard_normal(x.shape) for x in X]
    W = np.array([[1, 1], [1, 0], [0, 1], [1, 1], [1, 1], [0, 1]], float)
    return X, X_hat, W


class TestReconstruction:

    def test_matches_reference (self, views):
        X, X_hat, W = views
        assert reconstruction_loss(X, X_hat, W) == \
            pytest.approx(ref_reconstruction(X, X_hat, W))

    def test_perfect_reconstruction (self, views):
        X, X_hat, W = views
        assert reconstruction_loss(X, X, W) == 0.

    def test_missing_rows_are_ignored (self, views):
        X, X_hat, W = views
        changed = [x.copy() for x in X_hat]
        changed[0][2] += 100.
        changed[1][1] -= 100.
        assert reconstruction_loss(X, changed, W) == \
            reconstruction_loss(X, X_hat, W)

    def test_without_batch_mean (self, views):
        X, X_hat, W = views
        assert reconstruction_loss(X, X_hat, W, False) == \
            pytest.approx(6 * reconstruction_loss(X, X_hat, W))

    def test_shape_errors (self, views):
        X, X_hat, W = views
        with pytest.raises(ShapeError):
            reconstruction_loss(X, X_hat[:1], W)
        with pytest.raises(ShapeError):
            reconstruction_loss(X, [X_hat[0], X_hat[0]], W)


class TestCosine:

    def test_values (self):
        assert cosine_similarity([1., 0.], [0., 2.]) == 0.
        assert cosine_similarity([1., 1.], [2., 2.]) == pytest.approx(1.)
        assert cosine_similarity([1., 2.], [-1., -2.]) == pytest.approx(-1.)
        assert -1. <= cosine_similarity([1e-300, 1.], [1e-300, 1.]) <= 1.

    def test_zero_vector (self):
        assert cosine_similarity([0., 0.], [1., 2.]) == 0.

    def test_half_right_angle (self):
        assert cosine_similarity([1., 0.], [1., 1.]) == 0.7071067811865475

    def test_symmetric (self, rng):
        for _ in range(50):
            a, b = rng.uniform(-2., 2., (2, 5))
            assert cosine_similarity(a, b) == cosine_similarity(b, a)


class TestContrastive:

    @pytest.mark.parametrize('tau', [.5, 1., .1])
    def test_pair_matches_reference (self, rng, tau):
        Zv = rng.standard_normal((5, 3))
        Zu = rng.standard_normal((5, 3))
        wv = np.array([1., 1., 0., 1., 1.])
        wu = np.array([1., 0., 1., 1., 1.])
        assert contrastive_pair_loss(Zv, Zu, wv, wu, tau) == \
            pytest.approx(ref_pair(Zv, Zu, wv, wu, tau), rel = 1e-10)

    def test_total_is_half_the_ordered_sum (self, rng):
        Z = [rng.standard_normal((4, 2)) for _ in range(3)]
        W = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1], [1, 0, 1]], float)
        expected = .5 * sum(ref_pair(Z[v], Z[u], W[:, v], W[:, u], .5)
                            for v in range(3) for u in range(3) if u != v)
        assert contrastive_loss_total(Z, W, .5) == pytest.approx(expected)

    def test_single_view_is_zero (self, rng):
        assert contrastive_loss_total([rng.standard_normal((3, 2))],
                                      np.ones((3, 1)), .5) == 0.

    def test_positive_for_available_pairs (self, rng):
        Z = [rng.standard_normal((4, 3)) for _ in range(2)]
        assert contrastive_loss_total(Z, np.ones((4, 2)), .5) > 0.

    def test_no_co_available_pair_is_zero (self, rng):
        Z = [rng.standard_normal((4, 3)) for _ in range(2)]
        W = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], float)
        assert contrastive_loss_total(Z, W, .5) == 0.

    def test_missing_rows_are_ignored (self, rng):
        Z = [rng.standard_normal((4, 3)) for _ in range(2)]
        W = np.array([[1, 1], [1, 0], [1, 1], [0, 1]], float)
        other = [Z[0].copy(), Z[1].copy()]
        other[1][1] = rng.standard_normal(3) * 50
        other[0][3] = 0.
        assert contrastive_loss_total(Z, W, .5) == \
            contrastive_loss_total(other, W, .5)

    def test_aligned_views_score_lower (self, rng):
        Z = rng.standard_normal((6, 4))
        W = np.ones((6, 2))
        aligned = contrastive_loss_total([Z, Z * 2], W, .5)
        shuffled = contrastive_loss_total([Z, Z[::-1] * 2], W, .5)
        assert aligned < shuffled

    def test_row_scaling_changes_nothing (self, rng):
        Z = [rng.standard_normal((6, 3)) for _ in range(3)]
        W = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1],
                      [1, 0, 1], [1, 1, 1], [1, 1, 0]], float)
        scaled = [z * rng.uniform(.1, 10., (6, 1)) for z in Z]
        assert contrastive_loss_total(scaled, W, .5) == \
            pytest.approx(contrastive_loss_total(Z, W, .5), rel = 1e-12)

    def test_invalid_temperature (self, rng):
        Z = [rng.standard_normal((3, 2))] * 2
        with pytest.raises(ConfigError):
            contrastive_loss_total(Z, np.ones((3, 2)), 0.)

    def test_gradient_ignores_missing_rows (self, rng):
        params = ParamStore({'a': rng.standard_normal((4, 3)),
                             'b': rng.standard_normal((4, 3))})
        W = np.array([[1, 1], [1, 0], [1, 1], [1, 1]], float)
        g = Graph(params)
        loss = contrastive_loss_total([g.param('a'), g.param('b')], W, .5)
        g.forward(loss)
        grads = g.backward(loss)
        np.testing.assert_array_equal(grads['b'][1], 0.)
        assert np.any(grads['a'][1] != 0)


class TestClassification:

    def test_matches_reference (self, rng):
        P = rng.uniform(.01, .99, (5, 4))
        Y = (rng.random((5, 4)) < .5).astype(float)
        G = (rng.random((5, 4)) < .7).astype(float)
        assert classification_loss(P, Y, G) == \
            pytest.approx(ref_bce(P, Y, G))

    def test_hidden_labels_do_not_matter (self, rng):
        P = rng.uniform(.01, .99, (4, 3))
        Y = (rng.random((4, 3)) < .5).astype(float)
        G = np.ones((4, 3))
        G[1, 2] = G[3, 0] = 0.
        flipped = Y.copy()
        flipped[1, 2] = 1. - flipped[1, 2]
        flipped[3, 0] = 1. - flipped[3, 0]
        assert classification_loss(P, Y, G) == \
            classification_loss(P, flipped, G)

    def test_extreme_probabilities_are_clamped (self):
        value = classification_loss(np.array([[0., 1.]]),
                                    np.array([[1., 0.]]), np.ones((1, 2)))
        assert np.isfinite(value)
        assert value == pytest.approx(-np.log(conf.LOG_EPS), rel = 1e-3)

    def test_everything_hidden_is_zero (self, rng):
        P = rng.uniform(size = (3, 2))
        assert classification_loss(P, np.ones((3, 2)), np.zeros((3, 2))) == 0.

    def test_errors (self):
        with pytest.raises(ShapeError):
            classification_loss(np.ones((2, 2)) / 2, np.ones((2, 3)),
                                np.ones((2, 3)))
        with pytest.raises(DataError):
            classification_loss(np.ones((1, 1)) / 2, [[2.]], [[1.]])


class TestObjective:

    def test_breakdown_identity (self):
        b = total_loss(.7, 1.5, 3., LossWeights(.1, .2, .5))
        assert b.total == .7 + .1 * 1.5 + .2 * 3.
        assert b.to_record() == {'total': b.total, 'mc': .7, 'ic': 1.5,
                                 'fr': 3.}

    def test_mean_keeps_identity (self):
        w = LossWeights(.5, .25)
        m = LossBreakdown.mean([total_loss(1., 2., 4., w),
                                total_loss(3., 0., 8., w)])
        assert (m.mc, m.ic, m.fr) == (2., 1., 6.)
        assert m.total == 2. + .5 * 1. + .25 * 6.

    def test_objective_node (self):
        g = Graph()
        root = objective(g.const(1.), g.const(2.), g.const(4.),
                         LossWeights(.5, .25))
        assert float(g.forward(root)[0, 0]) == 3.

    def test_weight_validation (self):
        with pytest.raises(ConfigError):
            LossWeights(-1.)
        with pytest.raises(ConfigError):
            LossWeights(tau = 0.)
        assert LossWeights().to_dict() == {'beta': conf.BETA,
                                           'gamma': conf.GAMMA,
                                           'tau': conf.TAU}


class TestContrastiveSweep:

    def test_random_instances_match_reference (self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 9))
            l = int(rng.integers(2, 4))
            d = int(rng.integers(1, 5))
            tau = float(rng.uniform(.1, 2.))
            Z = [rng.standard_normal((n, d)) for _ in range(l)]
            W = (rng.random((n, l)) < .7).astype(float)
            # every sample keeps a view
            W[W.sum(axis = 1) == 0, 0] = 1.
            expected = .5 * sum(ref_pair(Z[v], Z[u], W[:, v], W[:, u], tau)
                                for v in range(l) for u in range(l)
                                if u != v)
            assert abs(contrastive_loss_total(Z, W, tau) - expected) < 1e-10
