import numpy as np
import pytest

from dicnet.engine.diffcore import Graph
from dicnet.engine.errors import ConfigError, GradCheckError
from dicnet.engine.gradcheck import finite_diff_check
from dicnet.engine.params import ParamStore


def quadratic (params):
    g = Graph(params)
    w = g.param('w')
    return ((g.const([[1., 2.], [3., 4.]]) @ w).sigmoid() * w.T).sum() + \
        (g.param('b') * g.param('b')).sum()


def wrong (params):
    g = Graph(params)
    w = g.param('w')
    # the cubic term is a constant to the graph
    return (w * w).sum() + g.const(np.sum(params['w'] ** 3))


class TestFiniteDiffCheck:

    def test_correct_gradients_pass (self, rng):
        params = ParamStore({'w': rng.standard_normal((2, 2)),
                             'b': rng.standard_normal((1, 3))})
        report = finite_diff_check(quadratic, params, 1e-6, 1e-5, 20)
        assert report.passed
        assert report.max_error < 1e-5
        assert set(c.name for c in report) == set(['w', 'b'])
        assert len(report['w'].coords) == 4

    def test_wrong_gradients_fail (self, rng):
        params = ParamStore({'w': rng.uniform(1., 2., (2, 2))})
        report = finite_diff_check(wrong, params)
        assert not report.passed
        assert not report['w'].passed
        assert 'FAIL' in report.format()

    def test_coordinates_are_sampled (self, rng):
        params = ParamStore({'w': rng.standard_normal((2, 2)),
                             'b': rng.standard_normal((1, 3))})
        a = finite_diff_check(quadratic, params, coords = 2, seed = 3)
        b = finite_diff_check(quadratic, params, coords = 2, seed = 3)
        assert len(a['b'].coords) == 2
        assert a['b'].coords == b['b'].coords

    def test_non_finite_loss (self):
        def log_loss (params):
            g = Graph(params)
            return g.param('x').log().sum()

        params = ParamStore({'x': [[1e-7]]})
        with pytest.raises(GradCheckError):
            finite_diff_check(log_loss, params, step = 1e-6)

    def test_invalid_step (self):
        with pytest.raises(ConfigError):
            finite_diff_check(quadratic, ParamStore(), step = 0.)
