"""Finite-difference gradient checking."""

import logging

import numpy as np

from .conf import conf
from .errors import ConfigError, GradCheckError, GraphError
from .util import rng

__all__ = ('ParamCheck', 'GradCheckReport', 'finite_diff_check')

log = logging.getLogger(__name__)


class ParamCheck (object):
    """Result for one parameter: ``name``, ``max_error``, ``coords`` (flat
indices checked) and ``passed``."""

    def __init__ (self, name, max_error, coords, passed):
        self.name = name
        self.max_error = max_error
        self.coords = coords
        self.passed = passed

    def to_record (self):
        return {'name': self.name, 'max_error': self.max_error,
                'coords': len(self.coords), 'passed': self.passed}


class GradCheckReport (object):
    """Per-parameter results of :func:`finite_diff_check`."""

    def __init__ (self, checks, step, tolerance):
        #: List of :class:`ParamCheck`, in parameter order.
        self.checks = checks
        self.step = step
        self.tolerance = tolerance

    def __iter__ (self):
        return iter(self.checks)

    def __getitem__ (self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed (self):
        return all(c.passed for c in self.checks)

    @property
    def max_error (self):
        return max([c.max_error for c in self.checks] or [0.])

    def format (self):
        """Render a plain-text table."""
        width = max([len(c.name) for c in self.checks] + [9])
        lines = ['{0:<{w}}  {1:>12}  {2:>6}  {3}'.format(
            'parameter', 'max rel err', 'coords', 'result', w = width)]
        for c in self.checks:
            lines.append('{0:<{w}}  {1:>12.3e}  {2:>6}  {3}'.format(
                c.name, c.max_error, len(c.coords),
                'pass' if c.passed else 'FAIL', w = width))
        lines.append('step {0:g}, tolerance {1:g}: {2}'.format(
            self.step, self.tolerance, 'pass' if self.passed else 'FAIL'))
        return '\n'.join(lines)


def _loss_value (loss_builder, params, where):
    root = loss_builder(params)
    try:
        value = root.graph.forward(root)
    except GraphError:
        raise
    except ValueError as e:
        raise GradCheckError('loss failed at {0}: {1}'.format(where, e))
    if value.shape != (1, 1):
        raise GradCheckError('loss must be 1 x 1, got {0}'.format(value.shape))
    value = float(value[0, 0])
    if not np.isfinite(value):
        raise GradCheckError('loss is non-finite at {0}'.format(where))
    return value


def finite_diff_check (loss_builder, params, step = None, tolerance = None,
                       coords = None, seed = 0, floor = None):
    """Compare analytic gradients with central finite differences.

finite_diff_check(loss_builder, params[, step][, tolerance][, coords],
                  seed = 0[, floor]) -> report

:arg loss_builder: function taking a :class:`params.ParamStore` and returning
                   the scalar loss :class:`diffcore.Node` of a fresh graph
                   built on that store.
:arg params: the :class:`params.ParamStore` to check at.
:arg step: finite-difference step (``> 0``).
:arg tolerance: a parameter passes if every checked coordinate has relative
                error strictly below this.
:arg coords: number of coordinates sampled per parameter (all of them if the
             parameter is smaller).
:arg seed: seed for choosing coordinates.
:arg floor: relative error is ``|a - n| / max(|a|, |n|, floor)``, so
            gradients near zero are compared absolutely.

:return: a :class:`GradCheckReport`.

Defaults come from :obj:`conf` (``GRADCHECK_*``).

"""
    step = conf.GRADCHECK_STEP if step is None else float(step)
    tolerance = conf.GRADCHECK_TOLERANCE if tolerance is None \
                else float(tolerance)
    coords = conf.GRADCHECK_COORDS if coords is None else int(coords)
    floor = conf.GRADCHECK_FLOOR if floor is None else float(floor)
    if not step > 0:
        raise ConfigError('finite-difference step must be > 0; got {0}'
                          .format(step))
    if tolerance < 0:
        raise ConfigError('tolerance must be >= 0; got {0}'.format(tolerance))
    root = loss_builder(params)
    root.graph.forward(root)
    analytic = root.graph.backward(root)
    r = rng(seed)
    checks = []
    for name in params:
        value = params[name]
        a_grad = analytic.get(name)
        if a_grad is None:
            a_grad = np.zeros_like(value)
        k = min(coords, value.size)
        flat = np.sort(r.choice(value.size, size = k, replace = False))
        worst = 0.
        for i in flat:
            where = '{0}[{1}]'.format(name, np.unravel_index(i, value.shape))
            fs = []
            for sign in (1, -1):
                p = value.copy()
                p.flat[i] += sign * step
                fs.append(_loss_value(loss_builder, params.replace({name: p}),
                                      where))
            numeric = (fs[0] - fs[1]) / (2 * step)
            a = a_grad.flat[i]
            err = abs(a - numeric) / max(abs(a), abs(numeric), floor)
            worst = max(worst, err)
        check = ParamCheck(name, worst, [int(i) for i in flat],
                           worst < tolerance)
        log.debug('gradcheck %s: max relative error %.3e over %d coords',
                  name, worst, k)
        checks.append(check)
    return GradCheckReport(checks, step, tolerance)
