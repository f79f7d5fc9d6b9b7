"""Adam optimiser."""

import numpy as np

from .conf import conf
from .errors import ParamError, ShapeError, ConfigError

__all__ = ('AdamState', 'adam_step')


class AdamState (object):
    """Moment estimates and step counter for :func:`adam_step`.

AdamState(lr = 1e-3[, beta1][, beta2][, eps])

Moment accumulators are created lazily (as zeros) the first time a parameter
is stepped.  Defaults for ``beta1``, ``beta2`` and ``eps`` come from
:obj:`conf`.

"""

    def __init__ (self, lr = 1e-3, beta1 = None, beta2 = None, eps = None):
        self.lr = float(lr)
        self.beta1 = conf.ADAM_BETA1 if beta1 is None else float(beta1)
        self.beta2 = conf.ADAM_BETA2 if beta2 is None else float(beta2)
        self.eps = conf.ADAM_EPS if eps is None else float(eps)
        if not self.lr > 0:
            raise ConfigError('learning rate must be > 0; got {0}'
                              .format(self.lr))
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError('Adam betas must be in [0, 1)')
        #: Number of completed steps.
        self.step = 0
        #: ``{name: first moment}``.
        self.m = {}
        #: ``{name: second moment}``.
        self.v = {}


def adam_step (params, grads, state):
    """Apply one Adam update with bias correction.

adam_step(params, grads, state) -> params

:arg params: :class:`params.ParamStore` to update (left unchanged).
:arg grads: ``{name: gradient}`` covering every parameter in ``params``.
:arg state: :class:`AdamState`, updated in place.

:return: a new :class:`params.ParamStore`.

"""
    missing = [name for name in params if name not in grads]
    if missing:
        raise ParamError('missing gradient for {0}'.format(', '.join(missing)))
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    c1 = 1. - b1 ** t
    c2 = 1. - b2 ** t
    new = {}
    for name in params:
        p = params[name]
        g = np.asarray(grads[name], dtype = np.float64)
        if g.shape != p.shape:
            raise ShapeError('adam_step: ' + name, p.shape, g.shape)
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(p)
            v = np.zeros_like(p)
        m = b1 * m + (1. - b1) * g
        v = b2 * v + (1. - b2) * (g * g)
        state.m[name] = m
        state.v[name] = v
        new[name] = p - state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params.replace(new)
