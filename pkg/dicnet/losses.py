"""The training objective and its terms.

Each loss takes network outputs as :class:`engine.diffcore.Node` objects and
data and masks as arrays, and returns a ``1 x 1`` node in the same graph.
Called with arrays only, a loss is evaluated on the spot and returns a float.

Every term gates its summands by multiplying with 0/1 indicator constants, so
values stored under a ``0`` indicator change neither the loss nor any
gradient.

"""

import logging

import numpy as np

from .engine.conf import conf
from .engine.diffcore import Graph, Node
from .engine.errors import ConfigError, ShapeError, DataError
from .engine.util import as_matrix, is_binary

__all__ = ('LossWeights', 'LossBreakdown', 'reconstruction_loss',
           'cosine_similarity', 'contrastive_pair_loss',
           'contrastive_loss_total', 'classification_loss', 'objective',
           'total_loss')

log = logging.getLogger(__name__)


class LossWeights (object):
    """Weights of the objective's terms.

LossWeights([beta][, gamma][, tau])

:arg beta: contrast weight, ``>= 0``; defaults to ``conf.BETA``.
:arg gamma: reconstruction weight, ``>= 0``; defaults to ``conf.GAMMA``.
:arg tau: contrast temperature, ``> 0``; defaults to ``conf.TAU``.

"""

    def __init__ (self, beta = None, gamma = None, tau = None):
        self.beta = float(conf.BETA if beta is None else beta)
        self.gamma = float(conf.GAMMA if gamma is None else gamma)
        self.tau = float(conf.TAU if tau is None else tau)
        if not (self.beta >= 0 and self.gamma >= 0):
            raise ConfigError('beta and gamma must be >= 0; got {0} and {1}'
                              .format(self.beta, self.gamma))
        _check_tau(self.tau)

    def __repr__ (self):
        return '<LossWeights beta={0:g} gamma={1:g} tau={2:g}>'.format(
            self.beta, self.gamma, self.tau)

    def to_dict (self):
        return {'beta': self.beta, 'gamma': self.gamma, 'tau': self.tau}


class LossBreakdown (object):
    """Values of the objective's terms for one batch or epoch.

LossBreakdown(mc, ic, fr, beta, gamma)

:attr:`total` is always ``mc + beta * ic + gamma * fr`` computed from the
stored values.

"""

    def __init__ (self, mc, ic, fr, beta, gamma):
        self.mc = float(mc)
        self.ic = float(ic)
        self.fr = float(fr)
        self.beta = float(beta)
        self.gamma = float(gamma)
        self.total = self.mc + self.beta * self.ic + self.gamma * self.fr

    def __repr__ (self):
        return '<LossBreakdown total={0:.6g} mc={1:.6g} ic={2:.6g} ' \
               'fr={3:.6g}>'.format(self.total, self.mc, self.ic, self.fr)

    @staticmethod
    def mean (breakdowns):
        """Average several breakdowns that share weights."""
        if not breakdowns:
            raise ValueError('no breakdowns to average')
        k = len(breakdowns)
        first = breakdowns[0]
        return LossBreakdown(sum(b.mc for b in breakdowns) / k,
                             sum(b.ic for b in breakdowns) / k,
                             sum(b.fr for b in breakdowns) / k,
                             first.beta, first.gamma)

    def to_record (self):
        return {'total': self.total, 'mc': self.mc, 'ic': self.ic,
                'fr': self.fr}


def _check_tau (tau):
    if not tau > 0:
        raise ConfigError('temperature must be > 0; got {0}'.format(tau))


def _graph (*xs):
    """Find the graph of any node among ``xs``; ``None`` means evaluate."""
    for x in xs:
        if isinstance(x, Node):
            return x.graph, False
        if isinstance(x, (list, tuple)):
            for y in x:
                if isinstance(y, Node):
                    return y.graph, False
    return Graph(), True


def _done (g, root, eager):
    return float(g.forward(root)[0, 0]) if eager else root


def _node (g, x):
    return x if isinstance(x, Node) else g.const(x)


def _column (w, n, what):
    w = np.asarray(w, dtype = np.float64).reshape(-1, 1)
    if w.shape[0] != n:
        raise ShapeError(what, w.shape, (n, 1), module = 'losses')
    if not is_binary(w):
        raise DataError('{0} has entries other than 0 and 1'.format(what))
    return w


# reconstruction


def reconstruction_loss (X, X_hat, W, batch_mean = True):
    """Masked reconstruction error averaged over views.

reconstruction_loss(X, X_hat, W, batch_mean = True) -> loss

:arg X: list of ``l`` target matrices, ``n x m_v``.
:arg X_hat: list of ``l`` reconstructions (nodes or arrays), same shapes.
:arg W: ``n x l`` missing-view indicator.
:arg batch_mean: divide each view's term by ``n`` as well; with ``False`` the
                 per-view sum is only divided by ``m_v``.

:return: ``(1/l) sum_v (1/m_v) sum_i W[i, v] ||x_hat_i - x_i||^2`` (times
         ``1/n`` per view if ``batch_mean``).

"""
    g, eager = _graph(X_hat, X)
    W = as_matrix(W, 'view mask')
    l = len(X)
    if l == 0 or len(X_hat) != l or W.shape[1] != l:
        raise ShapeError('reconstruction_loss', (len(X), len(X_hat)),
                         W.shape, detail = 'one matrix per view',
                         module = 'losses')
    n = W.shape[0]
    terms = []
    for v in range(l):
        x = _node(g, X[v])
        x_hat = _node(g, X_hat[v])
        if x.shape != x_hat.shape or x.shape[0] != n:
            raise ShapeError('reconstruction_loss view {0}'.format(v),
                             x.shape, x_hat.shape, module = 'losses')
        w = _column(W[:, v], n, 'view mask')
        d = x_hat - x
        err = (d * d).sum(axis = 1) * w
        scale = 1. / x.shape[1]
        if batch_mean and n:
            scale /= n
        terms.append(err.sum() * scale)
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return _done(g, total * (1. / l), eager)


# contrast


def cosine_similarity (a, b):
    """Cosine of the angle between two vectors.

cosine_similarity(a, b) -> s

A zero vector has similarity ``0`` with everything.

"""
    a = np.asarray(a, dtype = np.float64).ravel()
    b = np.asarray(b, dtype = np.float64).ravel()
    if a.shape != b.shape:
        raise ShapeError('cosine_similarity', a.shape, b.shape,
                         module = 'losses')
    na = np.sqrt(np.dot(a, a))
    nb = np.sqrt(np.dot(b, b))
    if na == 0 or nb == 0:
        log.debug('cosine similarity of a zero-norm vector taken as 0')
        return 0.
    return float(np.clip(np.dot(a, b) / (na * nb), -1., 1.))


def contrastive_pair_loss (Z_v, Z_u, w_v, w_u, tau):
    """Masked contrastive loss of view ``v`` against view ``u``.

contrastive_pair_loss(Z_v, Z_u, w_v, w_u, tau) -> loss

:arg Z_v: anchor view representations, ``n x d``.
:arg Z_u: other view representations, ``n x d``.
:arg w_v: availability of view ``v``, length ``n``.
:arg w_u: availability of view ``u``, length ``n``.
:arg tau: temperature, ``> 0``.

:return: ``-(1/n) sum_i w_v[i] w_u[i] log(e_ii / (e_ii + neg_i))`` where
         ``e_ij = exp(S(z_i^v, z_j^u) / tau)``, ``S`` is cosine similarity,
         and ``neg_i`` sums ``exp(S(z_i^v, z_j^r) / tau) w_r[j]`` over both
         views ``r`` in ``{u, v}`` and all ``j != i``.

The ratio is clamped to ``[conf.LOG_EPS, 1]`` before the log.

"""
    tau = float(tau)
    _check_tau(tau)
    g, eager = _graph(Z_v, Z_u)
    zv = _node(g, Z_v)
    zu = _node(g, Z_u)
    if zv.shape != zu.shape:
        raise ShapeError('contrastive_pair_loss', zv.shape, zu.shape,
                         module = 'losses')
    n = zv.shape[0]
    w_v = _column(w_v, n, 'view mask')
    w_u = _column(w_u, n, 'view mask')
    nv = g.normalize_rows(zv)
    nu = g.normalize_rows(zu)
    s_vu = nv @ nu.T
    s_vv = nv @ nv.T
    eye = np.eye(n)
    off = 1. - eye
    pos = (s_vu * eye).sum(axis = 1)
    num = (pos * (1. / tau)).exp()
    neg = ((s_vu * (1. / tau)).exp() * (off * w_u.T)).sum(axis = 1) + \
          ((s_vv * (1. / tau)).exp() * (off * w_v.T)).sum(axis = 1)
    ratio = (num / (num + neg)).clip(conf.LOG_EPS, 1.)
    loss = (ratio.log() * (w_v * w_u)).sum() * (-1. / max(n, 1))
    return _done(g, loss, eager)


def contrastive_loss_total (Z, W, tau):
    """Contrastive loss over all ordered pairs of distinct views.

contrastive_loss_total(Z, W, tau) -> loss

:arg Z: list of ``l`` representation matrices, ``n x d``.
:arg W: ``n x l`` missing-view indicator.
:arg tau: temperature.

:return: half the sum of :func:`contrastive_pair_loss` over ordered pairs
         ``(v, u)``, ``v != u``; ``0`` for a single view.

"""
    _check_tau(float(tau))
    g, eager = _graph(Z)
    W = as_matrix(W, 'view mask')
    l = len(Z)
    if W.shape[1] != l:
        raise ShapeError('contrastive_loss_total', W.shape, (W.shape[0], l),
                         module = 'losses')
    if l < 2:
        return _done(g, g.const(0.), eager)
    total = None
    for v in range(l):
        for u in range(l):
            if u == v:
                continue
            t = contrastive_pair_loss(_node(g, Z[v]), _node(g, Z[u]),
                                      W[:, v], W[:, u], tau)
            total = t if total is None else total + t
    return _done(g, total * .5, eager)


# classification


def classification_loss (P, Y, G):
    """Masked binary cross-entropy.

classification_loss(P, Y, G) -> loss

:arg P: ``n x c`` predicted probabilities.
:arg Y: ``n x c`` binary labels.
:arg G: ``n x c`` binary missing-label indicator.

:return: ``-(1/(nc)) sum G (Y log P + (1 - Y) log(1 - P))``, ``P`` clamped to
         ``[conf.LOG_EPS, 1 - conf.LOG_EPS]``.

"""
    g, eager = _graph(P)
    p = _node(g, P)
    Y = as_matrix(Y, 'labels')
    G = as_matrix(G, 'label mask')
    if Y.shape != p.shape or G.shape != p.shape:
        raise ShapeError('classification_loss', p.shape, Y.shape, G.shape,
                         module = 'losses')
    if not is_binary(Y):
        raise DataError('labels have entries other than 0 and 1')
    if not is_binary(G):
        raise DataError('label mask has entries other than 0 and 1')
    eps = conf.LOG_EPS
    pc = p.clip(eps, 1. - eps)
    ll = pc.log() * Y + (1. - pc).log() * (1. - Y)
    cells = max(p.shape[0] * p.shape[1], 1)
    return _done(g, (ll * G).sum() * (-1. / cells), eager)


# combination


def objective (mc, ic, fr, weights):
    """Combine loss nodes into ``mc + beta * ic + gamma * fr``."""
    return mc + ic * weights.beta + fr * weights.gamma


def total_loss (mc, ic, fr, weights):
    """Combine term values into a :class:`LossBreakdown`.

total_loss(mc, ic, fr, weights) -> breakdown

"""
    return LossBreakdown(mc, ic, fr, weights.beta, weights.gamma)
