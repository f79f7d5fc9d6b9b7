"""The network: per-view autoencoders, weighted fusion and the classifier.

View ``v`` has an encoder ``m_v -> hidden... -> d`` and a decoder
``d -> reversed(hidden)... -> m_v``; hidden layers use ReLU and the last layer
of each network is linear.  The classifier is one fully connected layer
``d -> c`` followed by a sigmoid.

Parameters are stored in a :class:`engine.params.ParamStore` under the names

- ``enc<v>.w<k>``, ``enc<v>.b<k>``: weight (``in x out``) and bias
  (``1 x out``) of layer ``k`` of view ``v``'s encoder;
- ``dec<v>.w<k>``, ``dec<v>.b<k>``: likewise for the decoder;
- ``cls.w``, ``cls.b``: the classifier.

The forward methods take either a :class:`engine.diffcore.Node`, in which case
they add to that node's graph and return a node, or an array, in which case
they are evaluated immediately and return an array.

"""

import logging

import numpy as np

from .engine.conf import conf
from .engine.diffcore import Graph, Node
from .engine.errors import ConfigError, ShapeError, ParamError, DataError
from .engine.params import ParamStore
from .engine.util import rng, as_matrix, is_binary

__all__ = ('ModelConfig', 'DICNetModel', 'INIT_SCHEMES', 'init_bound',
           'init_model', 'fuse')

log = logging.getLogger(__name__)

INIT_SCHEMES = ('kaiming_uniform', 'xavier_uniform', 'zeros')


class ModelConfig (object):
    """Network shape and initialisation.

ModelConfig(dims, c[, hidden][, repr_dim][, init], seed = 0)

:arg dims: input dimensionality ``m_v`` of each view; ``l = len(dims)``.
:arg c: number of labels.
:arg hidden: encoder hidden widths (decoders use them reversed); defaults to
             ``conf.HIDDEN``.
:arg repr_dim: representation dimensionality ``d``; defaults to
               ``conf.REPR_DIM``.
:arg init: one of :data:`INIT_SCHEMES`; defaults to ``conf.INIT``.
:arg seed: seed for weight initialisation.

"""

    def __init__ (self, dims, c, hidden = None, repr_dim = None, init = None,
                  seed = 0):
        self.dims = [int(m) for m in dims]
        self.c = int(c)
        self.hidden = [int(h) for h in
                       (conf.HIDDEN if hidden is None else hidden)]
        self.repr_dim = int(conf.REPR_DIM if repr_dim is None else repr_dim)
        self.init = conf.INIT if init is None else init
        self.seed = int(seed)
        if not self.dims:
            raise ConfigError('model needs at least one view')
        if min(self.dims) < 1:
            raise ConfigError('view dims must be >= 1; got {0}'
                              .format(self.dims))
        if self.c < 1:
            raise ConfigError('label count must be >= 1; got {0}'
                              .format(self.c))
        if self.hidden and min(self.hidden) < 1:
            raise ConfigError('hidden widths must be >= 1; got {0}'
                              .format(self.hidden))
        if self.repr_dim < 1:
            raise ConfigError('representation dim must be >= 1; got {0}'
                              .format(self.repr_dim))
        if self.init not in INIT_SCHEMES:
            raise ConfigError('unknown init scheme \'{0}\' (expected one of '
                              '{1})'.format(self.init, ', '.join(INIT_SCHEMES)))

    def __repr__ (self):
        return '<ModelConfig dims={0} c={1} hidden={2} d={3}>'.format(
            self.dims, self.c, self.hidden, self.repr_dim)

    @property
    def l (self):
        return len(self.dims)

    def encoder_widths (self, v):
        return [self.dims[v]] + self.hidden + [self.repr_dim]

    def decoder_widths (self, v):
        return [self.repr_dim] + self.hidden[::-1] + [self.dims[v]]

    def layers (self):
        """Yield ``(prefix, k, fan_in, fan_out, before_relu)`` for every
layer, in parameter order."""
        for v in range(self.l):
            for net, widths in (('enc', self.encoder_widths(v)),
                                ('dec', self.decoder_widths(v))):
                last = len(widths) - 2
                for k in range(len(widths) - 1):
                    yield ('{0}{1}'.format(net, v), k, widths[k],
                           widths[k + 1], k < last)
        yield ('cls', None, self.repr_dim, self.c, False)

    def to_dict (self):
        return {'dims': self.dims, 'c': self.c, 'hidden': self.hidden,
                'repr_dim': self.repr_dim, 'init': self.init,
                'seed': self.seed}

    @classmethod
    def from_dict (cls, d):
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError('invalid model config: {0}'.format(e))

    @classmethod
    def from_settings (cls, dims, c, settings = conf, seed = None):
        """Build from ``HIDDEN``, ``REPR_DIM``, ``INIT`` and ``SEED``."""
        return cls(dims, c, settings.HIDDEN, settings.REPR_DIM, settings.INIT,
                   settings.SEED if seed is None else seed)


def init_bound (scheme, fan_in, fan_out, before_relu):
    """Half-width of the uniform distribution weights are drawn from."""
    if scheme == 'kaiming_uniform':
        gain = np.sqrt(2.) if before_relu else 1.
        return gain * np.sqrt(3. / fan_in)
    elif scheme == 'xavier_uniform':
        return np.sqrt(6. / (fan_in + fan_out))
    else:
        return 0.


def _names (prefix, k):
    if k is None:
        return prefix + '.w', prefix + '.b'
    return '{0}.w{1}'.format(prefix, k), '{0}.b{1}'.format(prefix, k)


class DICNetModel (object):
    """Encoders, decoders and classifier over one parameter store.

DICNetModel(config, params)

:arg config: :class:`ModelConfig`.
:arg params: :class:`engine.params.ParamStore` holding every parameter named
             by ``config``, with matching shapes.

Use :func:`init_model` to create a freshly initialised model.  Models are
values: training produces new models with :meth:`with_params`.

"""

    def __init__ (self, config, params):
        self.config = config
        self.params = params
        for prefix, k, fan_in, fan_out, relu in config.layers():
            w, b = _names(prefix, k)
            for name, shape in ((w, (fan_in, fan_out)), (b, (1, fan_out))):
                if name not in params:
                    raise ParamError('model parameter \'{0}\' missing'
                                     .format(name))
                if params[name].shape != shape:
                    raise ShapeError(name, shape, params[name].shape,
                                     module = 'model')

    def __repr__ (self):
        return '<DICNetModel {0!r}, {1} values>'.format(self.config,
                                                        self.params.size)

    def with_params (self, params):
        """Return a model with the same configuration and new parameters."""
        return DICNetModel(self.config, params)

    def _check_view (self, v):
        if not 0 <= v < self.config.l:
            raise ParamError('no view {0} (model has {1})'
                             .format(v, self.config.l))

    def _run (self, build, x, op, cols):
        if isinstance(x, Node):
            if x.shape[1] != cols:
                raise ShapeError(op, x.shape, (x.shape[0], cols),
                                 module = 'model')
            return build(x.graph, x)
        x = as_matrix(x, op)
        if x.shape[1] != cols:
            raise ShapeError(op, x.shape, (x.shape[0], cols), module = 'model')
        g = Graph(self.params)
        return g.forward(build(g, g.const(x)))

    def _mlp (self, g, x, prefix, n_layers):
        for k in range(n_layers):
            w, b = _names(prefix, k)
            x = x @ g.param(w) + g.param(b)
            if k < n_layers - 1:
                x = x.relu()
        return x

    def encode (self, v, X):
        """Map view ``v``'s ``n x m_v`` features to ``n x d`` representations.

encode(v, X) -> Z

"""
        self._check_view(v)
        n_layers = len(self.config.hidden) + 1
        return self._run(
            lambda g, x: self._mlp(g, x, 'enc{0}'.format(v), n_layers),
            X, 'encode view {0}'.format(v), self.config.dims[v])

    def decode (self, v, Z):
        """Map ``n x d`` representations back to view ``v``'s features.

decode(v, Z) -> X_hat

"""
        self._check_view(v)
        n_layers = len(self.config.hidden) + 1
        return self._run(
            lambda g, z: self._mlp(g, z, 'dec{0}'.format(v), n_layers),
            Z, 'decode view {0}'.format(v), self.config.repr_dim)

    def classify (self, H):
        """Return label probabilities ``sigmoid(H W + b)``, ``n x c``.

classify(H) -> P

"""
        return self._run(
            lambda g, h: (h @ g.param('cls.w') + g.param('cls.b')).sigmoid(),
            H, 'classify', self.config.repr_dim)

    def forward (self, graph, views, W):
        """Build the whole network into ``graph``.

forward(graph, views, W) -> (Z, X_hat, H, P)

:arg graph: :class:`engine.diffcore.Graph` over :attr:`params`.
:arg views: the ``l`` view matrices (arrays or nodes of ``graph``).
:arg W: ``n x l`` missing-view indicator.

:return: lists of per-view representation and reconstruction nodes, the
         fused representation node and the prediction node.

"""
        if len(views) != self.config.l:
            raise ShapeError('forward', (len(views),), (self.config.l,),
                             detail = 'one matrix per view',
                             module = 'model')
        X = [x if isinstance(x, Node) else graph.const(x) for x in views]
        Z = [self.encode(v, x) for v, x in enumerate(X)]
        X_hat = [self.decode(v, z) for v, z in enumerate(Z)]
        H = fuse(Z, W)
        return Z, X_hat, H, self.classify(H)

    def save (self, fn):
        """Write a self-describing checkpoint (see :mod:`engine.params`)."""
        self.params.save(fn, {'model': self.config.to_dict()})
        log.debug('saved model checkpoint \'%s\'', fn)

    @staticmethod
    def load (fn):
        """Read a checkpoint written by :meth:`save`.

load(fn) -> model

"""
        params, meta = ParamStore.load(fn)
        if 'model' not in meta:
            raise ParamError('\'{0}\': checkpoint has no model configuration'
                             .format(fn))
        return DICNetModel(ModelConfig.from_dict(meta['model']), params)


def init_model (config):
    """Create a model with freshly initialised weights and zero biases.

init_model(config) -> model

Weights are drawn layer by layer, in parameter order, from a generator seeded
with ``config.seed``.

"""
    r = rng(config.seed)
    params = ParamStore()
    for prefix, k, fan_in, fan_out, relu in config.layers():
        w, b = _names(prefix, k)
        bound = init_bound(config.init, fan_in, fan_out, relu)
        if bound:
            params.add(w, r.uniform(-bound, bound, (fan_in, fan_out)))
        else:
            params.add(w, np.zeros((fan_in, fan_out)))
        params.add(b, np.zeros((1, fan_out)))
    return DICNetModel(config, params)


def fuse (Z, W):
    """Average each sample's representations over its available views.

fuse(Z, W) -> H

:arg Z: list of ``l`` matrices (or nodes of one graph), each ``n x d``.
:arg W: ``n x l`` binary missing-view indicator; every row needs a one.

:return: ``H`` with ``h_i = sum_v W[i, v] z_i^(v) / sum_v W[i, v]``; a node if
         ``Z`` holds nodes.

"""
    W = as_matrix(W, 'view mask')
    if not Z:
        raise ShapeError('fuse', (0,), detail = 'no representations',
                         module = 'model')
    n = W.shape[0]
    if W.shape[1] != len(Z) or any(z.shape[0] != n for z in Z):
        raise ShapeError('fuse', W.shape, *(z.shape for z in Z),
                         module = 'model')
    if not is_binary(W):
        raise DataError('view mask has entries other than 0 and 1')
    counts = W.sum(axis = 1, keepdims = True)
    if n and counts.min() < 1:
        raise DataError('sample {0} has no available view'
                        .format(int(np.argmin(counts))))
    nodes = [z for z in Z if isinstance(z, Node)]
    eager = not nodes
    g = Graph() if eager else nodes[0].graph
    terms = [(z if isinstance(z, Node) else g.const(z)) * W[:, v:v + 1]
             for v, z in enumerate(Z)]
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    H = total / counts
    return g.forward(H) if eager else H
