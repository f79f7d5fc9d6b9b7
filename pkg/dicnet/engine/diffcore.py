"""Reverse-mode automatic differentiation over dense 2-D arrays.

A :class:`Graph` records operations as they are requested (define-by-run) but
only evaluates them in :meth:`Graph.forward`; :meth:`Graph.backward` then
accumulates gradients of a scalar root in reverse topological order.  Every
value is a 2-D ``float64`` array; scalars are ``1 x 1``.

Leaves are either constants (data, masks) or named parameters looked up in a
:class:`params.ParamStore` at forward time.  Only parameters receive
gradients.

Binary elementwise operations broadcast like numpy restricted to two
dimensions: each axis must match or be ``1`` on one side, which covers a
``1 x c`` row bias, an ``r x 1`` column weight and a ``1 x 1`` scalar.

Typical use::

    g = Graph(store)
    x = g.const(X)
    h = (x @ g.param('w') + g.param('b')).relu()
    loss = (h * h).mean()
    g.forward(loss)
    grads = g.backward(loss)

"""

import logging

import numpy as np
from scipy.special import expit

from .errors import ShapeError, NonFiniteError, GraphError

__all__ = ('Node', 'Graph', 'forward_eval', 'backward')

log = logging.getLogger(__name__)

# op name -> (shape rule, forward, backward)
_OPS = {}


def _op (name, shape_rule):
    """Register forward/backward functions for an op.

The decorated function is the forward pass ``f(attrs, *values) -> value``;
it gets a ``grad`` attribute for registering the backward pass
``g(attrs, out_grad, out, *values) -> input grads``.

"""
    def register (forward):
        def set_grad (backward):
            _OPS[name] = (shape_rule, forward, backward)
            return backward
        forward.grad = set_grad
        return forward
    return register


# shape rules


def _same (op, attrs, a):
    return a


def _broadcast (op, attrs, a, b):
    shape = []
    for x, y in zip(a, b):
        if x != y and x != 1 and y != 1:
            raise ShapeError(op, a, b)
        shape.append(max(x, y))
    return tuple(shape)


def _matmul_shape (op, attrs, a, b):
    if a[1] != b[0]:
        raise ShapeError(op, a, b, detail = 'inner dimensions differ')
    return (a[0], b[1])


def _reduce_shape (op, attrs, a):
    axis = attrs['axis']
    if axis is None:
        return (1, 1)
    elif axis == 0:
        return (1, a[1])
    else:
        return (a[0], 1)


def _row_shape (op, attrs, a):
    return (a[0], 1)


def _transpose_shape (op, attrs, a):
    return (a[1], a[0])


def _unbroadcast (g, shape):
    """Sum a gradient back down to a broadcast operand's shape."""
    if g.shape == shape:
        return g
    axes = tuple(i for i in (0, 1) if shape[i] == 1 and g.shape[i] != 1)
    return g.sum(axis = axes, keepdims = True).reshape(shape)


# ops


@_op('matmul', _matmul_shape)
def _matmul (attrs, a, b):
    return a @ b


@_matmul.grad
def _matmul_grad (attrs, g, out, a, b):
    return (g @ b.T, a.T @ g)


@_op('add', _broadcast)
def _add (attrs, a, b):
    return a + b


@_add.grad
def _add_grad (attrs, g, out, a, b):
    return (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape))


@_op('sub', _broadcast)
def _sub (attrs, a, b):
    return a - b


@_sub.grad
def _sub_grad (attrs, g, out, a, b):
    return (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape))


@_op('mul', _broadcast)
def _mul (attrs, a, b):
    return a * b


@_mul.grad
def _mul_grad (attrs, g, out, a, b):
    return (_unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape))


@_op('div', _broadcast)
def _div (attrs, a, b):
    return a / b


@_div.grad
def _div_grad (attrs, g, out, a, b):
    return (_unbroadcast(g / b, a.shape),
            _unbroadcast(-g * a / (b * b), b.shape))


@_op('neg', _same)
def _neg (attrs, a):
    return -a


@_neg.grad
def _neg_grad (attrs, g, out, a):
    return (-g,)


@_op('scale', _same)
def _scale (attrs, a):
    return a * attrs['k']


@_scale.grad
def _scale_grad (attrs, g, out, a):
    return (g * attrs['k'],)


@_op('relu', _same)
def _relu (attrs, a):
    return np.maximum(a, 0.)


@_relu.grad
def _relu_grad (attrs, g, out, a):
    return (g * (a > 0),)


@_op('sigmoid', _same)
def _sigmoid (attrs, a):
    return expit(a)


@_sigmoid.grad
def _sigmoid_grad (attrs, g, out, a):
    return (g * out * (1. - out),)


@_op('log', _same)
def _log (attrs, a):
    return np.log(a)


@_log.grad
def _log_grad (attrs, g, out, a):
    return (g / a,)


@_op('exp', _same)
def _exp (attrs, a):
    return np.exp(a)


@_exp.grad
def _exp_grad (attrs, g, out, a):
    return (g * out,)


@_op('clip', _same)
def _clip (attrs, a):
    return np.clip(a, attrs['low'], attrs['high'])


@_clip.grad
def _clip_grad (attrs, g, out, a):
    # gradient passes inside the closed interval only
    return (g * ((a >= attrs['low']) & (a <= attrs['high'])),)


@_op('sum', _reduce_shape)
def _sum (attrs, a):
    axis = attrs['axis']
    if axis is None:
        return np.sum(a).reshape(1, 1)
    return np.sum(a, axis = axis, keepdims = True)


@_sum.grad
def _sum_grad (attrs, g, out, a):
    return (np.broadcast_to(g, a.shape),)


@_op('mean', _reduce_shape)
def _mean (attrs, a):
    axis = attrs['axis']
    if axis is None:
        return np.sum(a).reshape(1, 1) / a.size
    return np.sum(a, axis = axis, keepdims = True) / a.shape[axis]


@_mean.grad
def _mean_grad (attrs, g, out, a):
    axis = attrs['axis']
    count = a.size if axis is None else a.shape[axis]
    return (np.broadcast_to(g / count, a.shape),)


@_op('row_norm', _row_shape)
def _row_norm (attrs, a):
    return np.sqrt(np.sum(a * a, axis = 1, keepdims = True))


@_row_norm.grad
def _row_norm_grad (attrs, g, out, a):
    # zero rows get a zero subgradient
    safe = np.where(out > 0, out, 1.)
    return (np.where(out > 0, g * a / safe, 0.),)


@_op('normalize_rows', _same)
def _normalize_rows (attrs, a):
    norm = np.sqrt(np.sum(a * a, axis = 1, keepdims = True))
    zero = norm == 0
    if zero.any():
        log.debug('normalize_rows: %d zero-norm row(s) left at zero',
                  int(zero.sum()))
    return np.where(zero, 0., a / np.where(zero, 1., norm))


@_normalize_rows.grad
def _normalize_rows_grad (attrs, g, out, a):
    norm = np.sqrt(np.sum(a * a, axis = 1, keepdims = True))
    zero = norm == 0
    proj = g - out * np.sum(out * g, axis = 1, keepdims = True)
    return (np.where(zero, 0., proj / np.where(zero, 1., norm)),)


@_op('transpose', _transpose_shape)
def _transpose (attrs, a):
    return a.T


@_transpose.grad
def _transpose_grad (attrs, g, out, a):
    return (g.T,)


class Node (object):
    """A value in a :class:`Graph`.

Nodes are created by graph methods, never directly.  They support the
arithmetic operators ``+ - * / @`` and unary ``-``; Python numbers and arrays
used as operands become constants (numbers multiplying a node become a
``scale`` op).

"""

    __slots__ = ('graph', 'index', 'op', 'inputs', 'shape', 'attrs')
    # make numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__ (self, graph, index, op, inputs, shape, attrs):
        #: The :class:`Graph` this node belongs to.
        self.graph = graph
        #: Position in :attr:`Graph.nodes`; inputs always have lower indices.
        self.index = index
        #: Op name: ``'const'``, ``'param'`` or a registered op.
        self.op = op
        #: Input nodes.
        self.inputs = inputs
        #: ``(rows, cols)``, known at construction.
        self.shape = shape
        self.attrs = attrs

    def __repr__ (self):
        return '<Node {0} {1} {2}>'.format(self.index, self.op, self.shape)

    @property
    def value (self):
        """The value computed by the last forward pass."""
        return self.graph.value(self)

    @property
    def grad (self):
        """The gradient computed by the last backward pass, or ``None``."""
        return self.graph.grad(self)

    @property
    def T (self):
        return self.graph.transpose(self)

    def __add__ (self, other):
        return self.graph.add(self, other)

    def __radd__ (self, other):
        return self.graph.add(other, self)

    def __sub__ (self, other):
        return self.graph.sub(self, other)

    def __rsub__ (self, other):
        return self.graph.sub(other, self)

    def __mul__ (self, other):
        if isinstance(other, (int, float)):
            return self.graph.scale(self, other)
        return self.graph.mul(self, other)

    def __rmul__ (self, other):
        return self.__mul__(other)

    def __truediv__ (self, other):
        if isinstance(other, (int, float)):
            return self.graph.scale(self, 1. / other)
        return self.graph.div(self, other)

    def __rtruediv__ (self, other):
        return self.graph.div(other, self)

    def __neg__ (self):
        return self.graph.neg(self)

    def __matmul__ (self, other):
        return self.graph.matmul(self, other)

    def __rmatmul__ (self, other):
        return self.graph.matmul(other, self)

    def sum (self, axis = None):
        return self.graph.sum(self, axis)

    def mean (self, axis = None):
        return self.graph.mean(self, axis)

    def relu (self):
        return self.graph.relu(self)

    def sigmoid (self):
        return self.graph.sigmoid(self)

    def log (self):
        return self.graph.log(self)

    def exp (self):
        return self.graph.exp(self)

    def clip (self, low, high):
        return self.graph.clip(self, low, high)


class Graph (object):
    """A computation graph.

Graph([params])

:arg params: :class:`params.ParamStore` that parameter leaves read from.
             Values are read when :meth:`forward` runs, so the store must not
             be changed between :meth:`forward` and :meth:`backward`.

A graph belongs to one thread; build a new one per batch.

"""

    def __init__ (self, params = None):
        self.params = params
        #: Nodes in creation (hence topological) order.
        self.nodes = []
        self._values = None
        self._grads = None

    def __len__ (self):
        return len(self.nodes)

    def _add_node (self, op, inputs, shape, attrs = None):
        if self._values is not None:
            # graph changed: previous results no longer describe it
            self._values = None
            self._grads = None
        node = Node(self, len(self.nodes), op, tuple(inputs), tuple(shape),
                    attrs or {})
        self.nodes.append(node)
        return node

    def _node (self, x):
        """Turn an operand into a node of this graph."""
        if isinstance(x, Node):
            if x.graph is not self:
                raise GraphError('node belongs to a different graph')
            return x
        return self.const(x)

    def _apply (self, op, inputs, **attrs):
        inputs = [self._node(x) for x in inputs]
        shape = _OPS[op][0](op, attrs, *(n.shape for n in inputs))
        return self._add_node(op, inputs, shape, attrs)

    # leaves

    def const (self, data, name = None):
        """Add a constant leaf (data, masks); it never receives a gradient."""
        a = np.array(data, dtype = np.float64)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        elif a.ndim == 1:
            a = a.reshape(1, -1)
        elif a.ndim != 2:
            raise ShapeError('const', a.shape, detail = 'expected 2-D data')
        return self._add_node('const', (), a.shape,
                              {'data': a, 'name': name})

    def param (self, name):
        """Add a leaf for the named parameter of :attr:`params`."""
        if self.params is None:
            raise GraphError('graph has no parameter store')
        if name not in self.params:
            raise GraphError('unknown parameter \'{0}\''.format(name))
        return self._add_node('param', (), self.params[name].shape,
                              {'name': name})

    # ops

    def matmul (self, a, b):
        return self._apply('matmul', (a, b))

    def add (self, a, b):
        return self._apply('add', (a, b))

    def sub (self, a, b):
        return self._apply('sub', (a, b))

    def mul (self, a, b):
        """Elementwise product; multiplying by a 0/1 constant masks."""
        return self._apply('mul', (a, b))

    def div (self, a, b):
        return self._apply('div', (a, b))

    def neg (self, a):
        return self._apply('neg', (a,))

    def scale (self, a, k):
        """Multiply by a Python scalar."""
        return self._apply('scale', (a,), k = float(k))

    def relu (self, a):
        return self._apply('relu', (a,))

    def sigmoid (self, a):
        return self._apply('sigmoid', (a,))

    def log (self, a):
        return self._apply('log', (a,))

    def exp (self, a):
        return self._apply('exp', (a,))

    def clip (self, a, low, high):
        """Clamp into ``[low, high]``; the gradient is zero outside."""
        return self._apply('clip', (a,), low = float(low), high = float(high))

    def sum (self, a, axis = None):
        """Sum everything (``axis = None``), down columns (``0``) or along
rows (``1``); the result stays 2-D."""
        if axis not in (None, 0, 1):
            raise GraphError('sum: invalid axis {0!r}'.format(axis))
        return self._apply('sum', (a,), axis = axis)

    def mean (self, a, axis = None):
        if axis not in (None, 0, 1):
            raise GraphError('mean: invalid axis {0!r}'.format(axis))
        return self._apply('mean', (a,), axis = axis)

    def row_norm (self, a):
        """L2 norm of each row, as a column."""
        return self._apply('row_norm', (a,))

    def normalize_rows (self, a):
        """Scale each row to unit L2 norm; all-zero rows stay zero."""
        return self._apply('normalize_rows', (a,))

    def transpose (self, a):
        return self._apply('transpose', (a,))

    # evaluation

    def _needed (self, root):
        needed = [False] * (root.index + 1)
        needed[root.index] = True
        for node in reversed(self.nodes[:root.index + 1]):
            if needed[node.index]:
                for x in node.inputs:
                    needed[x.index] = True
        return needed

    def _root (self, root):
        if root is None:
            if not self.nodes:
                raise GraphError('empty graph')
            return self.nodes[-1]
        return self._node(root)

    def forward (self, root = None):
        """Evaluate the graph.

forward([root]) -> value

:arg root: node to evaluate; defaults to the last node added.

:return: the root's value.  All intermediate values are cached for
         :meth:`backward` and :meth:`value`.

"""
        root = self._root(root)
        needed = self._needed(root)
        values = [None] * len(self.nodes)
        for node in self.nodes[:root.index + 1]:
            if not needed[node.index]:
                continue
            if node.op == 'const':
                out = node.attrs['data']
                name = 'const' if node.attrs['name'] is None \
                       else node.attrs['name']
            elif node.op == 'param':
                out = np.asarray(self.params[node.attrs['name']],
                                 dtype = np.float64)
                name = node.attrs['name']
                if out.shape != node.shape:
                    raise ShapeError(name, node.shape, out.shape,
                                     detail = 'parameter changed shape')
            else:
                out = _OPS[node.op][1](node.attrs,
                                       *(values[x.index] for x in node.inputs))
                name = node.op
            if not np.all(np.isfinite(out)):
                raise NonFiniteError('{0} (node {1})'.format(name, node.index))
            values[node.index] = out
        self._values = values
        self._grads = None
        return values[root.index]

    def backward (self, root = None):
        """Compute gradients of a scalar root.

backward([root]) -> grads

:arg root: the ``1 x 1`` node to differentiate; defaults to the last node.

:return: ``{parameter_name: gradient}`` for every parameter leaf the root
         depends on, each with the parameter's shape.

Raises :class:`errors.GraphError` if :meth:`forward` has not been run for this
root or the root is not a scalar.

"""
        root = self._root(root)
        if root.shape != (1, 1):
            raise GraphError('backward: root must be 1 x 1, got {0}'
                             .format(root.shape))
        values = self._values
        if values is None or root.index >= len(values) or \
           values[root.index] is None:
            raise GraphError('backward: forward has not been run')
        nodes = self.nodes[:root.index + 1]
        # which nodes lead to a parameter
        wants = [False] * len(nodes)
        for node in nodes:
            wants[node.index] = node.op == 'param' or \
                                any(wants[x.index] for x in node.inputs)
        grads = [None] * len(self.nodes)
        grads[root.index] = np.ones((1, 1))
        for node in reversed(nodes):
            g = grads[node.index]
            if g is None or not wants[node.index] or not node.inputs:
                continue
            in_grads = _OPS[node.op][2](node.attrs, g, values[node.index],
                                        *(values[x.index]
                                          for x in node.inputs))
            for x, xg in zip(node.inputs, in_grads):
                if not wants[x.index]:
                    continue
                if grads[x.index] is None:
                    grads[x.index] = np.array(xg, dtype = np.float64)
                else:
                    grads[x.index] = grads[x.index] + xg
        result = {}
        for node in nodes:
            if node.op != 'param':
                continue
            g = grads[node.index]
            if g is None:
                g = np.zeros(node.shape)
            name = node.attrs['name']
            result[name] = result[name] + g if name in result else g
        self._grads = grads
        return result

    def value (self, node):
        """Value of a node from the last :meth:`forward`."""
        node = self._node(node)
        if self._values is None or node.index >= len(self._values) or \
           self._values[node.index] is None:
            raise GraphError('node {0} has not been evaluated'
                             .format(node.index))
        return self._values[node.index]

    def grad (self, node):
        """Gradient of a node from the last :meth:`backward`, or ``None`` for
nodes that received none (constants and anything not leading to a
parameter)."""
        node = self._node(node)
        if self._grads is None:
            raise GraphError('backward has not been run')
        if node.index >= len(self._grads):
            return None
        return self._grads[node.index]


def forward_eval (graph, root = None):
    """Evaluate ``graph``; see :meth:`Graph.forward`."""
    return graph.forward(root)


def backward (graph, root = None):
    """Differentiate ``graph``; see :meth:`Graph.backward`."""
    return graph.backward(root)
