"""Exception types raised throughout the package.

Everything derives from :class:`DICNetError`, itself a ``ValueError``, so
callers that only care about bad input can keep catching ``ValueError``.

"""


class DICNetError (ValueError):
    """Base class for all errors raised by this package."""
    #: Short name of the module raising the error, used by the CLI.
    module = 'dicnet'


class ShapeError (DICNetError):
    """Operand shapes do not agree.

ShapeError(op, *shapes)

:arg op: name of the operation that failed.
:arg shapes: the offending shapes, in operand order.
:arg detail: optional extra explanation (keyword-only).
:arg module: reporting module, if not ``diffcore`` (keyword-only).

"""

    module = 'diffcore'

    def __init__ (self, op, *shapes, **kwargs):
        self.op = op
        self.shapes = shapes
        detail = kwargs.get('detail')
        if 'module' in kwargs:
            self.module = kwargs['module']
        msg = '{0}: incompatible shapes {1}'.format(
            op, ' and '.join(str(tuple(s)) for s in shapes))
        if detail:
            msg += ' ({0})'.format(detail)
        DICNetError.__init__(self, msg)


class NonFiniteError (DICNetError):
    """An operation produced NaN or infinite values."""

    module = 'diffcore'

    def __init__ (self, op):
        self.op = op
        DICNetError.__init__(self, '{0}: produced non-finite values'.format(op))


class GraphError (DICNetError):
    """Misuse of a computation graph."""
    module = 'diffcore'


class ParamError (DICNetError):
    """Bad parameter names, shapes or gradient maps."""
    module = 'params'


class GradCheckError (DICNetError):
    """The loss was non-finite at a perturbed coordinate."""
    module = 'gradcheck'


class DataError (DICNetError):
    """A dataset, manifest or mask violates its invariants."""
    module = 'data'


class ConfigError (DICNetError):
    """Invalid configuration or hyper-parameter value."""
    module = 'config'


class MetricError (DICNetError):
    """No sample or label is scorable by a metric."""
    module = 'metrics'
