"""Named trainable parameters and their checkpoint container.

Checkpoint format
-----------------

A checkpoint is a numpy ``.npz`` archive (a zip of ``.npy`` files), written
with ``allow_pickle`` off so it can be read without executing code:

- one float64 2-D array per parameter, stored under the parameter's name
  (row-major, shape in the ``.npy`` header);
- ``__meta__``: a 0-d unicode array holding a JSON object with at least
  ``version`` (:data:`conf.CHECKPOINT_VERSION`) and ``names`` (parameter
  order).  Callers may add more fields (the model stores its configuration
  under ``model``).

The file name is used as given; no suffix is appended.

"""

import json
from collections import OrderedDict

import numpy as np

from .conf import conf
from .errors import ParamError, ShapeError

__all__ = ('ParamStore',)

_META = '__meta__'


class ParamStore (object):
    """An ordered mapping from parameter name to a 2-D ``float64`` array.

ParamStore([items])

:arg items: ``(name, value)`` pairs or a dict to start with.

Names are unique and a parameter's shape never changes after it is added.
Stores are treated as values: :meth:`replace` returns a new store rather than
changing arrays in place.

"""

    def __init__ (self, items = ()):
        self._params = OrderedDict()
        if isinstance(items, dict):
            items = items.items()
        for name, value in items:
            self.add(name, value)

    def __repr__ (self):
        return '<ParamStore {0} params, {1} values>'.format(len(self),
                                                           self.size)

    def __len__ (self):
        return len(self._params)

    def __iter__ (self):
        return iter(self._params)

    def __contains__ (self, name):
        return name in self._params

    def __getitem__ (self, name):
        try:
            return self._params[name]
        except KeyError:
            raise ParamError('unknown parameter \'{0}\''.format(name))

    def names (self):
        return list(self._params)

    def items (self):
        return list(self._params.items())

    @property
    def size (self):
        """Total number of scalar values."""
        return sum(v.size for v in self._params.values())

    def add (self, name, value):
        """Add a new parameter; the name must be unused."""
        if name in self._params:
            raise ParamError('duplicate parameter \'{0}\''.format(name))
        if name == _META:
            raise ParamError('\'{0}\' is reserved'.format(name))
        a = np.array(value, dtype = np.float64)
        if a.ndim != 2:
            raise ShapeError(name, a.shape, detail = 'parameters are 2-D')
        self._params[name] = a

    def set (self, name, value):
        """Replace a parameter's value in place; the shape must not change."""
        old = self[name]
        a = np.array(value, dtype = np.float64)
        if a.shape != old.shape:
            raise ShapeError(name, old.shape, a.shape,
                             detail = 'parameter shapes are fixed')
        self._params[name] = a

    def replace (self, values):
        """Return a new store with some values replaced.

replace(values) -> store

:arg values: ``{name: value}`` for the parameters to change.

"""
        new = self.copy()
        for name, value in values.items():
            new.set(name, value)
        return new

    def copy (self):
        return ParamStore((name, v.copy()) for name, v in self._params.items())

    def equals (self, other):
        """Whether both stores hold the same names and bitwise-equal values."""
        return self.names() == other.names() and all(
            np.array_equal(self[n], other[n]) for n in self)

    def save (self, fn, meta = None):
        """Write a checkpoint (see the module docstring for the format).

save(fn[, meta])

:arg fn: destination file name.
:arg meta: extra JSON-serialisable fields for the ``__meta__`` record.

"""
        header = dict(meta or {})
        header['version'] = conf.CHECKPOINT_VERSION
        header['names'] = self.names()
        arrays = dict(self._params)
        arrays[_META] = np.array(json.dumps(header, sort_keys = True))
        with open(fn, 'wb') as f:
            np.savez(f, **arrays)

    @staticmethod
    def load (fn):
        """Read a checkpoint.

load(fn) -> (store, meta)

:return: the parameters, in saved order, and the ``__meta__`` dict.

"""
        with np.load(fn, allow_pickle = False) as archive:
            if _META not in archive.files:
                raise ParamError('\'{0}\': not a checkpoint (no {1})'
                                 .format(fn, _META))
            meta = json.loads(str(archive[_META]))
            if meta.get('version') != conf.CHECKPOINT_VERSION:
                raise ParamError('\'{0}\': unsupported checkpoint version {1}'
                                 .format(fn, meta.get('version')))
            missing = [n for n in meta['names'] if n not in archive.files]
            if missing:
                raise ParamError('\'{0}\': missing parameters {1}'
                                 .format(fn, ', '.join(missing)))
            store = ParamStore((n, archive[n]) for n in meta['names'])
        return store, meta
