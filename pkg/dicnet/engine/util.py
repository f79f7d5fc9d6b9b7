"""A number of utility functions."""

import numpy as np

from .errors import DataError

__all__ = ('ir', 'check_rate', 'rng', 'spawn_seeds', 'as_matrix', 'is_binary')


# abstract


def ir (x):
    """Returns the argument rounded to the nearest integer.

Halves round away from zero, so for the non-negative quotas used in this
package this is round-half-up.

"""
    # this is about twice as fast as int(round(x))
    y = int(x)
    return (y + (x - y >= .5)) if x > 0 else (y - (y - x >= .5))


def check_rate (name, x, low = 0., high = 1., low_open = False,
                high_open = True, error = DataError):
    """Validate that a rate lies in a given interval.

check_rate(name, x, low = 0, high = 1, low_open = False, high_open = True,
           error = DataError) -> x

:arg name: name used in the error message.
:arg x: the value to check.
:arg low: lower bound.
:arg high: upper bound.
:arg low_open: whether ``low`` itself is excluded.
:arg high_open: whether ``high`` itself is excluded.
:arg error: exception type to raise.

:return: ``x`` as a float.

"""
    x = float(x)
    ok_low = x > low if low_open else x >= low
    ok_high = x < high if high_open else x <= high
    if not (ok_low and ok_high and np.isfinite(x)):
        interval = '{0}{1}, {2}{3}'.format('(' if low_open else '[', low,
                                            high, ')' if high_open else ']')
        raise error('{0} must be in {1}; got {2}'.format(name, interval, x))
    return x


# random


def rng (seed):
    """Create a ``numpy.random.Generator`` from a seed.

``seed`` may be an integer, a ``numpy.random.SeedSequence`` or an existing
generator (returned unchanged).

"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds (seed, n):
    """Derive ``n`` independent child seeds from one seed."""
    return np.random.SeedSequence(seed).spawn(n)


# arrays


def as_matrix (x, name = 'matrix', dtype = np.float64):
    """Return ``x`` as a 2-D array of the given dtype.

1-D input becomes a single row; scalars become ``1 x 1``.

"""
    a = np.asarray(x, dtype = dtype)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    elif a.ndim != 2:
        raise DataError('{0}: expected a 2-D array, got {1} dimensions'
                        .format(name, a.ndim))
    return a


def is_binary (a):
    """Whether every entry of ``a`` is exactly ``0`` or ``1``."""
    a = np.asarray(a)
    return bool(np.all((a == 0) | (a == 1)))
