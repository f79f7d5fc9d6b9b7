"""Settings handling.

Provides :class:`Settings` and :class:`SettingsManager` (loads from and dumps
to JSON files).

"""

import json
import logging
from copy import deepcopy

from .errors import ConfigError

log = logging.getLogger(__name__)


def _to_bool (v):
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ('1', 'true', 'yes', 'on'):
            return True
        if s in ('0', 'false', 'no', 'off'):
            return False
        raise ValueError(v)
    if isinstance(v, (int, float)) and v in (0, 1):
        return bool(v)
    raise TypeError(v)


def _to_int (v):
    if isinstance(v, bool):
        raise TypeError(v)
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(v)
        return int(v)
    return int(v)


def _to_list (v):
    if isinstance(v, str):
        return [x for x in v.replace(',', ' ').split()]
    return list(v)


class Settings (object):
    """An object for handling settings.

:arg settings: a dict used to store the settings.  Only upper-case keys are
               used.
:arg types: the types of settings are preserved when changes are made by
            casting to their initial types.  For types for which this will not
            work, this argument can be passed as a ``{from_type: to_type}``
            dict to use ``to_type`` whenever ``from_type`` would otherwise be
            used.

To access and change settings, use attributes of this object.  To restore a
setting to its default (initial) value, delete it.  A value that cannot be
cast to the setting's type raises :class:`errors.ConfigError`.

"""

    def __init__ (self, settings = {}, types = {}):
        self._settings = {}
        self._defaults = {}
        self._types = {}
        self._tricky_types = {bool: _to_bool, int: _to_int, list: _to_list}
        self._tricky_types.update(types)
        self.add(settings)

    def add (self, settings):
        """Add more settings; takes a dict like the constructor."""
        for k, v in dict(settings).items():
            if k.isupper() and not k.startswith('_'):
                setattr(self, k, v)

    def __getattr__ (self, k):
        try:
            return self._settings[k]
        except KeyError:
            raise AttributeError(k)

    def __setattr__ (self, k, v):
        # set if private
        if k[0] == '_':
            self.__dict__[k] = v
            return
        # ensure type
        t = self._types.get(k)
        if t is None:
            # new setting: use as new default
            if isinstance(v, tuple):
                v = list(v)
            self._defaults[k] = deepcopy(v)
            if v is not None:
                self._types[k] = type(v)
        elif v is not None and not isinstance(v, t) or \
                (t is not bool and isinstance(v, bool)):
            # ints are acceptable floats
            if t is float and isinstance(v, int) and not isinstance(v, bool):
                v = float(v)
            else:
                try:
                    v = self._tricky_types.get(t, t)(v)
                except (TypeError, ValueError):
                    raise ConfigError('{0} has invalid type for \'{1}\' '
                                      '(expected {2})'.format(repr(v), k,
                                                              t.__name__))
        self._settings[k] = v

    def __delattr__ (self, k):
        setattr(self, k, deepcopy(self._defaults[k]))

    def __contains__ (self, k):
        return k in self._settings

    def update (self, values, source = 'settings'):
        """Set many settings at once.

update(values, source = 'settings') -> unknown

:arg values: ``{name: value}`` dict; names are case-insensitive.
:arg source: description of where the values came from, for messages.

:return: list of names that are not known settings; these are logged as
         warnings and otherwise ignored.

"""
        unknown = []
        for k, v in values.items():
            key = k.upper()
            if key not in self._settings:
                log.warning('%s: unknown setting \'%s\' ignored', source, k)
                unknown.append(k)
            else:
                setattr(self, key, v)
        return unknown

    def as_dict (self):
        """Return current values as a ``{lower_case_name: value}`` dict."""
        return dict((k.lower(), deepcopy(v))
                    for k, v in sorted(self._settings.items()))

    def copy (self):
        """Return an independent copy keeping both defaults and values."""
        new = type(self).__new__(type(self))
        new.__dict__.update(deepcopy(self.__dict__))
        return new


class SettingsManager (Settings):
    """An object for handling settings; :class:`Settings` subclass.

:arg fn: JSON file to load settings from, if any.

JSON files hold a single object mapping setting names (in any case) to values.

"""

    def __init__ (self, settings, fn = None, types = {}):
        Settings.__init__(self, settings, types)
        if fn is not None:
            self.load(fn)

    def load (self, fn):
        """Load settings from a JSON file, overriding current values."""
        try:
            with open(fn) as f:
                new_settings = json.load(f)
        except IOError as e:
            raise ConfigError('can\'t read config file: \'{0}\' ({1})'
                              .format(fn, e.strerror))
        except ValueError as e:
            raise ConfigError('invalid JSON: \'{0}\' ({1})'.format(fn, e))
        if not isinstance(new_settings, dict):
            raise ConfigError('config file \'{0}\' must hold a JSON object'
                              .format(fn))
        log.debug('loading settings from \'%s\'', fn)
        self.update(new_settings, fn)

    def dump (self, fn):
        """Save all settings to a JSON file."""
        log.info('saving settings to \'%s\'', fn)
        with open(fn, 'w') as f:
            json.dump(self.as_dict(), f, indent = 4, sort_keys = True)
            f.write('\n')
