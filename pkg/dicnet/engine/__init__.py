import logging
import sys

import numpy as np

from . import errors, util, settings, diffcore, params, optim, gradcheck
from .conf import conf


class _Formatter (logging.Formatter):
    def format (self, record):
        levelname = record.levelname
        record.levelname = levelname.lower()
        try:
            return logging.Formatter.format(self, record)
        finally:
            record.levelname = levelname


def init (debug = None):
    """Initialise the engine: console logging and numpy error state.

:arg debug: whether to log at debug level; defaults to ``conf.DEBUG``.

"""
    if debug is not None:
        conf.DEBUG = debug
    root = logging.getLogger()
    ours = [h for h in root.handlers if getattr(h, '_dicnet', False)]
    if ours:
        # stderr may have been replaced since the last call
        ours[0].setStream(sys.stderr)
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(_Formatter(conf.LOG_FORMAT))
        handler._dicnet = True
        root.addHandler(handler)
    root.setLevel(logging.DEBUG if conf.DEBUG else logging.INFO)
    # overflow and invalid results are checked explicitly by diffcore
    np.seterr(over = 'ignore', invalid = 'ignore', divide = 'ignore',
              under = 'ignore')


def quit ():
    """Uninitialise the engine."""
    logging.shutdown()
