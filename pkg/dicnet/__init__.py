# registers application defaults with the engine's settings
from . import conf as _conf
