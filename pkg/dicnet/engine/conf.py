from . import settings


class Conf (object):

    IDENT = 'dicnet'
    DEBUG = False

    # logging
    LOG_FORMAT = '%(levelname)s: %(name)s: %(message)s'

    # numerics
    # log is only ever taken of values clamped to [LOG_EPS, 1 - LOG_EPS]
    LOG_EPS = 1e-12

    # optimiser
    ADAM_BETA1 = .9
    ADAM_BETA2 = .999
    ADAM_EPS = 1e-8

    # gradient checking
    GRADCHECK_STEP = 1e-6
    GRADCHECK_TOLERANCE = 1e-4
    GRADCHECK_COORDS = 20
    GRADCHECK_FLOOR = 1e-4

    # checkpoints
    CHECKPOINT_VERSION = 1
    DATASET_FORMAT_VERSION = 1


conf = settings.SettingsManager(Conf.__dict__)
