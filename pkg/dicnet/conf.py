from .engine.conf import conf


class Conf (object):
    # model
    HIDDEN = [512, 512] # encoder hidden widths; decoders mirror them
    REPR_DIM = 128
    INIT = 'kaiming_uniform'

    # objective
    TAU = .5
    BETA = 2e-3 # contrast weight
    GAMMA = 8e-2 # reconstruction weight

    # training
    BATCH_SIZE = 128
    MAX_EPOCHS = 100
    STOP_THRESHOLD = 1e-5
    CHANGE_THRESHOLD = 1e-7 # prediction-change stopping rule
    LEARNING_RATE = 1e-3
    MODE = 'semi-supervised'
    THRESHOLD = .5 # binarisation; scores >= this are positive
    CHECKPOINT_EVERY = 0 # epochs; 0 means only at stop
    SEED = 0

    # synthetic data
    SYNTH_N = 2000
    SYNTH_VIEWS = 3
    SYNTH_LABELS = 10
    SYNTH_DIMS = [64, 48, 32]
    SYNTH_LATENT_DIM = 16
    SYNTH_NOISE = 1.
    SYNTH_MAX_RETRIES = 100

    # corruption
    VIEW_MISSING_RATE = .5
    LABEL_MISSING_RATE = .5
    TRAIN_FRACTION = .7


conf.add(Conf.__dict__)
