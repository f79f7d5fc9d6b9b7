"""Command-line interface.

Usage: ``dicnet <command> [options]``; ``dicnet <command> --help`` lists a
command's options.

Commands:

- ``synth``: write a synthetic complete dataset;
- ``corrupt``: make a double-incomplete copy of a complete dataset;
- ``train``: train on a corrupted dataset, writing a run directory;
- ``predict``: score a dataset with a saved model;
- ``evaluate``: compute the metrics for stored scores and labels;
- ``ablate``: train with each combination of the optional loss terms;
- ``sweep``: train over a grid of ``beta``, ``gamma`` and ``tau`` values;
- ``missing``: corrupt, train and evaluate over a list of missing rates;
- ``gradcheck``: check the objective's gradients by finite differences.

Configuration
-------------

Every setting in :obj:`conf` can be given in a JSON file passed with
``--config``: an object mapping setting names (any case) to values, e.g.
``{"batch_size": 64, "beta": 0.001, "hidden": [256, 256]}``.  Values are
taken from the defaults, then the file, then command-line flags.  Unknown
names are warned about and ignored; badly typed values are errors.  Commands
that write a directory store the effective settings there as
``config.json``, which can be passed back with ``--config`` to repeat the run.

Experiment commands (``ablate``, ``sweep``, ``missing``) print a summary table
and write one JSON record per trained model to ``--out`` if given.

Errors are reported as ``error: <module>: <message>`` with exit status 1;
invalid flags exit with status 2.

"""

import argparse
import itertools
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import engine
from .data import (MaskSpec, corrupt, generate_label_mask, generate_synthetic,
                   generate_view_mask, load_dataset, read_matrix,
                   save_dataset, write_matrix, zero_fill)
from .engine.conf import conf
from .engine.diffcore import Graph
from .engine.errors import ConfigError, DataError, DICNetError
from .engine.gradcheck import finite_diff_check
from .losses import LossWeights
from .metrics import _TITLES, METRICS, evaluate_all
from .model import INIT_SCHEMES, DICNetModel, ModelConfig, init_model
from .trainer import (MODES, RunDir, TrainConfig, build_objective, predict,
                      train)

__all__ = ('main', 'cmd_synth', 'cmd_corrupt', 'cmd_train', 'cmd_predict',
           'cmd_evaluate', 'cmd_ablate', 'cmd_sweep', 'cmd_missing',
           'cmd_gradcheck')

log = logging.getLogger(__name__)

#: Loss configurations compared by ``ablate``: name, beta and gamma (``None``
#: keeps the configured weight).
ABLATIONS = (('mc', 0., 0.), ('mc+fr', 0., None), ('mc+ic', None, 0.),
             ('mc+fr+ic', None, None))


# argument types


def _rate (s):
    try:
        x = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError('not a number: {0!r}'.format(s))
    if not 0 <= x < 1:
        raise argparse.ArgumentTypeError('must be in [0, 1); got {0}'
                                         .format(x))
    return x


def _fraction (s):
    try:
        x = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError('not a number: {0!r}'.format(s))
    if not 0 < x <= 1:
        raise argparse.ArgumentTypeError('must be in (0, 1]; got {0}'
                                         .format(x))
    return x


def _list_of (cast):
    def parse (s):
        try:
            return [cast(x) for x in s.replace(',', ' ').split()]
        except ValueError:
            raise argparse.ArgumentTypeError(
                'expected a comma-separated list; got {0!r}'.format(s))
    parse.__name__ = cast.__name__ + ' list'
    return parse


# settings


def _settings (args):
    """Merge defaults, the ``--config`` file and flags into a new settings
object."""
    s = conf.copy()
    if args.config is not None:
        s.load(args.config)
    flags = dict((k, v) for k, v in vars(args).items()
                 if v is not None and k.upper() in s)
    s.update(flags, 'command line')
    return s


def _train_config (s):
    return TrainConfig.from_settings(s)


def _model_config (ds, s):
    return ModelConfig.from_settings(ds.dims, ds.c, s)


def _check_out (out, *inputs):
    for path in inputs:
        if os.path.realpath(out) == os.path.realpath(path):
            raise ConfigError('output \'{0}\' would overwrite input \'{1}\''
                              .format(out, path))


def _dataset_dir (path):
    return path if os.path.isdir(path) else os.path.dirname(path) or '.'


def _split (ds):
    if ds.split is None:
        raise DataError('dataset has no train/test split (run corrupt '
                        'first)')
    return ds.train_test()


# experiments


def run_cell (cell):
    """Train and evaluate one experiment cell.

run_cell(cell) -> record

:arg cell: dict with ``dataset`` (path), ``settings`` (effective settings as
           a dict), ``overrides`` (settings changed for this cell, recorded in
           the result) and optionally ``mask`` (a :class:`data.MaskSpec` dict
           applied to the loaded dataset first).

:return: a JSON-ready dict with the training configuration, the overrides,
         the epoch count, the stop reason and the four metrics.

Cells are independent, so they can run in separate processes.

"""
    s = conf.copy()
    s.update(cell['settings'], 'experiment')
    s.update(cell['overrides'], 'experiment')
    config = _train_config(s)
    ds = load_dataset(cell['dataset'])
    if cell.get('mask') is not None:
        ds = corrupt(ds, MaskSpec.from_dict(cell['mask']))
    train_ds, test_ds = _split(ds)
    if test_ds.n == 0:
        raise DataError('experiments need a non-empty test split')
    model = init_model(_model_config(ds, s))
    model, reports = train(model, train_ds, test_ds, config)
    P, P_bin = predict(model, test_ds, config.threshold)
    report = evaluate_all(P, P_bin, test_ds.Y, config.seed)
    record = config.to_dict()
    record.update(cell['overrides'])
    if cell.get('mask') is not None:
        record['mask'] = cell['mask']
    record['epochs'] = len(reports)
    record['stop_reason'] = reports[-1].reason
    for m in METRICS:
        record[m] = getattr(report, m)
    record['n_test'] = report.n_test
    return record


def _run_cells (cells, jobs):
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers = jobs) as pool:
            return list(pool.map(run_cell, cells))
    return [run_cell(cell) for cell in cells]


def _write_records (fn, records):
    if fn is None:
        return
    with open(fn, 'w') as f:
        for r in records:
            f.write(json.dumps(r, sort_keys = True))
            f.write('\n')
    log.info('wrote %d record(s) to \'%s\'', len(records), fn)


def _summary (records, key, metrics = METRICS):
    """Group records by ``key(record)`` and format mean +- std per metric."""
    groups = []
    for r in records:
        k = key(r)
        for g in groups:
            if g[0] == k:
                g[1].append(r)
                break
        else:
            groups.append((k, [r]))
    width = max([len(str(k)) for k, rs in groups] + [6])
    lines = ['{0:<{w}}  {1}'.format('', '  '.join(
        '{0:>18}'.format(_TITLES[m]) for m in metrics), w = width)]
    for k, rs in groups:
        cells = []
        for m in metrics:
            v = np.array([r[m] for r in rs])
            std = float(np.std(v, ddof = 1)) if v.size > 1 else 0.
            cells.append('{0:>8.4f} +- {1:.4f}'.format(float(np.mean(v)),
                                                       std))
        lines.append('{0:<{w}}  {1}'.format(str(k), '  '.join(cells),
                                             w = width))
    return '\n'.join(lines)


def _seeds (args, s):
    seeds = args.seeds if args.seeds is not None else [s.SEED]
    if not seeds:
        raise ConfigError('--seeds: empty list')
    return seeds


# commands


def cmd_synth (args, s):
    """Write a synthetic complete dataset."""
    views = s.SYNTH_VIEWS
    dims = [int(m) for m in s.SYNTH_DIMS]
    if not dims:
        raise ConfigError('synth_dims: empty list')
    # reused cyclically when fewer dims than views are given
    dims = [dims[v % len(dims)] for v in range(views)]
    ds = generate_synthetic(s.SYNTH_N, views, s.SYNTH_LABELS, dims,
                            s.SYNTH_LATENT_DIM, s.SYNTH_NOISE, s.SEED,
                            max_retries = s.SYNTH_MAX_RETRIES)
    save_dataset(ds, args.out)
    s.dump(os.path.join(args.out, 'config.json'))
    print('wrote {0} samples, {1} views {2}, {3} labels to {4}'.format(
        ds.n, ds.l, ds.dims, ds.c, args.out))
    return 0


def cmd_corrupt (args, s):
    """Make a double-incomplete copy of a complete dataset."""
    _check_out(args.out, _dataset_dir(args.dataset))
    spec = MaskSpec(s.VIEW_MISSING_RATE, s.LABEL_MISSING_RATE,
                    s.TRAIN_FRACTION, s.SEED)
    ds = load_dataset(args.dataset)
    out = corrupt(ds, spec)
    manifest = save_dataset(out, args.out)
    s.dump(os.path.join(args.out, 'config.json'))
    print('{0} of {1} view instances and {2} of {3} labels missing; '
          '{4} train / {5} test samples'.format(
              manifest.missing['view_instances'], out.n * out.l,
              manifest.missing['labels'], out.n * out.c, len(out.split[0]),
              len(out.split[1])))
    return 0


def cmd_train (args, s):
    """Train on a corrupted dataset and evaluate on its test split."""
    _check_out(args.run_dir, _dataset_dir(args.dataset))
    config = _train_config(s)
    ds = load_dataset(args.dataset)
    train_ds, test_ds = _split(ds)
    model = init_model(_model_config(ds, s))
    run = RunDir(args.run_dir)
    s.dump(run.file('config.json'))
    model, reports = train(model, train_ds, test_ds, config, run)
    if test_ds.n == 0:
        log.warning('empty test split: nothing to evaluate')
        return 0
    if not np.all(test_ds.G == 1):
        log.warning('test split has hidden labels; evaluating against the '
                    'stored values')
    P, P_bin = predict(model, test_ds, config.threshold)
    report = evaluate_all(P, P_bin, test_ds.Y, config.seed)
    run.write_json('eval.json', report.to_record())
    print(report.format())
    return 0


def cmd_predict (args, s):
    """Score a dataset with a saved model."""
    model = DICNetModel.load(args.checkpoint)
    ds = load_dataset(args.dataset)
    _check_out(args.out, _dataset_dir(args.dataset))
    P, P_bin = predict(model, ds, s.THRESHOLD)
    os.makedirs(args.out, exist_ok = True)
    write_matrix(os.path.join(args.out, 'scores.txt'), P)
    write_matrix(os.path.join(args.out, 'predictions.txt'), P_bin, True)
    log.info('wrote predictions for %d samples to \'%s\'', ds.n, args.out)
    if ds.split is not None and len(ds.split[1]):
        test = ds.split[1]
        report = evaluate_all(P[test], P_bin[test], ds.Y[test])
        with open(os.path.join(args.out, 'eval.json'), 'w') as f:
            json.dump(report.to_record(), f, indent = 4, sort_keys = True)
            f.write('\n')
        print(report.format())
    return 0


def cmd_evaluate (args, s):
    """Compute the metrics for stored scores and labels."""
    P = read_matrix(args.scores, 'scores')
    Y = read_matrix(args.labels, 'labels', P.shape)
    if args.predictions is not None:
        P_bin = read_matrix(args.predictions, 'predictions', P.shape)
    else:
        P_bin = (P >= s.THRESHOLD).astype(np.float64)
    report = evaluate_all(P, P_bin, Y)
    if args.out is not None:
        with open(args.out, 'w') as f:
            json.dump(report.to_record(), f, indent = 4, sort_keys = True)
            f.write('\n')
    print(report.format())
    return 0


def cmd_ablate (args, s):
    """Train each loss configuration over all seeds."""
    _train_config(s)
    seeds = _seeds(args, s)
    base = s.as_dict()
    cells = []
    for name, beta, gamma in ABLATIONS:
        for seed in seeds:
            overrides = {'seed': seed, 'beta': s.BETA if beta is None
                         else beta, 'gamma': s.GAMMA if gamma is None
                         else gamma}
            cells.append({'dataset': args.dataset, 'settings': base,
                          'overrides': overrides, 'ablation': name})
    records = _run_cells(cells, args.jobs)
    for cell, r in zip(cells, records):
        r['ablation'] = cell['ablation']
    _write_records(args.out, records)
    print(_summary(records, lambda r: r['ablation'], ('ap', 'auc')))
    return 0


def cmd_sweep (args, s):
    """Train over the Cartesian product of beta, gamma and tau values."""
    _train_config(s)
    seeds = _seeds(args, s)
    grid = []
    for flag, given, default in (('--betas', args.betas, s.BETA),
                                 ('--gammas', args.gammas, s.GAMMA),
                                 ('--taus', args.taus, s.TAU)):
        values = [default] if given is None else given
        if not values:
            raise ConfigError('{0}: empty grid'.format(flag))
        grid.append(values)
    for beta, gamma, tau in itertools.product(*grid):
        # fail before any training
        LossWeights(beta, gamma, tau)
    base = s.as_dict()
    cells = [{'dataset': args.dataset, 'settings': base,
              'overrides': {'beta': beta, 'gamma': gamma, 'tau': tau,
                            'seed': seed}}
             for beta, gamma, tau in itertools.product(*grid)
             for seed in seeds]
    records = _run_cells(cells, args.jobs)
    _write_records(args.out, records)
    print(_summary(records, lambda r: 'beta={0:g} gamma={1:g} tau={2:g}'
                   .format(r['beta'], r['gamma'], r['tau'])))
    return 0


def cmd_missing (args, s):
    """Corrupt a complete dataset at several missing rates and evaluate."""
    _train_config(s)
    seeds = _seeds(args, s)
    rates = args.rates
    if not rates:
        raise ConfigError('--rates: empty list')
    base = s.as_dict()
    cells = []
    for rate in rates:
        for seed in seeds:
            if args.vary == 'view':
                spec = MaskSpec(rate, s.LABEL_MISSING_RATE, s.TRAIN_FRACTION,
                                seed)
            else:
                spec = MaskSpec(s.VIEW_MISSING_RATE, rate, s.TRAIN_FRACTION,
                                seed)
            cells.append({'dataset': args.dataset, 'settings': base,
                          'overrides': {'seed': seed},
                          'mask': spec.to_dict(), 'rate': rate})
    records = _run_cells(cells, args.jobs)
    for cell, r in zip(cells, records):
        r['vary'] = args.vary
        r['rate'] = cell['rate']
    _write_records(args.out, records)
    print(_summary(records, lambda r: '{0}={1:g}'.format(
        'p' if args.vary == 'view' else 'q', r['rate'])))
    return 0


def cmd_gradcheck (args, s):
    """Check the objective's gradients on a small random instance."""
    seed = s.SEED
    ds = generate_synthetic(args.n, args.views, args.labels, args.dim, 2, .1,
                            seed)
    W = generate_view_mask(ds.n, ds.l, args.missing_rate if ds.l > 1 else 0.,
                           seed)
    G = generate_label_mask(ds.Y, args.missing_rate, seed)
    ds = zero_fill(ds.derive(W = W, G = G))
    model = init_model(ModelConfig(ds.dims, ds.c, args.check_hidden,
                                   args.check_repr_dim, s.INIT, seed))
    weights = LossWeights(s.BETA, s.GAMMA, s.TAU)

    def loss (params):
        total, parts = build_objective(model.with_params(params),
                                       Graph(params), ds.views, ds.W, ds.Y,
                                       ds.G, weights)
        return total if args.term == 'total' else parts[args.term]

    report = finite_diff_check(loss, model.params, s.GRADCHECK_STEP,
                               s.GRADCHECK_TOLERANCE, s.GRADCHECK_COORDS,
                               seed, s.GRADCHECK_FLOOR)
    print(report.format())
    return 0 if report.passed else 1


# parser


def _common ():
    p = argparse.ArgumentParser(add_help = False)
    p.add_argument('--config', metavar = 'FILE',
                   help = 'JSON settings file; flags override it')
    p.add_argument('-b', '--debug', action = 'store_true', default = None,
                   help = 'log at debug level')
    p.add_argument('--seed', type = int, help = 'random seed')
    p.add_argument('--profile', action = 'store_true',
                   help = 'run under cProfile and print statistics')
    p.add_argument('--num-stats', type = int, default = 30,
                   help = 'number of functions to show when profiling; '
                   'defaults to 30')
    p.add_argument('--profile-file', default = '.profile_stats',
                   help = 'defaults to \'.profile_stats\'')
    p.add_argument('--sort-stats', default = 'cumulative',
                   help = 'profile stats sort mode; defaults to '
                   '\'cumulative\' (see pstats.Stats.sort_stats doc)')
    return p


def _add_corrupt_options (p):
    p.add_argument('-p', '--view-missing-rate', type = _rate,
                   help = 'fraction of view instances to remove')
    p.add_argument('-q', '--label-missing-rate', type = _rate,
                   help = 'fraction of training labels to hide')
    p.add_argument('-m', '--train-fraction', type = _fraction,
                   help = 'fraction of samples used for training')


def _add_train_options (p):
    p.add_argument('--batch-size', type = int)
    p.add_argument('--max-epochs', type = int)
    p.add_argument('--stop-threshold', type = float,
                   help = 'stop when the epoch loss changes by less')
    p.add_argument('--change-threshold', type = float,
                   help = 'stop when fewer test predictions flip')
    p.add_argument('--lr', '--learning-rate', dest = 'learning_rate',
                   type = float)
    p.add_argument('--tau', type = float, help = 'contrast temperature')
    p.add_argument('--beta', type = float, help = 'contrast weight')
    p.add_argument('--gamma', type = float, help = 'reconstruction weight')
    p.add_argument('--hidden', type = _list_of(int),
                   help = 'encoder hidden widths, e.g. 512,512')
    p.add_argument('--repr-dim', type = int)
    p.add_argument('--init', choices = INIT_SCHEMES)
    p.add_argument('--mode', choices = MODES)
    p.add_argument('--threshold', type = float,
                   help = 'scores at or above this are positive')
    p.add_argument('--checkpoint-every', type = int, metavar = 'EPOCHS')


def _add_experiment_options (p):
    p.add_argument('--seeds', type = _list_of(int),
                   help = 'comma-separated seeds; defaults to --seed')
    p.add_argument('--jobs', type = int, default = 1,
                   help = 'cells to train in parallel processes')
    p.add_argument('--out', metavar = 'FILE',
                   help = 'write one JSON record per cell here')


def _parser ():
    common = _common()
    parser = argparse.ArgumentParser(
        prog = 'dicnet', description = 'Double-incomplete multi-view '
        'multi-label classification.')
    sub = parser.add_subparsers(dest = 'command', metavar = 'command')
    sub.required = True

    p = sub.add_parser('synth', parents = [common],
                       help = 'write a synthetic complete dataset')
    p.add_argument('out', help = 'output directory')
    p.add_argument('--n', dest = 'synth_n', type = int)
    p.add_argument('--views', dest = 'synth_views', type = int)
    p.add_argument('--labels', dest = 'synth_labels', type = int)
    p.add_argument('--dims', dest = 'synth_dims', type = _list_of(int))
    p.add_argument('--latent-dim', dest = 'synth_latent_dim', type = int)
    p.add_argument('--noise', dest = 'synth_noise', type = float)
    p.set_defaults(func = cmd_synth)

    p = sub.add_parser('corrupt', parents = [common],
                       help = 'remove views and labels from a dataset')
    p.add_argument('dataset', help = 'complete dataset directory')
    p.add_argument('out', help = 'output directory')
    _add_corrupt_options(p)
    p.set_defaults(func = cmd_corrupt)

    p = sub.add_parser('train', parents = [common],
                       help = 'train and evaluate on a corrupted dataset')
    p.add_argument('dataset', help = 'corrupted dataset directory')
    p.add_argument('run_dir', help = 'run directory to write')
    _add_train_options(p)
    p.set_defaults(func = cmd_train)

    p = sub.add_parser('predict', parents = [common],
                       help = 'score a dataset with a saved model')
    p.add_argument('checkpoint', help = 'model checkpoint (.npz)')
    p.add_argument('dataset', help = 'dataset directory')
    p.add_argument('out', help = 'output directory')
    p.add_argument('--threshold', type = float)
    p.set_defaults(func = cmd_predict)

    p = sub.add_parser('evaluate', parents = [common],
                       help = 'evaluate stored scores against labels')
    p.add_argument('scores', help = 'score matrix file')
    p.add_argument('labels', help = 'label matrix file')
    p.add_argument('--predictions', metavar = 'FILE',
                   help = 'binary predictions; default: threshold scores')
    p.add_argument('--threshold', type = float)
    p.add_argument('--out', metavar = 'FILE', help = 'write JSON here')
    p.set_defaults(func = cmd_evaluate)

    p = sub.add_parser('ablate', parents = [common],
                       help = 'compare loss configurations')
    p.add_argument('dataset', help = 'corrupted dataset directory')
    _add_train_options(p)
    _add_experiment_options(p)
    p.set_defaults(func = cmd_ablate)

    p = sub.add_parser('sweep', parents = [common],
                       help = 'grid over beta, gamma and tau')
    p.add_argument('dataset', help = 'corrupted dataset directory')
    _add_train_options(p)
    _add_experiment_options(p)
    p.add_argument('--betas', type = _list_of(float))
    p.add_argument('--gammas', type = _list_of(float))
    p.add_argument('--taus', type = _list_of(float))
    p.set_defaults(func = cmd_sweep)

    p = sub.add_parser('missing', parents = [common],
                       help = 'vary the view or label missing rate')
    p.add_argument('dataset', help = 'complete dataset directory')
    _add_corrupt_options(p)
    _add_train_options(p)
    _add_experiment_options(p)
    p.add_argument('--vary', choices = ('view', 'label'), default = 'view')
    p.add_argument('--rates', type = _list_of(float),
                   default = [0., .3, .5, .7])
    p.set_defaults(func = cmd_missing)

    p = sub.add_parser('gradcheck', parents = [common],
                       help = 'check gradients by finite differences')
    p.add_argument('--n', type = int, default = 6)
    p.add_argument('--views', type = int, default = 2)
    p.add_argument('--labels', type = int, default = 3)
    p.add_argument('--dim', type = int, default = 4)
    p.add_argument('--hidden', dest = 'check_hidden', type = _list_of(int),
                   default = [5])
    p.add_argument('--repr-dim', dest = 'check_repr_dim', type = int,
                   default = 3)
    p.add_argument('--missing-rate', type = _rate, default = .25,
                   help = 'view and label missing rate of the instance')
    p.add_argument('--term', choices = ('total', 'mc', 'ic', 'fr'),
                   default = 'total')
    p.add_argument('--tolerance', dest = 'gradcheck_tolerance',
                   type = float)
    p.add_argument('--step', dest = 'gradcheck_step', type = float)
    p.add_argument('--coords', dest = 'gradcheck_coords', type = int)
    p.set_defaults(func = cmd_gradcheck)
    return parser


def _profile (args, s):
    from cProfile import Profile
    from pstats import Stats
    prof = Profile()
    try:
        return prof.runcall(args.func, args, s)
    finally:
        prof.dump_stats(args.profile_file)
        Stats(args.profile_file).strip_dirs() \
            .sort_stats(args.sort_stats).print_stats(args.num_stats)
        os.unlink(args.profile_file)


def main (argv = None):
    """Run the command line; returns the exit status."""
    args = _parser().parse_args(argv)
    try:
        s = _settings(args)
        engine.init(s.DEBUG)
        if args.profile:
            return _profile(args, s)
        return args.func(args, s)
    except DICNetError as e:
        sys.stderr.write('error: {0}: {1}\n'.format(e.module, e))
        return 1
    except (IOError, OSError) as e:
        sys.stderr.write('error: io: {0}\n'.format(e))
        return 1
    finally:
        engine.quit()
