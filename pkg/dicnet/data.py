"""Double-incomplete multi-view multi-label datasets.

A :class:`MultiViewDataset` holds ``l`` view matrices ``X[v]`` (``n x m_v``),
a label matrix ``Y`` (``n x c``), a missing-view indicator ``W`` (``n x l``)
and a missing-label indicator ``G`` (``n x c``); ``W[i, v] = 1`` iff sample
``i`` has view ``v`` and ``G[i, j] = 1`` iff label ``j`` of sample ``i`` is
observed.  Views are indexed from ``0``.

Missing cells are canonically zero: :func:`zero_fill` zeroes view rows with
``W = 0`` and labels with ``G = 0``, and :func:`load_dataset` applies it, so raw
files may hold ``nan`` or noise there.

On-disk format
--------------

A dataset directory holds one text file per matrix (one row per line, values
separated by single spaces; floats written with 17 significant digits so they
read back exactly, masks and labels as integers) and ``manifest.json``::

    {
        "format_version": 1,
        "n": 1000, "l": 3, "c": 10, "dims": [64, 48, 32],
        "views": ["view1.txt", "view2.txt", "view3.txt"],
        "labels": "labels.txt",
        "view_mask": "view_mask.txt",
        "label_mask": "label_mask.txt",
        "split": {"train": "train.txt", "test": "test.txt"},
        "mask_spec": {"view_missing_rate": 0.5, "label_missing_rate": 0.5,
                      "train_fraction": 0.7, "seed": 0},
        "seed": 0,
        "view_names": ["view1", ...], "label_names": ["label0", ...],
        "missing": {"view_instances": 1500, "labels": 3500}
    }

``split`` and ``mask_spec`` are present only for corrupted datasets; ``missing``
counts the zeros of each mask and is informational.  Split
files hold one sample index per line.  Paths are relative to the manifest.
Views are numbered from 1 in file names, default names and messages.
Unknown fields are logged and ignored; malformed values are errors.

"""

import json
import logging
import os
import warnings

import numpy as np
from scipy.special import expit

from .engine.conf import conf
from .engine.errors import DataError
from .engine.util import ir, rng, spawn_seeds, is_binary, check_rate

__all__ = ('MultiViewDataset', 'MaskSpec', 'DatasetManifest',
           'generate_view_mask', 'generate_label_mask', 'split_train_test',
           'zero_fill', 'corrupt', 'load_dataset', 'save_dataset',
           'generate_synthetic', 'write_matrix', 'read_matrix')

log = logging.getLogger(__name__)

MANIFEST = 'manifest.json'


def _frozen (a, dtype = np.float64):
    a = np.array(a, dtype = dtype)
    a.flags.writeable = False
    return a


class MultiViewDataset (object):
    """A multi-view multi-label dataset with missing-view/label indicators.

MultiViewDataset(views, Y[, W][, G], view_names = None, label_names = None,
                 split = None, mask_spec = None, seed = None)

:arg views: list of ``l`` arrays, each ``n x m_v``.
:arg Y: ``n x c`` binary label matrix (entries with ``G = 0`` are ignored).
:arg W: ``n x l`` binary missing-view indicator; defaults to all ones.
:arg G: ``n x c`` binary missing-label indicator; defaults to all ones.
:arg view_names: optional names, one per view.
:arg label_names: optional names, one per label.
:arg split: optional ``(train_indices, test_indices)``.
:arg mask_spec: the :class:`MaskSpec` that produced the masks, if any.
:arg seed: seed the data were generated with, if any.

Arrays are copied and made read-only; derive new datasets instead of
changing one.  Raises :class:`errors.DataError` if an invariant is violated:
shapes, binary masks, at least one available view per sample, finite
features for available views and binary labels where observed.

"""

    def __init__ (self, views, Y, W = None, G = None, view_names = None,
                  label_names = None, split = None, mask_spec = None,
                  seed = None):
        views = [np.asarray(x, dtype = np.float64) for x in views]
        if not views:
            raise DataError('a dataset needs at least one view')
        for v, x in enumerate(views):
            if x.ndim != 2:
                raise DataError('view {0}: expected a 2-D matrix, got {1} '
                                'dimensions'.format(v + 1, x.ndim))
        n = views[0].shape[0]
        for v, x in enumerate(views):
            if x.shape[0] != n:
                raise DataError('view {0} has {1} rows; view 1 has {2}'
                                .format(v + 1, x.shape[0], n))
            if x.shape[1] < 1:
                raise DataError('view {0} has no features'.format(v + 1))
        l = len(views)
        Y = np.asarray(Y, dtype = np.float64)
        if Y.ndim != 2 or Y.shape[0] != n or Y.shape[1] < 1:
            raise DataError('labels: expected shape ({0}, c >= 1), got {1}'
                            .format(n, Y.shape))
        c = Y.shape[1]
        W = np.ones((n, l)) if W is None else np.asarray(W, dtype = np.float64)
        G = np.ones((n, c)) if G is None else np.asarray(G, dtype = np.float64)
        if W.shape != (n, l):
            raise DataError('view mask: expected shape {0}, got {1}'
                            .format((n, l), W.shape))
        if G.shape != (n, c):
            raise DataError('label mask: expected shape {0}, got {1}'
                            .format((n, c), G.shape))
        if not is_binary(W):
            raise DataError('view mask has entries other than 0 and 1')
        if not is_binary(G):
            raise DataError('label mask has entries other than 0 and 1')
        if n and W.sum(axis = 1).min() < 1:
            i = int(np.argmin(W.sum(axis = 1)))
            raise DataError('sample {0} has no available view'.format(i))
        if not is_binary(Y[G == 1]):
            raise DataError('labels have observed entries other than 0 and 1')
        for v, x in enumerate(views):
            if not np.all(np.isfinite(x[W[:, v] == 1])):
                raise DataError('view {0} has non-finite values in available '
                                'rows'.format(v + 1))
        self.views = [_frozen(x) for x in views]
        self.Y = _frozen(Y)
        self.W = _frozen(W)
        self.G = _frozen(G)
        self.view_names = list(view_names) if view_names is not None \
                          else ['view{0}'.format(v + 1) for v in range(l)]
        self.label_names = list(label_names) if label_names is not None \
                           else ['label{0}'.format(j) for j in range(c)]
        if len(self.view_names) != l or len(self.label_names) != c:
            raise DataError('expected {0} view names and {1} label names'
                            .format(l, c))
        if split is not None:
            train, test = (np.asarray(s, dtype = np.int64) for s in split)
            both = np.concatenate([train, test])
            if both.size != n or not np.array_equal(np.sort(both),
                                                    np.arange(n)):
                raise DataError('split must partition the {0} samples'
                                .format(n))
            split = (_frozen(train, np.int64), _frozen(test, np.int64))
        self.split = split
        self.mask_spec = mask_spec
        self.seed = seed

    def __repr__ (self):
        return '<MultiViewDataset n={0} l={1} c={2} dims={3}>'.format(
            self.n, self.l, self.c, self.dims)

    @property
    def n (self):
        """Number of samples."""
        return self.Y.shape[0]

    @property
    def l (self):
        """Number of views."""
        return len(self.views)

    @property
    def c (self):
        """Number of labels."""
        return self.Y.shape[1]

    @property
    def dims (self):
        """Per-view dimensionalities ``m_v``."""
        return [x.shape[1] for x in self.views]

    def derive (self, **kwargs):
        """Return a copy with some constructor arguments replaced."""
        args = dict(views = self.views, Y = self.Y, W = self.W, G = self.G,
                    view_names = self.view_names,
                    label_names = self.label_names, split = self.split,
                    mask_spec = self.mask_spec, seed = self.seed)
        args.update(kwargs)
        return MultiViewDataset(**args)

    def subset (self, indices):
        """Select samples (rows); the result has no split."""
        idx = np.asarray(indices, dtype = np.int64)
        return self.derive(views = [x[idx] for x in self.views],
                           Y = self.Y[idx], W = self.W[idx], G = self.G[idx],
                           split = None)

    def train_test (self):
        """Return ``(train, test)`` datasets from :attr:`split`."""
        if self.split is None:
            raise DataError('dataset has no train/test split')
        return self.subset(self.split[0]), self.subset(self.split[1])

    def is_zero_filled (self):
        """Whether missing view rows and unobserved labels are all zero."""
        return all(not np.any(x[self.W[:, v] == 0])
                   for v, x in enumerate(self.views)) and \
               not np.any(self.Y[self.G == 0])

    def equals (self, other):
        """Whether all five matrices are bitwise equal."""
        return self.l == other.l and all(
            np.array_equal(a, b) for a, b in zip(self.views, other.views)) \
            and all(np.array_equal(a, b) for a, b in
                    ((self.Y, other.Y), (self.W, other.W), (self.G, other.G)))


class MaskSpec (object):
    """Corruption parameters.

MaskSpec(view_missing_rate = 0, label_missing_rate = 0, train_fraction = 1,
         seed = 0)

Rates are fractions: ``0 <= p < 1``, ``0 <= q < 1``, ``0 < m <= 1``.

"""

    def __init__ (self, view_missing_rate = 0., label_missing_rate = 0.,
                  train_fraction = 1., seed = 0):
        self.view_missing_rate = check_rate('view missing rate',
                                            view_missing_rate)
        self.label_missing_rate = check_rate('label missing rate',
                                             label_missing_rate)
        self.train_fraction = check_rate('train fraction', train_fraction,
                                         low_open = True, high_open = False)
        self.seed = int(seed)

    def to_dict (self):
        return {'view_missing_rate': self.view_missing_rate,
                'label_missing_rate': self.label_missing_rate,
                'train_fraction': self.train_fraction, 'seed': self.seed}

    @classmethod
    def from_dict (cls, d):
        try:
            return cls(**d)
        except TypeError as e:
            raise DataError('invalid mask spec: {0}'.format(e))


# masks


def generate_view_mask (n, l, p, seed):
    """Randomly disable a fraction of view instances.

generate_view_mask(n, l, p, seed) -> W

:arg n: number of samples.
:arg l: number of views (``>= 1``).
:arg p: missing rate, ``0 <= p < 1``.
:arg seed: random seed.

:return: ``n x l`` 0/1 array with exactly ``ir(p * n * l)`` zeros, every row
         keeping at least one one.

Cells are visited in a random order and disabled while their row still has at
least two available views, until the quota is met.  Raises
:class:`errors.DataError` when the quota exceeds what the row constraint
allows, ``n * (l - 1)`` cells (a rate of ``(l - 1) / l``).

"""
    p = check_rate('view missing rate', p)
    if l < 1:
        raise DataError('need at least one view; got {0}'.format(l))
    quota = ir(p * n * l)
    W = np.ones((n, l))
    if quota == 0:
        return W
    if quota > n * (l - 1):
        raise DataError('view missing rate {0} unreachable with {1} view(s) '
                        'while keeping one view per sample; the maximum '
                        'achievable rate is {2:g}'.format(p, l,
                                                          (l - 1.) / l))
    available = np.full(n, l)
    done = 0
    for cell in rng(seed).permutation(n * l):
        i, v = divmod(int(cell), l)
        if available[i] >= 2:
            W[i, v] = 0
            available[i] -= 1
            done += 1
            if done == quota:
                break
    if done < quota:
        raise DataError('could only disable {0} of {1} view instances'
                        .format(done, quota))
    return W


def generate_label_mask (Y, q, seed):
    """Randomly hide a fraction of positive and of negative labels.

generate_label_mask(Y, q, seed) -> G

:arg Y: binary label matrix.
:arg q: missing rate, ``0 <= q < 1``.
:arg seed: random seed.

:return: 0/1 array shaped like ``Y``: ``ir(q * positives)`` positive cells and
         ``ir(q * negatives)`` negative cells, chosen uniformly, are ``0``.

"""
    q = check_rate('label missing rate', q)
    Y = np.asarray(Y, dtype = np.float64)
    if not is_binary(Y):
        raise DataError('labels have entries other than 0 and 1')
    G = np.ones(Y.shape)
    r = rng(seed)
    flat = G.reshape(-1)
    for value in (1, 0):
        cells = np.flatnonzero(Y.reshape(-1) == value)
        k = ir(q * cells.size)
        if k:
            flat[r.choice(cells, size = k, replace = False)] = 0
    return G


def split_train_test (ds, m, seed):
    """Randomly split samples into training and test sets.

split_train_test(ds, m, seed) -> (train, test)

:arg ds: :class:`MultiViewDataset` or a sample count.
:arg m: training fraction, ``0 < m <= 1``.
:arg seed: random seed.

:return: sorted index arrays; the training set is the first ``ir(m * n)``
         entries of a random permutation.

"""
    m = check_rate('train fraction', m, low_open = True, high_open = False)
    n = ds if isinstance(ds, (int, np.integer)) else ds.n
    if n <= 0:
        raise DataError('cannot split an empty dataset')
    perm = rng(seed).permutation(n)
    k = ir(m * n)
    return np.sort(perm[:k]), np.sort(perm[k:])


def zero_fill (ds):
    """Zero the missing view rows and unobserved labels.

zero_fill(ds) -> dataset

Idempotent.  Raises :class:`errors.DataError` if non-finite values remain.

"""
    views = []
    for v, x in enumerate(ds.views):
        x = np.array(x)
        x[ds.W[:, v] == 0] = 0.
        if not np.all(np.isfinite(x)):
            raise DataError('view {0} has non-finite values after filling'
                            .format(v + 1))
        views.append(x)
    Y = np.array(ds.Y)
    Y[ds.G == 0] = 0.
    return ds.derive(views = views, Y = Y)


def corrupt (ds, spec):
    """Build a double-incomplete dataset from a complete one.

corrupt(ds, spec) -> dataset

:arg ds: complete :class:`MultiViewDataset` (all-ones masks).
:arg spec: :class:`MaskSpec`.

Disables ``p`` of all view instances, splits off a ``m`` training fraction,
hides ``q`` of the positive and of the negative labels of training samples
only (test labels stay complete for evaluation), then zero-fills.  The three
steps draw from independent seeds derived from ``spec.seed``.

"""
    if not (np.all(ds.W == 1) and np.all(ds.G == 1)):
        raise DataError('dataset is already incomplete; corrupt a complete '
                        'dataset')
    s_view, s_split, s_label = spawn_seeds(spec.seed, 3)
    W = generate_view_mask(ds.n, ds.l, spec.view_missing_rate, s_view)
    train, test = split_train_test(ds, spec.train_fraction, s_split)
    G = np.ones((ds.n, ds.c))
    if train.size:
        G[train] = generate_label_mask(ds.Y[train], spec.label_missing_rate,
                                       s_label)
    out = ds.derive(W = W, G = G, split = (train, test), mask_spec = spec)
    log.debug('corrupted: %d missing instances, %d hidden labels, '
              '%d train / %d test', int((W == 0).sum()), int((G == 0).sum()),
              train.size, test.size)
    return zero_fill(out)


# synthesis


def generate_synthetic (n, l, c, dims, latent_dim, noise, seed,
                        projections = None, max_retries = None):
    """Draw a desk-scale dataset from a shared latent factor.

generate_synthetic(n, l, c, dims, latent_dim, noise, seed[, projections]
                   [, max_retries]) -> dataset

:arg n: number of samples.
:arg l: number of views.
:arg c: number of labels.
:arg dims: per-view dimensionalities (a single int is used for every view).
:arg latent_dim: dimensionality of the latent matrix ``U``.
:arg noise: standard deviation of the additive Gaussian view noise.
:arg seed: random seed.
:arg projections: optional list of ``latent_dim x m_v`` matrices to use
                  instead of random ones.
:arg max_retries: attempts per label at a positive rate in ``[0.1, 0.9]``;
                  defaults to ``conf.SYNTH_MAX_RETRIES``.

:return: a complete :class:`MultiViewDataset` (all-ones masks).

``U`` is standard normal; view ``v`` is ``U A[v] + noise * E[v]``; label ``j``
is ``sigmoid(U a_j / sqrt(latent_dim) + b_j) >= 0.5`` for a random ``a_j``,
``b_j``, redrawn until its positive rate is in ``[0.1, 0.9]``.

"""
    if isinstance(dims, (int, np.integer)):
        dims = [dims] * l
    dims = [int(m) for m in dims]
    if min([n, l, c, latent_dim] + dims) < 1:
        raise DataError('n, l, c, latent_dim and dims must all be >= 1')
    if len(dims) != l:
        raise DataError('got {0} view dims for {1} views'.format(len(dims), l))
    if noise < 0:
        raise DataError('noise must be >= 0; got {0}'.format(noise))
    if max_retries is None:
        max_retries = conf.SYNTH_MAX_RETRIES
    r = rng(seed)
    U = r.standard_normal((n, latent_dim))
    views = []
    for v, m in enumerate(dims):
        if projections is not None:
            A = np.asarray(projections[v], dtype = np.float64)
            if A.shape != (latent_dim, m):
                raise DataError('projection {0}: expected shape {1}, got {2}'
                                .format(v, (latent_dim, m), A.shape))
        else:
            A = r.standard_normal((latent_dim, m)) / np.sqrt(latent_dim)
        views.append(U @ A + noise * r.standard_normal((n, m)))
    Y = np.zeros((n, c))
    for j in range(c):
        for attempt in range(max_retries):
            a = r.standard_normal(latent_dim)
            b = r.standard_normal()
            y = expit(U @ a / np.sqrt(latent_dim) + b) >= .5
            if .1 <= y.mean() <= .9:
                Y[:, j] = y
                break
        else:
            raise DataError('label {0}: no positive rate in [0.1, 0.9] after '
                            '{1} attempts'.format(j, max_retries))
    return MultiViewDataset(views, Y, seed = int(seed)
                            if isinstance(seed, (int, np.integer)) else None)


# files


class DatasetManifest (object):
    """The parsed contents of a ``manifest.json``; see the module docstring.

Construct with :meth:`from_dict`; :meth:`to_dict` produces the JSON object.

"""

    _fields = ('format_version', 'n', 'l', 'c', 'dims', 'views', 'labels',
               'view_mask', 'label_mask', 'split', 'mask_spec', 'seed',
               'view_names', 'label_names', 'missing')

    def __init__ (self, n, l, c, dims, views, labels, view_mask, label_mask,
                  split = None, mask_spec = None, seed = None,
                  view_names = None, label_names = None, missing = None,
                  format_version = None):
        self.format_version = conf.DATASET_FORMAT_VERSION \
                              if format_version is None else format_version
        self.n = n
        self.l = l
        self.c = c
        self.dims = list(dims)
        self.views = list(views)
        self.labels = labels
        self.view_mask = view_mask
        self.label_mask = label_mask
        self.split = split
        self.mask_spec = mask_spec
        self.seed = seed
        self.view_names = view_names
        self.label_names = label_names
        self.missing = missing

    @classmethod
    def from_dict (cls, d, source = MANIFEST):
        if not isinstance(d, dict):
            raise DataError('{0}: expected a JSON object'.format(source))
        unknown = sorted(set(d) - set(cls._fields))
        for k in unknown:
            log.warning('%s: unknown field \'%s\' ignored', source, k)
        missing = [k for k in ('n', 'l', 'c', 'dims', 'views', 'labels',
                               'view_mask', 'label_mask') if k not in d]
        if missing:
            raise DataError('{0}: missing fields {1}'.format(
                source, ', '.join(missing)))
        kwargs = dict((k, d[k]) for k in cls._fields if k in d)
        version = kwargs.get('format_version', conf.DATASET_FORMAT_VERSION)
        if version != conf.DATASET_FORMAT_VERSION:
            raise DataError('{0}: unsupported format_version {1!r}'
                            .format(source, version))
        for k in ('n', 'l', 'c'):
            if not isinstance(kwargs[k], int) or isinstance(kwargs[k], bool) \
               or kwargs[k] < (0 if k == 'n' else 1):
                raise DataError('{0}: \'{1}\' must be a non-negative integer'
                                .format(source, k))
        if not isinstance(kwargs['dims'], list) or \
           len(kwargs['dims']) != kwargs['l'] or \
           not all(isinstance(m, int) and m >= 1 for m in kwargs['dims']):
            raise DataError('{0}: \'dims\' must list {1} positive integers'
                            .format(source, kwargs['l']))
        if not isinstance(kwargs['views'], list) or \
           len(kwargs['views']) != kwargs['l']:
            raise DataError('{0}: \'views\' must list {1} files'
                            .format(source, kwargs['l']))
        split = kwargs.get('split')
        if split is not None and (not isinstance(split, dict) or
                                  set(split) != set(('train', 'test'))):
            raise DataError('{0}: \'split\' must have \'train\' and \'test\''
                            .format(source))
        if kwargs.get('mask_spec') is not None:
            kwargs['mask_spec'] = MaskSpec.from_dict(kwargs['mask_spec'])
        return cls(**kwargs)

    def to_dict (self):
        d = {}
        for k in self._fields:
            v = getattr(self, k)
            if v is None:
                continue
            d[k] = v.to_dict() if isinstance(v, MaskSpec) else v
        return d


def write_matrix (fn, a, integer = False):
    """Write a 2-D array as text, one row per line.

write_matrix(fn, a, integer = False)

Floats are written with 17 significant digits so they read back bit for bit.

"""
    a = np.asarray(a, dtype = np.float64)
    if a.ndim != 2:
        raise DataError('write_matrix: expected a 2-D array, got {0} '
                        'dimensions'.format(a.ndim))
    np.savetxt(fn, a, fmt = '%d' if integer else '%.17g')


def read_matrix (fn, what = 'matrix', shape = None, finite = True):
    """Read a matrix written by :func:`write_matrix`.

read_matrix(fn, what = 'matrix'[, shape], finite = True) -> array

:arg what: description used in error messages.
:arg shape: expected ``(rows, cols)``.
:arg finite: reject NaN and infinite entries; views pass ``False`` since
             missing rows may hold anything until zero-filled.

"""
    if not os.path.isfile(fn):
        raise DataError('{0}: missing file \'{1}\''.format(what, fn))
    with warnings.catch_warnings():
        # numpy warns about empty files; reported below
        warnings.simplefilter('ignore', UserWarning)
        try:
            a = np.loadtxt(fn, dtype = np.float64, ndmin = 2)
        except ValueError as e:
            raise DataError('{0}: can\'t parse \'{1}\' ({2})'
                            .format(what, fn, e))
    if a.size == 0:
        if shape is not None and 0 in shape:
            return np.zeros(shape)
        raise DataError('{0}: \'{1}\' is empty'.format(what, fn))
    if shape is not None and a.shape != tuple(shape):
        raise DataError('{0}: expected shape {1} in \'{2}\', found {3}'
                        .format(what, tuple(shape), fn, a.shape))
    if finite and not np.all(np.isfinite(a)):
        raise DataError('{0}: \'{1}\' has non-finite values'.format(what, fn))
    return a


def _read_indices (fn, what):
    if not os.path.isfile(fn):
        raise DataError('{0}: missing file \'{1}\''.format(what, fn))
    with open(fn) as f:
        try:
            return np.array([int(x) for x in f.read().split()],
                            dtype = np.int64)
        except ValueError:
            raise DataError('{0}: \'{1}\' must hold integers'.format(what, fn))


def save_dataset (ds, directory):
    """Write a dataset directory.

save_dataset(ds, directory) -> manifest

Creates ``directory`` if needed; returns the :class:`DatasetManifest` written
to its ``manifest.json``.

"""
    os.makedirs(directory, exist_ok = True)
    views = ['view{0}.txt'.format(v + 1) for v in range(ds.l)]
    for fn, x in zip(views, ds.views):
        write_matrix(os.path.join(directory, fn), x)
    write_matrix(os.path.join(directory, 'labels.txt'), ds.Y, True)
    write_matrix(os.path.join(directory, 'view_mask.txt'), ds.W, True)
    write_matrix(os.path.join(directory, 'label_mask.txt'), ds.G, True)
    split = None
    if ds.split is not None:
        split = {'train': 'train.txt', 'test': 'test.txt'}
        for k, idx in zip(('train', 'test'), ds.split):
            with open(os.path.join(directory, split[k]), 'w') as f:
                f.write(''.join('{0}\n'.format(int(i)) for i in idx))
    manifest = DatasetManifest(
        ds.n, ds.l, ds.c, ds.dims, views, 'labels.txt', 'view_mask.txt',
        'label_mask.txt', split = split, mask_spec = ds.mask_spec,
        seed = ds.seed, view_names = ds.view_names,
        label_names = ds.label_names,
        missing = {'view_instances': int((ds.W == 0).sum()),
                   'labels': int((ds.G == 0).sum())})
    with open(os.path.join(directory, MANIFEST), 'w') as f:
        json.dump(manifest.to_dict(), f, indent = 4, sort_keys = True)
        f.write('\n')
    log.info('wrote dataset (n=%d, l=%d, c=%d) to \'%s\'', ds.n, ds.l, ds.c,
             directory)
    return manifest


def load_dataset (path):
    """Read a dataset directory.

load_dataset(path) -> dataset

:arg path: the manifest file or the directory containing ``manifest.json``.

:return: the zero-filled :class:`MultiViewDataset`.

"""
    fn = os.path.join(path, MANIFEST) if os.path.isdir(path) else path
    try:
        with open(fn) as f:
            d = json.load(f)
    except IOError as e:
        raise DataError('can\'t read manifest \'{0}\' ({1})'
                        .format(fn, e.strerror))
    except ValueError as e:
        raise DataError('invalid JSON in \'{0}\' ({1})'.format(fn, e))
    manifest = DatasetManifest.from_dict(d, fn)
    base = os.path.dirname(fn)
    n = manifest.n
    views = [read_matrix(os.path.join(base, rel), 'view {0}'.format(v + 1),
                          (n, m), finite = False)
             for v, (rel, m) in enumerate(zip(manifest.views, manifest.dims))]
    Y = read_matrix(os.path.join(base, manifest.labels), 'labels',
                     (n, manifest.c))
    W = read_matrix(os.path.join(base, manifest.view_mask), 'view mask',
                     (n, manifest.l))
    G = read_matrix(os.path.join(base, manifest.label_mask), 'label mask',
                     (n, manifest.c))
    split = None
    if manifest.split is not None:
        split = tuple(_read_indices(os.path.join(base, manifest.split[k]),
                                    k + ' split') for k in ('train', 'test'))
    ds = MultiViewDataset(views, Y, W, G, view_names = manifest.view_names,
                          label_names = manifest.label_names, split = split,
                          mask_spec = manifest.mask_spec,
                          seed = manifest.seed)
    return zero_fill(ds)
