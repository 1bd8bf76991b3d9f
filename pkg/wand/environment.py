"""Process-wide defaults: worker limits and random streams.

The worker limit plays the part a default main loop plays elsewhere: a
single process-wide setting that functions fall back to when the caller
does not pass one explicitly.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('get_default_worker_limit', 'set_default_worker_limit',
           'make_rng', 'validate_seed', 'THREADS_ENV',
           'CHAIN_STREAM', 'PREDICTIVE_STREAM', 'SIMULATE_STREAM')
__docformat__ = 'restructuredtext'

import logging
import os

import numpy as np

from wand.exceptions import ConfigurationException


_logger = logging.getLogger('wand.environment')

THREADS_ENV = 'WAND_THREADS'
"""Environment variable capping the number of worker threads/processes."""

# spawn-key prefixes keeping the independent random streams apart
CHAIN_STREAM = 0
PREDICTIVE_STREAM = 1
SIMULATE_STREAM = 2

_MAX_SEED = 2 ** 64 - 1

_default_worker_limit = None


def _limit_from_environment():
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == '':
        return os.cpu_count() or 1
    try:
        limit = int(raw)
    except ValueError:
        raise ConfigurationException('%s must be a positive integer, not %r'
                                     % (THREADS_ENV, raw))
    if limit < 1:
        raise ConfigurationException('%s must be a positive integer, not %r'
                                     % (THREADS_ENV, raw))
    return limit


def get_default_worker_limit():
    """Return the maximum number of concurrent workers.

    If `set_default_worker_limit` has not been called, the value comes
    from the ``WAND_THREADS`` environment variable, or the CPU count when
    it is unset.
    """
    if _default_worker_limit is not None:
        return _default_worker_limit
    return _limit_from_environment()


def set_default_worker_limit(limit):
    """Override the worker limit for this process.

    :Parameters:
        `limit` : int or None
            A positive integer, or None to go back to reading
            ``WAND_THREADS``.
    """
    global _default_worker_limit
    if limit is not None:
        limit = int(limit)
        if limit < 1:
            raise ConfigurationException('worker limit must be positive, '
                                         'not %d' % limit)
    _logger.debug('default worker limit set to %r', limit)
    _default_worker_limit = limit


def validate_seed(seed):
    """Check that `seed` is a 64-bit unsigned integer and return it."""
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigurationException('seed must be an integer, not %r'
                                     % (seed,))
    if seed < 0 or seed > _MAX_SEED:
        raise ConfigurationException('seed must fit in 64 unsigned bits, '
                                     'not %d' % seed)
    return seed


def make_rng(seed, *key):
    """Return a `numpy.random.Generator` for the stream ``(seed, key)``.

    Streams with different keys are statistically independent, and the
    stream for a key does not depend on how many other keys are in use,
    so adding chains never perturbs chain 0.
    """
    sequence = np.random.SeedSequence(validate_seed(seed),
                                      spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(sequence)
