"""Fixtures shared by the test scripts.

Importing this module puts the source tree first on ``sys.path`` (taken
from ``WAND_TOP_SRCDIR`` when run-test.sh sets it), so the scripts test
the checkout rather than an installed copy.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

import os
import sys
import unittest

srcdir = os.path.normpath(os.environ.get('WAND_TOP_SRCDIR') or
                          os.path.join(os.path.dirname(__file__), '..'))
if srcdir not in sys.path:
    sys.path.insert(0, srcdir)

import numpy as np

from wand.chain_state import (
    ChainState, Hyperparams, Trace, TraceHeader, TraceRecord)
from wand.ranking_data import Dataset, Ranking

SLOW_ENV = 'WAND_SLOW_TESTS'


def slow(test):
    """Skip `test` unless ``WAND_SLOW_TESTS=1``."""
    return unittest.skipUnless(os.environ.get(SLOW_ENV) == '1',
                               'set %s=1 to run' % SLOW_ENV)(test)


def dataset(orderings, num_entities, considered=None, p=0.75):
    """Dataset with one ranking per ordering; every ranker considers
    `considered` (default: all entities)."""
    if considered is None:
        considered = range(num_entities)
    rankings = tuple(Ranking(tuple(o), frozenset(considered))
                     for o in orderings)
    return Dataset(num_entities, rankings, (p,) * len(rankings))


def state(c, D, Lambda, w=None, alpha=1.0, gamma=None, Z=None):
    c = np.array(c, dtype=np.intp)
    D = [np.array(d, dtype=np.intp) for d in D]
    Lambda = [np.array(lam, dtype=float) for lam in Lambda]
    if w is None:
        w = np.ones(len(c), dtype=np.intp)
    if gamma is None:
        gamma = np.ones(len(Lambda))
    return ChainState(c=c, D=D, Lambda=Lambda,
                      w=np.array(w, dtype=np.intp), alpha=float(alpha),
                      gamma=np.array(gamma, dtype=float), Z=Z)


def trace(states, num_entities, logliks=None):
    """Trace holding `states` as iterations 1, 2, ..."""
    header = TraceHeader(seed=0, chain=0, hyperparams=Hyperparams(),
                         burn_in=0, thin=1, iterations=len(states),
                         num_rankers=len(states[0].c),
                         num_entities=num_entities)
    if logliks is None:
        logliks = [0.0] * len(states)
    return Trace(header, [TraceRecord(t, s, ll) for t, (s, ll)
                          in enumerate(zip(states, logliks), start=1)])
