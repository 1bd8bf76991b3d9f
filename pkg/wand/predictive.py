"""Posterior predictive checks.

For each ranker the posterior predictive law of its ranking is estimated
by averaging that ranker's weighted Plackett-Luce law over the retained
samples.  The diagnostic probability is the share of orderings whose
predictive probability is no larger than the observed ranking's: small
values flag rankers the model explains poorly.

Three estimators are available:

``full``
    enumerate every ordering of the considered entities (only when there
    are at most `DEFAULT_CAP` of them, or a raised cap);
``truncated``
    enumerate only the observed ranking plus the distinct orderings drawn
    from the predictive at every sample, and renormalise over them;
``approximate``
    as truncated, but leave the probabilities of the drawn orderings
    unnormalised and share the remaining mass equally among all orderings
    never drawn.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('PredictiveDistribution', 'PredictiveReport', 'RankerCheck',
           'full_predictive', 'monte_carlo_predictive',
           'diagnostic_probabilities', 'check_trace_matches',
           'choose_method', 'DEFAULT_CAP', 'TIE_TOLERANCE', 'FULL',
           'TRUNCATED', 'APPROXIMATE', 'AUTO')
__docformat__ = 'restructuredtext'

import csv
import itertools
import logging
import sys
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from tqdm import tqdm

from wand.environment import (
    PREDICTIVE_STREAM, get_default_worker_limit, make_rng)
from wand.exceptions import (
    ConfigurationException, EmptyTraceException, EnumerationCapException,
    InvariantViolationException, TraceFormatException)
from wand.likelihood import ordering_count, ordering_log_probs, sample_ordering


_logger = logging.getLogger('wand.predictive')

FULL = 'full'
TRUNCATED = 'truncated'
APPROXIMATE = 'approximate'
AUTO = 'auto'
METHODS = (FULL, TRUNCATED, APPROXIMATE)

DEFAULT_CAP = 10 ** 5
"""Largest number of orderings the full predictive will enumerate."""

TIE_TOLERANCE = 1e-12
"""Relative tolerance under which two predictive probabilities count as
tied."""

RankerCheck = namedtuple('RankerCheck', 'ranker method support_size '
                         'observed_prob diagnostic_prob')


def _at_most(values, observed):
    return values <= observed + TIE_TOLERANCE * abs(observed)


class PredictiveDistribution(object):
    """Predictive probabilities of a set of orderings for one ranker.

    `orderings` is an int array with one ordering per row and
    `probabilities` the matching estimates.  `observed_index` is the row
    of the observed ranking.  `residual` is the mass spread over each of
    the ``total_orderings - len(orderings)`` orderings not listed; it is
    zero except in approximate mode.
    """

    def __init__(self, method, orderings, probabilities, observed_index,
                 total_orderings, residual=0.0):
        self.method = method
        self.orderings = orderings
        self.probabilities = probabilities
        self.observed_index = observed_index
        self.total_orderings = total_orderings
        self.residual = residual

    @property
    def support_size(self):
        return len(self.orderings)

    @property
    def observed_prob(self):
        return float(self.probabilities[self.observed_index])

    @property
    def missing_count(self):
        return self.total_orderings - self.support_size

    def probability_of(self, ordering):
        ordering = tuple(ordering)
        for row, prob in zip(self.orderings, self.probabilities):
            if tuple(row) == ordering:
                return float(prob)
        if self.missing_count:
            return self.residual / self.missing_count
        return 0.0

    def diagnostic(self):
        """Share of orderings with predictive probability no larger than
        the observed one.  Ties count."""
        observed = self.observed_prob
        count = int(np.count_nonzero(_at_most(self.probabilities, observed)))
        if self.method == TRUNCATED:
            return count / float(self.support_size)
        if self.missing_count and _at_most(
                self.residual / self.missing_count, observed):
            count += self.missing_count
        return count / float(self.total_orderings)


class PredictiveReport(object):
    """Per-ranker results of `diagnostic_probabilities`."""

    def __init__(self, checks):
        self.checks = list(checks)
        for check in self.checks:
            if not 0.0 < check.diagnostic_prob <= 1.0:
                raise InvariantViolationException(
                    'ranker %d has diagnostic probability %r'
                    % (check.ranker, check.diagnostic_prob))

    def __len__(self):
        return len(self.checks)

    def __iter__(self):
        return iter(self.checks)

    def __getitem__(self, ranker):
        return self.checks[ranker]

    def write_csv(self, path):
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f)
            writer.writerow(['ranker', 'method', 'support_size',
                             'observed_prob', 'diagnostic_prob'])
            for check in self.checks:
                writer.writerow([check.ranker, check.method,
                                 check.support_size,
                                 repr(check.observed_prob),
                                 repr(check.diagnostic_prob)])


def check_trace_matches(trace, data):
    """Raise `TraceFormatException` unless `trace` was produced from a
    dataset shaped like `data`."""
    header = trace.header
    if (header.num_rankers != data.num_rankers
            or header.num_entities != data.num_entities):
        raise TraceFormatException(
            'trace is for %d rankers and %d entities, dataset has %d and %d'
            % (header.num_rankers, header.num_entities, data.num_rankers,
               data.num_entities))
    if len(trace) == 0:
        raise EmptyTraceException('a predictive distribution')


def _considered(ranking):
    return np.array(sorted(ranking.considered), dtype=np.intp)


def _average_probabilities(trace, ranker, orderings, considered):
    total = np.zeros(len(orderings))
    for state in trace.states:
        total += np.exp(ordering_log_probs(orderings, considered,
                                           state.ranker_skills(ranker),
                                           int(state.w[ranker])))
    return total / len(trace)


def full_predictive(trace, data, ranker, cap=DEFAULT_CAP):
    """Rao-Blackwellised predictive over every ordering of the considered
    entities.

    :Raises EnumerationCapException: if there are more than `cap`
        orderings.
    """
    check_trace_matches(trace, data)
    ranking = data.rankings[ranker]
    total = ordering_count(ranking.considered_count, ranking.length)
    if total > cap:
        raise EnumerationCapException(total, cap, ranker=ranker)
    considered = _considered(ranking)
    orderings = np.array(list(itertools.permutations(considered,
                                                     ranking.length)),
                         dtype=np.intp).reshape(total, ranking.length)
    observed = int(np.flatnonzero(
        np.all(orderings == ranking.items_array, axis=1))[0])
    probabilities = _average_probabilities(trace, ranker, orderings,
                                           considered)
    return PredictiveDistribution(FULL, orderings, probabilities, observed,
                                  total)


def monte_carlo_predictive(trace, data, ranker, samples_per_iter=1,
                           mode=TRUNCATED, seed=0):
    """Predictive restricted to the observed ranking and the orderings drawn
    from the per-sample predictive laws.

    :Parameters:
        `samples_per_iter` : int
            L, the number of orderings drawn at every retained sample.
        `mode` : ``'truncated'`` or ``'approximate'``
        `seed` : int
            With `ranker` it fixes the random stream, so rankers can be
            processed in any order.
    """
    if int(samples_per_iter) != samples_per_iter or samples_per_iter < 1:
        raise ConfigurationException('samples per iteration must be a '
                                     'positive integer, not %r'
                                     % (samples_per_iter,))
    if mode not in (TRUNCATED, APPROXIMATE):
        raise ConfigurationException('unknown Monte Carlo mode %r' % (mode,))
    check_trace_matches(trace, data)
    rng = make_rng(seed, PREDICTIVE_STREAM, ranker)
    ranking = data.rankings[ranker]
    considered = _considered(ranking)
    support = {ranking.items: 0}
    for state in trace.states:
        skills = state.ranker_skills(ranker)
        for _ in range(samples_per_iter):
            drawn = sample_ordering(considered, skills, int(state.w[ranker]),
                                    ranking.length, rng)
            support.setdefault(drawn, len(support))
    orderings = np.array(list(support), dtype=np.intp).reshape(
        len(support), ranking.length)
    probabilities = _average_probabilities(trace, ranker, orderings,
                                           considered)
    total = ordering_count(ranking.considered_count, ranking.length)
    residual = 0.0
    if mode == TRUNCATED or len(support) == total:
        probabilities = probabilities / probabilities.sum()
    else:
        residual = max(0.0, 1.0 - float(probabilities.sum()))
    return PredictiveDistribution(mode, orderings, probabilities, 0, total,
                                  residual)


def choose_method(ranking, method, cap):
    """Resolve ``'auto'``: full enumeration within the cap, truncated
    otherwise."""
    if method == AUTO:
        total = ordering_count(ranking.considered_count, ranking.length)
        return FULL if total <= cap else TRUNCATED
    if method not in METHODS:
        raise ConfigurationException('unknown predictive method %r'
                                     % (method,))
    return method


def diagnostic_probabilities(trace, data, method=AUTO, samples_per_iter=1,
                             cap=DEFAULT_CAP, seed=0, workers=None,
                             progress=False):
    """Diagnostic probability of every ranker's observed ranking.

    Rankers are processed concurrently on up to `workers` threads
    (default: `wand.environment.get_default_worker_limit`).  Results do
    not depend on the number of workers.

    :Returns: `PredictiveReport`, one row per ranker in ranker order.
    """
    check_trace_matches(trace, data)

    def check(ranker):
        ranking = data.rankings[ranker]
        chosen = choose_method(ranking, method, cap)
        if chosen == FULL:
            dist = full_predictive(trace, data, ranker, cap)
        else:
            dist = monte_carlo_predictive(trace, data, ranker,
                                          samples_per_iter, chosen, seed)
        return RankerCheck(ranker, chosen, dist.support_size,
                           dist.observed_prob, dist.diagnostic())

    if workers is None:
        workers = get_default_worker_limit()
    _logger.info('predictive checks for %d rankers (%s) on %d workers',
                 data.num_rankers, method, workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        checks = list(tqdm(executor.map(check, range(data.num_rankers)),
                           total=data.num_rankers, disable=not progress,
                           desc='ppc', file=sys.stderr, unit='ranker'))
    for row in checks:
        _logger.debug('ranker %d: %s over %d orderings, diagnostic %.4f',
                      row.ranker, row.method, row.support_size,
                      row.diagnostic_prob)
    return PredictiveReport(checks)
