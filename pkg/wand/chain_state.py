"""Markov chain state, hyperparameters, relabelling and traces.

The state holds the ranker allocations ``c``, the per-cluster entity
allocations ``D``, the skill atoms ``Lambda``, the latent exponentials
``Z``, the reliability weights ``w`` and the concentrations ``alpha`` and
``gamma``.  Skill of entity j for ranker i is
``Lambda[c[i]][D[c[i]][j]]``.

Traces are newline-delimited JSON: one header record, then one record per
retained sample.  Latents are not persisted.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('Hyperparams', 'ChainState', 'Trace', 'TraceHeader',
           'TraceRecord', 'TraceWriter', 'read_trace', 'init_from_prior',
           'relabel', 'skill_of', 'crp_partition', 'seat_customers',
           'complete_data_log_likelihood',
           'prior_cluster_count_distribution')
__docformat__ = 'restructuredtext'

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from wand._version import __version__
from wand.exceptions import (
    ConfigurationException, InvariantViolationException,
    TraceFormatException)
from wand.likelihood import SKILL_FLOOR, complete_data_log_lik


_logger = logging.getLogger('wand.chain_state')


@dataclass(frozen=True)
class Hyperparams(object):
    """Prior settings.

    ``G0 = Ga(a, 1)``; ``alpha ~ Ga(a_alpha, b_alpha)``;
    ``gamma_s ~ Ga(a_gamma, b_gamma)`` (shape, rate).  `m_r` and `m_e` are
    the numbers of auxiliary clusters proposed by the ranker and entity
    allocation moves; `samples_per_iter` is L for predictive checks.
    """

    a: float = 1.0
    a_alpha: float = 1.0
    b_alpha: float = 1.0
    a_gamma: float = 3.0
    b_gamma: float = 3.0
    m_r: int = 3
    m_e: int = 3
    samples_per_iter: int = 1

    def __post_init__(self):
        for name in ('a', 'a_alpha', 'b_alpha', 'a_gamma', 'b_gamma'):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)
                    and value > 0):
                raise ConfigurationException('%s must be a positive number, '
                                             'not %r' % (name, value))
            object.__setattr__(self, name, float(value))
        for name in ('m_r', 'm_e', 'samples_per_iter'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigurationException('%s must be a positive '
                                             'integer, not %r'
                                             % (name, value))
            object.__setattr__(self, name, int(value))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        return cls(**doc)


@dataclass
class ChainState(object):
    """Every variable of the Gibbs sampler.

    `D`, `Lambda` and `Z` are ragged: lists of vectors.  `Z` is None on
    snapshots read back from a trace.
    """

    c: np.ndarray
    D: list
    Lambda: list
    w: np.ndarray
    alpha: float
    gamma: np.ndarray
    Z: list = field(default=None)

    @property
    def num_ranker_clusters(self):
        return len(self.Lambda)

    @property
    def entity_cluster_counts(self):
        return [len(lam) for lam in self.Lambda]

    @property
    def total_atoms(self):
        return sum(len(lam) for lam in self.Lambda)

    def cluster_skills(self, s):
        """Skills of all K entities within ranker cluster `s`."""
        return self.Lambda[s][self.D[s]]

    def ranker_skills(self, i):
        return self.cluster_skills(self.c[i])

    def ranker_skill_matrix(self):
        """(n, K) matrix whose row i is `ranker_skills(i)`."""
        rows = np.array([self.cluster_skills(s)
                         for s in range(self.num_ranker_clusters)])
        return rows[self.c]

    def copy(self, latents=True):
        return ChainState(
            c=self.c.copy(),
            D=[d.copy() for d in self.D],
            Lambda=[lam.copy() for lam in self.Lambda],
            w=self.w.copy(),
            alpha=float(self.alpha),
            gamma=self.gamma.copy(),
            Z=[z.copy() for z in self.Z] if latents and self.Z is not None
            else None)

    def check_invariants(self):
        """Raise `InvariantViolationException` unless labels are
        contiguous, shapes agree and every skill and latent is positive."""
        num = self.num_ranker_clusters
        if len(self.D) != num or len(self.gamma) != num:
            raise InvariantViolationException('%d Lambda rows, %d D rows, '
                                              '%d gammas' % (num, len(self.D),
                                                             len(self.gamma)))
        if set(np.unique(self.c).tolist()) != set(range(num)):
            raise InvariantViolationException('ranker labels are not '
                                              'contiguous')
        for s, (d, lam) in enumerate(zip(self.D, self.Lambda)):
            if set(np.unique(d).tolist()) != set(range(len(lam))):
                raise InvariantViolationException('entity labels of cluster '
                                                  '%d are not contiguous' % s)
            if np.any(lam <= 0.0):
                raise InvariantViolationException('non-positive skill in '
                                                  'cluster %d' % s)
        if self.alpha <= 0 or np.any(self.gamma <= 0):
            raise InvariantViolationException('non-positive concentration')
        if self.Z is not None:
            for i, z in enumerate(self.Z):
                if np.any(z <= 0.0):
                    raise InvariantViolationException('non-positive latent '
                                                      'for ranker %d' % i)


def skill_of(state, ranker, entity):
    """Return lambda_{c_i, d_{c_i, j}} for ranker `ranker` and entity
    `entity`.

    :Raises IndexError: if either index is out of range.
    """
    if not 0 <= ranker < len(state.c):
        raise IndexError('ranker %d out of range' % ranker)
    s = state.c[ranker]
    if not 0 <= entity < len(state.D[s]):
        raise IndexError('entity %d out of range' % entity)
    return float(state.Lambda[s][state.D[s][entity]])


def seat_customers(uniforms, concentration):
    """Chinese restaurant seating driven by one uniform per customer.

    Customer k scales its uniform to ``[0, k + concentration)``.  Below k
    it sits with the customer at the integer part of that value, which
    picks an existing table with probability proportional to its
    occupancy; otherwise it opens a table.

    The last axis of `uniforms` runs over customers; leading axes seat
    independent restaurants at once, `concentration` broadcasting over
    them.
    """
    uniforms = np.asarray(uniforms, dtype=float)
    concentration = np.asarray(concentration, dtype=float)
    labels = np.zeros(uniforms.shape, dtype=np.intp)
    tables = np.zeros(uniforms.shape[:-1], dtype=np.intp)
    for k in range(uniforms.shape[-1]):
        target = uniforms[..., k] * (k + concentration)
        join = target < k
        earlier = np.minimum(target, max(k - 1, 0)).astype(np.intp)
        picked = np.take_along_axis(labels, np.expand_dims(earlier, -1),
                                    axis=-1)
        labels[..., k] = np.where(join, picked[..., 0], tables)
        tables = tables + ~join
    return labels


def crp_partition(size, concentration, rng):
    """Seat `size` customers by a Chinese restaurant process.

    Customer k joins an existing table with probability proportional to
    its occupancy and opens a new one with probability proportional to
    `concentration`.  Labels come out in first-appearance order.
    """
    return seat_customers(rng.random(size), concentration)


def _first_appearance(labels):
    """Return (relabelled, order) where order[new] = old."""
    uniques, first = np.unique(labels, return_index=True)
    order = uniques[np.argsort(first)]
    mapping = np.empty(uniques.max() + 1 if len(uniques) else 0,
                       dtype=np.intp)
    mapping[order] = np.arange(len(order))
    return mapping[labels], order


def relabel(state):
    """Drop empty clusters and make every label range contiguous.

    Ranker clusters are renumbered by first appearance in ``c`` and entity
    clusters within each ranker cluster by first appearance in its row of
    ``D``; Lambda rows, gammas and D rows follow.  The skill of every
    (ranker, entity) pair is unchanged.  Returns a new state.
    """
    c, order = _first_appearance(state.c)
    D = []
    Lambda = []
    for old in order:
        d, atoms = _first_appearance(state.D[old])
        D.append(d)
        Lambda.append(np.asarray(state.Lambda[old], dtype=float)[atoms])
    return ChainState(
        c=c,
        D=D,
        Lambda=Lambda,
        w=state.w.copy(),
        alpha=float(state.alpha),
        gamma=np.asarray(state.gamma, dtype=float)[order],
        Z=None if state.Z is None else [z.copy() for z in state.Z])


def draw_skills(shape, size, rng):
    return np.maximum(rng.gamma(shape, 1.0, size=size), SKILL_FLOOR)


def draw_cluster(num_entities, h, rng):
    """Draw one ranker cluster from its prior: gamma_c, an entity
    partition by CRP(gamma_c) and atoms from G0."""
    gamma = rng.gamma(h.a_gamma, 1.0 / h.b_gamma)
    d = crp_partition(num_entities, gamma, rng)
    lam = draw_skills(h.a, d.max() + 1, rng)
    return d, lam, gamma


def resample_latents(state, data, rng):
    state.Z = data.exposure_layout.sample_latents(
        state.ranker_skill_matrix(), state.w, rng)
    return state


def init_from_prior(data, h, rng):
    """Draw a starting state from the prior.

    alpha, then ``c`` by CRP(alpha); for each ranker cluster its gamma,
    entity partition and atoms; ``w_i ~ Bern(p_i)``; finally Z given
    everything else.

    :Parameters:
        `rng` : numpy.random.Generator
    """
    alpha = rng.gamma(h.a_alpha, 1.0 / h.b_alpha)
    c = crp_partition(data.num_rankers, alpha, rng)
    D = []
    Lambda = []
    gamma = []
    for _ in range(c.max() + 1):
        d, lam, g = draw_cluster(data.num_entities, h, rng)
        D.append(d)
        Lambda.append(lam)
        gamma.append(g)
    w = (rng.random(data.num_rankers)
         < data.reliability_array).astype(np.intp)
    state = ChainState(c=c, D=D, Lambda=Lambda, w=w, alpha=float(alpha),
                       gamma=np.array(gamma, dtype=float))
    return resample_latents(state, data, rng)


def complete_data_log_likelihood(state, data):
    """Sum over rankers of the complete-data log-likelihood."""
    return float(sum(
        complete_data_log_lik(ranking, state.Z[i], state.ranker_skills(i),
                              int(state.w[i]))
        for i, ranking in enumerate(data.rankings)))


def _log_unsigned_stirling(size):
    """log |s(size, k)| for k = 0 .. size."""
    row = np.full(size + 1, -np.inf)
    row[0] = 0.0
    for n in range(size):
        shifted = np.full(size + 1, -np.inf)
        shifted[1:] = row[:-1]
        with np.errstate(divide='ignore'):
            row = np.logaddexp(np.log(n) + row if n else
                               np.full(size + 1, -np.inf), shifted)
    return row


def prior_cluster_count_distribution(size, shape, rate):
    """Prior law of the number of CRP clusters among `size` customers when
    the concentration is ``Ga(shape, rate)``.

    Uses ``Pr(k | alpha) = |s(size, k)| alpha^k Gamma(alpha) /
    Gamma(alpha + size)`` integrated numerically against the gamma prior.

    :Returns: dict mapping k to its probability, for k = 1 .. size.
    """
    log_stirling = _log_unsigned_stirling(size)
    log_norm = shape * math.log(rate) - gammaln(shape)

    def integrand(alpha, k):
        if alpha <= 0.0:
            return 0.0
        return math.exp(log_stirling[k] + (k + shape - 1) * math.log(alpha)
                        + gammaln(alpha) - gammaln(alpha + size)
                        - rate * alpha + log_norm)

    dist = {}
    for k in range(1, size + 1):
        value, _ = integrate.quad(integrand, 0.0, np.inf, args=(k,),
                                  limit=200)
        dist[k] = value
    return dist


@dataclass(frozen=True)
class TraceHeader(object):
    seed: int
    chain: int
    hyperparams: Hyperparams
    burn_in: int
    thin: int
    iterations: int
    num_rankers: int
    num_entities: int
    rescale: bool = True
    version: str = __version__

    def to_dict(self):
        doc = asdict(self)
        doc['hyperparams'] = self.hyperparams.to_dict()
        return doc

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc)
        doc['hyperparams'] = Hyperparams.from_dict(doc['hyperparams'])
        return cls(**doc)


@dataclass
class TraceRecord(object):
    iteration: int
    state: ChainState
    loglik: float

    def to_dict(self):
        state = self.state
        return {
            'iter': int(self.iteration),
            'c': state.c.tolist(),
            'D': [d.tolist() for d in state.D],
            'lambda': [lam.tolist() for lam in state.Lambda],
            'w': state.w.tolist(),
            'alpha': float(state.alpha),
            'gamma': state.gamma.tolist(),
            'loglik': float(self.loglik),
        }

    @classmethod
    def from_dict(cls, doc):
        state = ChainState(
            c=np.array(doc['c'], dtype=np.intp),
            D=[np.array(d, dtype=np.intp) for d in doc['D']],
            Lambda=[np.array(lam, dtype=float) for lam in doc['lambda']],
            w=np.array(doc['w'], dtype=np.intp),
            alpha=float(doc['alpha']),
            gamma=np.array(doc['gamma'], dtype=float))
        return cls(int(doc['iter']), state, float(doc['loglik']))


class Trace(object):
    """Thinned sequence of chain snapshots with their complete-data
    log-likelihoods."""

    def __init__(self, header, records=()):
        self.header = header
        self.records = []
        for record in records:
            self.append(record)

    def append(self, record):
        if self.records and record.iteration <= self.records[-1].iteration:
            raise TraceFormatException('iteration %d does not follow %d'
                                       % (record.iteration,
                                          self.records[-1].iteration))
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def states(self):
        return [record.state for record in self.records]

    @classmethod
    def pooled(cls, traces):
        """Concatenate independent chains for summaries.  Iterations are
        renumbered so they stay strictly increasing."""
        traces = list(traces)
        pooled = cls(traces[0].header)
        for record in (r for trace in traces for r in trace):
            pooled.records.append(TraceRecord(len(pooled.records) + 1,
                                              record.state, record.loglik))
        return pooled

    def __repr__(self):
        return '<wand.Trace of %d records, chain %d>' % (len(self.records),
                                                          self.header.chain)


def _dumps(doc):
    return json.dumps(doc, separators=(',', ':'))


class TraceWriter(object):
    """Stream a trace to a newline-delimited JSON file."""

    def __init__(self, path, header):
        self._path = path
        self._file = open(path, 'w', encoding='utf-8')
        self._file.write(_dumps({'header': header.to_dict()}))
        self._file.write('\n')

    def write(self, record):
        self._file.write(_dumps(record.to_dict()))
        self._file.write('\n')

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def read_trace(path):
    """Load a trace written by `TraceWriter`."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = [line for line in f if line.strip()]
    except OSError as e:
        raise TraceFormatException('cannot read %s (%s)' % (path, e))
    if not lines:
        raise TraceFormatException('%s is empty' % path)
    try:
        first = json.loads(lines[0])
        header = TraceHeader.from_dict(first['header'])
        trace = Trace(header)
        for line in lines[1:]:
            trace.append(TraceRecord.from_dict(json.loads(line)))
    except (ValueError, KeyError, TypeError) as e:
        raise TraceFormatException('%s: %s' % (path, e))
    _logger.debug('read %d records from %s', len(trace), path)
    return trace
