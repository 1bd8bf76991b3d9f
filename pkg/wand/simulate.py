"""Synthetic datasets drawn from the generative model.

A `GenerativeSpec` fixes the ranker clusters (explicit weights or a
Chinese restaurant process), the skills within each cluster (explicit
per-entity values or a CRP over entities with gamma atoms), the prior
reliabilities and how much of each ranking is observed.  `generate` draws
a dataset and returns the ground truth alongside it for recovery scoring.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('GenerativeSpec', 'GroundTruth', 'RecoveryScore', 'generate',
           'redraw_rankings', 'two_cluster_spec', 'recovery_score',
           'save_truth', 'load_spec')
__docformat__ = 'restructuredtext'

import json
import logging
import math
from collections import namedtuple
from dataclasses import asdict, dataclass

import numpy as np

from wand.chain_state import _first_appearance, crp_partition, draw_skills
from wand.environment import SIMULATE_STREAM, make_rng
from wand.exceptions import (
    ConfigurationException, DimensionMismatchException)
from wand.likelihood import sample_ordering
from wand.ranking_data import Dataset, Ranking, RankingKind
from wand.summaries import ranker_dissimilarity, reliability_probabilities


_logger = logging.getLogger('wand.simulate')

SCHEMES = tuple(kind.value for kind in RankingKind)

RecoveryScore = namedtuple('RecoveryScore', 'rand_index '
                           'cluster_count_hit_rate reliability_error')


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value)
            and value > 0):
        raise ConfigurationException('%s must be a positive number, not %r'
                                     % (name, value))
    return float(value)


@dataclass(frozen=True)
class GenerativeSpec(object):
    """Settings for `generate`.

    :Parameters:
        `cluster_weights` : sequence of float or None
            Probabilities of the ranker clusters; None draws the ranker
            partition from CRP(`alpha`).
        `assignments` : sequence of int or None
            Fixed ranker clusters, overriding `cluster_weights`.
        `cluster_skills` : sequence of sequences of float or None
            Skill of every entity in every ranker cluster.  Entities with
            equal skills form one entity cluster.  None draws each
            cluster's entity partition from CRP(`gamma`) and its atoms
            from Ga(`a`, 1).
        `reliability` : float or sequence of float
            p_i for every ranker.
        `scheme` : one of ``'complete'``, ``'partial'``,
            ``'top-m complete'``, ``'top-m partial'``.
        `considered_count` : int
            K_i for partial schemes.
        `top_m` : int
            M for top-M schemes.
    """

    num_entities: int
    num_rankers: int
    cluster_weights: tuple = None
    assignments: tuple = None
    alpha: float = 1.0
    cluster_skills: tuple = None
    gamma: float = 1.0
    a: float = 1.0
    reliability: tuple = 0.75
    scheme: str = RankingKind.COMPLETE.value
    considered_count: int = None
    top_m: int = None

    def __post_init__(self):
        K = int(self.num_entities)
        n = int(self.num_rankers)
        if K < 1 or n < 1:
            raise ConfigurationException('need at least one entity and one '
                                         'ranker')
        object.__setattr__(self, 'num_entities', K)
        object.__setattr__(self, 'num_rankers', n)
        for name in ('alpha', 'gamma', 'a'):
            object.__setattr__(self, name, _positive(name,
                                                     getattr(self, name)))
        clusters = None
        if self.cluster_weights is not None:
            weights = tuple(float(x) for x in self.cluster_weights)
            if (not weights or min(weights) < 0
                    or abs(sum(weights) - 1.0) > 1e-9):
                raise ConfigurationException('cluster weights must be a '
                                             'probability vector')
            object.__setattr__(self, 'cluster_weights', weights)
            clusters = len(weights)
        if self.assignments is not None:
            assignments = tuple(int(s) for s in self.assignments)
            if len(assignments) != n or min(assignments) < 0:
                raise ConfigurationException('need one non-negative cluster '
                                             'per ranker')
            object.__setattr__(self, 'assignments', assignments)
            clusters = max(clusters or 0, max(assignments) + 1)
        if self.cluster_skills is not None:
            skills = tuple(tuple(_positive('skill', float(x)) for x in row)
                           for row in self.cluster_skills)
            if any(len(row) != K for row in skills):
                raise ConfigurationException('every cluster needs %d skills'
                                             % K)
            if clusters is not None and len(skills) != clusters:
                raise ConfigurationException('%d skill rows for %d clusters'
                                             % (len(skills), clusters))
            if clusters is None:
                raise ConfigurationException('fixed skills need cluster '
                                             'weights or assignments')
            object.__setattr__(self, 'cluster_skills', skills)
        if isinstance(self.reliability, (int, float)):
            reliability = (float(self.reliability),) * n
        else:
            reliability = tuple(float(p) for p in self.reliability)
        if len(reliability) != n or not all(0.0 < p <= 1.0
                                            for p in reliability):
            raise ConfigurationException('need one reliability in (0, 1] '
                                         'per ranker')
        object.__setattr__(self, 'reliability', reliability)
        if self.scheme not in SCHEMES:
            raise ConfigurationException('unknown observation scheme %r'
                                         % (self.scheme,))
        partial = self.scheme in (RankingKind.PARTIAL.value,
                                  RankingKind.TOP_M_PARTIAL.value)
        top = self.scheme in (RankingKind.TOP_M_COMPLETE.value,
                              RankingKind.TOP_M_PARTIAL.value)
        if (partial and self.considered_count is None
                or top and self.top_m is None):
            raise ConfigurationException('scheme %r needs considered_count '
                                         'and top_m as applicable'
                                         % self.scheme)
        considered = int(self.considered_count) if partial else K
        if not 1 <= considered <= K or (partial and considered == K):
            raise ConfigurationException('partial rankings need 1 <= K_i < '
                                         '%d' % K)
        object.__setattr__(self, 'considered_count', considered)
        length = int(self.top_m) if top else considered
        if not 1 <= length <= considered or (top and length == considered):
            raise ConfigurationException('top-M rankings need 1 <= M < K_i')
        object.__setattr__(self, 'top_m', length)

    def to_json(self):
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except ValueError as e:
            raise ConfigurationException('spec is not valid JSON (%s)' % e)
        if not isinstance(doc, dict):
            raise ConfigurationException('spec must be a JSON object')
        try:
            return cls(**doc)
        except TypeError as e:
            raise ConfigurationException(str(e))


@dataclass(frozen=True)
class GroundTruth(object):
    """The latent structure behind a simulated dataset."""

    c: tuple
    D: tuple
    skills: tuple
    w: tuple

    def to_document(self):
        return {'c': list(self.c), 'D': [list(d) for d in self.D],
                'lambda': [list(lam) for lam in self.skills],
                'w': list(self.w)}

    def to_json(self):
        return json.dumps(self.to_document(), indent=1)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(tuple(doc['c']), tuple(tuple(d) for d in doc['D']),
                   tuple(tuple(lam) for lam in doc['lambda']),
                   tuple(doc['w']))

    @property
    def num_clusters(self):
        return len(set(self.c))


def load_spec(path):
    with open(path, 'r', encoding='utf-8') as f:
        return GenerativeSpec.from_json(f.read())


def save_truth(truth, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(truth.to_json())
        f.write('\n')


def _structure(spec, rng):
    """Ranker labels plus per-cluster entity labels and atoms."""
    if spec.assignments is not None:
        c = np.array(spec.assignments, dtype=np.intp)
    elif spec.cluster_weights is not None:
        c = rng.choice(len(spec.cluster_weights), size=spec.num_rankers,
                       p=spec.cluster_weights)
    else:
        c = crp_partition(spec.num_rankers, spec.alpha, rng)
    clusters = (len(spec.cluster_skills) if spec.cluster_skills is not None
                else int(c.max()) + 1)
    D = []
    Lambda = []
    for s in range(clusters):
        if spec.cluster_skills is not None:
            values = np.array(spec.cluster_skills[s])
            d, atoms = _first_appearance(np.unique(values,
                                                   return_inverse=True)[1])
            lam = np.unique(values)[atoms]
        else:
            d = crp_partition(spec.num_entities, spec.gamma, rng)
            lam = draw_skills(spec.a, int(d.max()) + 1, rng)
        D.append(d)
        Lambda.append(lam)
    return c, D, Lambda


def generate(spec, seed):
    """Draw a dataset from `spec`.

    Each ranker gets its own random stream, so ranker i's data does not
    depend on the number of rankers after it.

    :Returns: ``(Dataset, GroundTruth)``.
    """
    c, D, Lambda = _structure(spec, make_rng(seed, SIMULATE_STREAM))
    entities = np.arange(spec.num_entities)
    rankings = []
    w = []
    for i in range(spec.num_rankers):
        rng = make_rng(seed, SIMULATE_STREAM, i)
        w_i = int(rng.random() < spec.reliability[i])
        if spec.considered_count < spec.num_entities:
            considered = rng.choice(entities, size=spec.considered_count,
                                    replace=False)
        else:
            considered = entities
        skills = Lambda[c[i]][D[c[i]]]
        items = sample_ordering(considered, skills, w_i, spec.top_m, rng)
        rankings.append(Ranking(items, frozenset(considered.tolist())))
        w.append(w_i)
    data = Dataset(spec.num_entities, tuple(rankings), spec.reliability)
    truth = GroundTruth(tuple(int(s) for s in c),
                        tuple(tuple(int(x) for x in d) for d in D),
                        tuple(tuple(float(x) for x in lam) for lam in Lambda),
                        tuple(w))
    _logger.info('simulated %d rankers in %d clusters, %d informative',
                 spec.num_rankers, truth.num_clusters, sum(w))
    return data, truth


def redraw_rankings(state, data, rng):
    """Fresh rankings from the weighted Plackett-Luce laws of `state`, with
    the considered sets and lengths of `data`."""
    rankings = []
    for i, ranking in enumerate(data.rankings):
        considered = np.array(sorted(ranking.considered), dtype=np.intp)
        items = sample_ordering(considered, state.ranker_skills(i),
                                int(state.w[i]), ranking.length, rng)
        rankings.append(Ranking(items, ranking.considered))
    return Dataset(data.num_entities, tuple(rankings),
                   data.reliability_prior, data.entity_labels)


def two_cluster_spec(num_entities=9, rankers_per_cluster=20, reliability=0.75,
                     considered_count=None, top_m=None, num_rankers=None):
    """Two ranker clusters with reversed skill orders.

    Skills halve from 8 down the entities in the first cluster and run the
    other way in the second.  The clusters hold `rankers_per_cluster`
    rankers each unless `num_rankers` is given; an odd total then puts
    the extra ranker in the first cluster.  The first cluster's rankers
    come first.
    """
    if num_rankers is None:
        num_rankers = 2 * rankers_per_cluster
    first = (num_rankers + 1) // 2
    skills = tuple(8.0 * 0.5 ** j for j in range(num_entities))
    if considered_count is not None and considered_count < num_entities:
        scheme = RankingKind.PARTIAL
    else:
        scheme = RankingKind.COMPLETE
        considered_count = None
    if top_m is not None:
        scheme = (RankingKind.TOP_M_PARTIAL if scheme == RankingKind.PARTIAL
                  else RankingKind.TOP_M_COMPLETE)
    return GenerativeSpec(
        num_entities=num_entities,
        num_rankers=num_rankers,
        assignments=(0,) * first + (1,) * (num_rankers - first),
        cluster_skills=(skills, skills[::-1]),
        reliability=reliability,
        scheme=scheme.value,
        considered_count=considered_count,
        top_m=top_m)


def recovery_score(truth, trace):
    """How well a trace recovers a simulated structure.

    :Returns: `RecoveryScore` with the Rand index between the true ranker
        clustering and the one given by ``Delta_ij < 0.5``, the share of
        samples with the true number of ranker clusters, and the mean of
        ``|Pr(w_i = 1 | data) - w_i|``.
    :Raises DimensionMismatchException: if the trace has a different
        number of rankers.
    """
    n = len(truth.c)
    if trace.header.num_rankers != n or len(truth.w) != n:
        raise DimensionMismatchException('truth has %d rankers, trace %d'
                                         % (n, trace.header.num_rankers))
    together = ranker_dissimilarity(trace).entries < 0.5
    labels = np.array(truth.c)
    truly_together = labels[:, None] == labels[None, :]
    upper = np.triu_indices(n, k=1)
    if len(upper[0]):
        rand = float(np.mean(together[upper] == truly_together[upper]))
    else:
        rand = 1.0
    hits = np.mean([state.num_ranker_clusters == truth.num_clusters
                    for state in trace.states])
    error = np.mean(np.abs(reliability_probabilities(trace)
                           - np.array(truth.w, dtype=float)))
    return RecoveryScore(rand, float(hits), float(error))
