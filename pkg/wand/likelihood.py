"""Plackett-Luce likelihoods for every ranking type, with and without
reliability weights, and the latent-variable complete-data likelihood.

All arithmetic is in log space.  Denominators are suffix sums over the
ranked entities plus the total skill of the unranked considered entities.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('SkillAssignment', 'pl_log_prob', 'weighted_pl_log_prob',
           'uniform_log_prob', 'complete_data_log_lik',
           'exposure_statistics', 'ExposureLayout', 'log_f_from_exposures',
           'log_f_table', 'sample_latents', 'ordering_count',
           'ordering_log_probs', 'sample_ordering', 'SKILL_FLOOR')
__docformat__ = 'restructuredtext'

import math
from collections.abc import Mapping

import numpy as np

from wand.exceptions import (
    InvalidLatentException, InvalidSkillException, MissingSkillException)


SKILL_FLOOR = 1e-300
"""Skills are clipped to this before logs are taken, so an underflowed
gamma draw cannot produce -inf."""


class SkillAssignment(object):
    """Map from entity id to a positive skill for one ranker's cluster.

    Built from a mapping ``{entity: skill}`` or from a vector indexed by
    entity id.  Entities without a skill are held as NaN and reported by
    `require`.
    """

    __slots__ = ('_values',)

    def __init__(self, values, num_entities=None):
        if isinstance(values, Mapping):
            size = num_entities
            if size is None:
                size = max(values) + 1 if values else 0
            array = np.full(size, np.nan)
            for entity, skill in values.items():
                array[int(entity)] = float(skill)
        else:
            array = np.array(values, dtype=float)
            if array.ndim != 1:
                raise InvalidSkillException('skills must be a vector')
        known = array[~np.isnan(array)]
        if np.any(known <= 0.0) or not np.all(np.isfinite(known)):
            raise InvalidSkillException('skills must be positive and '
                                        'finite')
        array.flags.writeable = False
        self._values = array

    @property
    def values(self):
        return self._values

    def __len__(self):
        return len(self._values)

    def __getitem__(self, entity):
        if not 0 <= entity < len(self._values):
            raise MissingSkillException(entity)
        value = self._values[entity]
        if np.isnan(value):
            raise MissingSkillException(entity)
        return float(value)

    def scaled(self, factor):
        return SkillAssignment(self._values * factor)

    def require(self, entities):
        """Raise `MissingSkillException` unless every entity has a skill."""
        for entity in sorted(entities):
            if (not 0 <= entity < len(self._values)
                    or np.isnan(self._values[entity])):
                raise MissingSkillException(entity)

    def __repr__(self):
        return 'SkillAssignment(%r)' % (self._values.tolist(),)


def _checked_skills(ranking, skills):
    if not isinstance(skills, SkillAssignment):
        skills = SkillAssignment(skills)
    skills.require(ranking.considered)
    return skills.values


def _check_weight(w):
    if w not in (0, 1):
        raise InvalidLatentException('reliability weight must be 0 or 1, '
                                     'not %r' % (w,))
    return int(w)


def _denominators(ranking, lam):
    """S_j for j = 1 .. n_i given the (already exponentiated) skills."""
    ranked = lam[ranking.items_array]
    tail = np.cumsum(ranked[::-1])[::-1]
    if ranking.unranked:
        tail = tail + lam[ranking.unranked_array].sum()
    return ranked, tail


def pl_log_prob(ranking, skills):
    """Log-probability of `ranking` under the Plackett-Luce model.

    Top-M rankings include the unranked considered entities in every
    denominator, so the result is the probability of the observed prefix.
    Invariant to a common rescaling of `skills`.
    """
    lam = np.maximum(_checked_skills(ranking, skills), SKILL_FLOOR)
    ranked, tail = _denominators(ranking, lam)
    return float(np.sum(np.log(ranked) - np.log(tail)))


def ordering_count(considered_count, length):
    """Number of ordered `length`-tuples of `considered_count` entities,
    K_i!/(K_i-n_i)!, as an exact integer."""
    return math.perm(considered_count, length)


def uniform_log_prob(ranking):
    """log((K_i-n_i)!/K_i!): the probability of any one ordering under the
    uninformative (w=0) law."""
    return -math.log(ordering_count(ranking.considered_count, ranking.length))


def weighted_pl_log_prob(ranking, skills, w):
    """Log-probability under the weighted Plackett-Luce model.

    With ``w == 1`` this is `pl_log_prob`; with ``w == 0`` every ordering
    of the considered entities is equally likely and the value does not
    depend on `skills`.
    """
    if _check_weight(w) == 0:
        _checked_skills(ranking, skills)
        return uniform_log_prob(ranking)
    return pl_log_prob(ranking, skills)


def _checked_latents(ranking, z):
    z = np.asarray(z, dtype=float)
    if z.shape != (ranking.length,):
        raise InvalidLatentException('expected %d latents, got shape %r'
                                     % (ranking.length, z.shape))
    if np.any(z <= 0.0) or not np.all(np.isfinite(z)):
        raise InvalidLatentException('latents must be positive and finite')
    return z


def complete_data_log_lik(ranking, z, skills, w):
    """Log-density of (ranking, z) given the skills and the weight.

    ``sum_j [w log lam_j - S_j(w) z_j]`` where ``S_j(w)`` sums ``lam**w``
    over the entities ranked at j or below and the unranked ones.  With
    ``w == 0``, ``S_j = K_i - j + 1``.  Integrating out z gives
    `weighted_pl_log_prob`.
    """
    w = _check_weight(w)
    z = _checked_latents(ranking, z)
    lam = np.maximum(_checked_skills(ranking, skills), SKILL_FLOOR)
    if w == 0:
        lam = np.ones_like(lam)
    ranked, tail = _denominators(ranking, lam)
    return float(w * np.sum(np.log(ranked)) - np.dot(tail, z))


def exposure_statistics(ranking, z, num_entities):
    """Per-entity sufficient statistics of one ranking given its latents.

    :Returns: ``(a, b)``, two vectors over all entities.  ``a[l]`` is 1
        when l is ranked and 0 otherwise; ``b[l]`` is the sum of the
        latents z_j over the positions j whose denominator contains l
        (positions 1 .. pos(l) for a ranked entity, every position for an
        unranked one).
    """
    cumulative = np.cumsum(z)
    a = np.zeros(num_entities)
    b = np.zeros(num_entities)
    a[ranking.items_array] = 1.0
    b[ranking.items_array] = cumulative
    if ranking.unranked:
        b[ranking.unranked_array] = cumulative[-1]
    return a, b


class ExposureLayout(object):
    """Padded position tables of a whole dataset.

    Row i describes ranking i over ``width`` = the longest ranking.  With
    them the exposures and latents of every ranker come out of a handful
    of array operations instead of a loop over rankers.
    """

    def __init__(self, rankings, num_entities):
        lengths = np.array([r.length for r in rankings], dtype=np.intp)
        n, width = len(lengths), int(lengths.max()) if len(lengths) else 0
        self.num_entities = num_entities
        self.lengths = lengths
        self.valid = np.arange(width) < lengths[:, None]
        self.items = np.zeros((n, width), dtype=np.intp)
        self.ranked = np.zeros((n, num_entities))
        self.unranked = np.zeros((n, num_entities), dtype=bool)
        self.slot = np.zeros((n, num_entities), dtype=np.intp)
        self.considered_counts = np.array([r.considered_count
                                           for r in rankings], dtype=float)
        for i, ranking in enumerate(rankings):
            self.items[i, :ranking.length] = ranking.items_array
            self.ranked[i, ranking.items_array] = 1.0
            self.slot[i, ranking.items_array] = np.arange(ranking.length)
            if ranking.unranked:
                self.unranked[i, ranking.unranked_array] = True
                self.slot[i, ranking.unranked_array] = ranking.length - 1
        self.considered = (self.ranked > 0) | self.unranked
        self.ranked.flags.writeable = False
        self._splits = np.cumsum(lengths)[:-1]

    def exposures(self, Z):
        """`exposure_statistics` of every ranker as two (n, K) matrices.
        The first is shared and read-only."""
        padded = np.zeros(self.valid.shape)
        padded[self.valid] = np.concatenate(Z)
        cumulative = np.cumsum(padded, axis=1)
        b = np.take_along_axis(cumulative, self.slot, axis=1)
        return self.ranked, np.where(self.considered, b, 0.0)

    def sample_latents(self, skills, w, rng):
        """`sample_latents` for every ranker at once.

        :Parameters:
            `skills` : (n, K) matrix, row i the skills ranker i sees
            `w` : vector of 0/1 weights
        :Returns: list of latent vectors, one per ranker.
        """
        lam = np.maximum(np.asarray(skills, dtype=float), SKILL_FLOOR)
        ranked = np.take_along_axis(lam, self.items, axis=1) * self.valid
        tail = np.cumsum(ranked[:, ::-1], axis=1)[:, ::-1]
        tail += np.where(self.unranked, lam, 0.0).sum(axis=1)[:, None]
        uniform = (self.considered_counts[:, None]
                   - np.arange(self.valid.shape[1]))
        tail = np.where(np.asarray(w)[:, None] == 1, tail, uniform)
        z = rng.exponential(1.0 / tail[self.valid])
        return np.split(z, self._splits)


def log_f_table(A, B, skills, w):
    """`log_f_from_exposures` of many rankers against candidate skill rows.

    :Parameters:
        `A`, `B` : (n, K) exposure matrices
        `skills` : (T, K) rows shared by every ranker, or (n, T, K), one
            set of rows per ranker
        `w` : vector of the n weights
    :Returns: an (n, T) matrix.
    """
    lam = np.maximum(skills, SKILL_FLOOR)
    subscripts = 'ik,tk->it' if lam.ndim == 2 else 'ik,itk->it'
    values = (np.einsum(subscripts, A, np.log(lam))
              - np.einsum(subscripts, B, lam))
    return np.where(np.asarray(w)[:, None] == 1, values,
                    -np.sum(B, axis=1)[:, None])


def log_f_from_exposures(a, b, skills, w):
    """``complete_data_log_lik`` written through `exposure_statistics`.

    `skills` may be a vector over entities or a matrix whose rows are
    candidate skill vectors; the result then has one entry per row.
    """
    skills = np.asarray(skills, dtype=float)
    values = log_f_table(np.atleast_2d(a), np.atleast_2d(b),
                         np.atleast_2d(skills), [w])[0]
    return values if skills.ndim > 1 else values[0]


def sample_latents(ranking, skills, w, rng):
    """Draw z_j ~ Exp(rate S_j(w)) for every position of `ranking`."""
    if w:
        lam = np.maximum(np.asarray(skills, dtype=float), SKILL_FLOOR)
        _, tail = _denominators(ranking, lam)
    else:
        tail = (ranking.considered_count
                - np.arange(ranking.length, dtype=float))
    return rng.exponential(1.0 / tail)


def ordering_log_probs(orderings, considered, skills, w):
    """Weighted Plackett-Luce log-probabilities of many orderings drawn
    from the same considered set.

    :Parameters:
        `orderings` : int array, shape (T, n_i)
        `considered` : int array of the considered entities
        `skills` : vector over entities
        `w` : 0 or 1
    """
    orderings = np.asarray(orderings, dtype=np.intp)
    if w == 0:
        count = ordering_count(len(considered), orderings.shape[1])
        return np.full(orderings.shape[0], -math.log(count))
    lam = np.maximum(np.asarray(skills, dtype=float), SKILL_FLOOR)
    total = lam[np.asarray(considered, dtype=np.intp)].sum()
    ranked = lam[orderings]
    before = np.cumsum(ranked, axis=1) - ranked
    return np.sum(np.log(ranked) - np.log(total - before), axis=1)


def sample_ordering(considered, skills, w, length, rng):
    """Draw an ordering of `length` entities from `considered`.

    Entities are picked one at a time without replacement, each with
    probability proportional to its skill (w=1) or uniformly (w=0).
    """
    remaining = np.array(sorted(considered), dtype=np.intp)
    if w:
        weights = np.maximum(np.asarray(skills, dtype=float)[remaining],
                             SKILL_FLOOR)
    else:
        weights = np.ones(len(remaining))
    chosen = []
    for _ in range(length):
        k = rng.choice(len(remaining), p=weights / weights.sum())
        chosen.append(int(remaining[k]))
        remaining = np.delete(remaining, k)
        weights = np.delete(weights, k)
    return tuple(chosen)
