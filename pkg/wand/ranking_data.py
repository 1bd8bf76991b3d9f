"""Ranked data: the four ranking types, datasets and their JSON form.

A ranking lists the entities a ranker placed, best first, out of the set
of entities the ranker considered.  Considered entities that were not
placed are *unranked*: they are only known to come below every placed
entity.  Four kinds of ranking follow from the two sets:

=================  ==========================  ================
kind               considered                  unranked
=================  ==========================  ================
complete           every entity                empty
partial            a strict subset             empty
top-M complete     every entity                non-empty
top-M partial      a strict subset             non-empty
=================  ==========================  ================

Entity ids are dense integers ``0 .. K-1``; labels are for display only.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('Ranking', 'Dataset', 'RankingKind', 'parse_dataset',
           'serialize_dataset', 'load_dataset', 'save_dataset',
           'classify_ranking', 'UNRANKED', 'ABSENT', 'DEFAULT_RELIABILITY')
__docformat__ = 'restructuredtext'

import enum
import functools
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from wand.exceptions import DatasetValidationException
from wand.likelihood import ExposureLayout


_logger = logging.getLogger('wand.ranking_data')

UNRANKED = -1
"""Position code for a considered entity that was not placed."""

ABSENT = -2
"""Position code for an entity outside the considered set."""

DEFAULT_RELIABILITY = 0.5
"""Prior probability p_i that a ranker is informative, when unspecified."""


class RankingKind(enum.Enum):
    COMPLETE = 'complete'
    PARTIAL = 'partial'
    TOP_M_COMPLETE = 'top-m complete'
    TOP_M_PARTIAL = 'top-m partial'


@dataclass(frozen=True)
class Ranking(object):
    """One observed ranking.

    :Parameters:
        `items` : sequence of int
            The placed entities, best first.  Must be distinct.
        `considered` : iterable of int
            The entities the ranker looked at; must contain `items`.
    """

    items: tuple
    considered: frozenset
    unranked: tuple = field(init=False)
    items_array: np.ndarray = field(init=False, repr=False, compare=False)
    unranked_array: np.ndarray = field(init=False, repr=False,
                                       compare=False)

    def __post_init__(self):
        items = tuple(self.items)
        for item in items:
            if isinstance(item, (list, tuple)):
                raise DatasetValidationException('tied entities %r are not '
                                                 'supported' % (item,))
        items = tuple(int(item) for item in items)
        considered = frozenset(int(entity) for entity in self.considered)
        if not items:
            raise DatasetValidationException('ranking has no items')
        seen = set()
        for item in items:
            if item in seen:
                raise DatasetValidationException('entity %d appears twice '
                                                 'in items' % item)
            seen.add(item)
            if item not in considered:
                raise DatasetValidationException('entity %d is ranked but '
                                                 'not considered' % item)
        unranked = tuple(sorted(considered.difference(seen)))
        object.__setattr__(self, 'items', items)
        object.__setattr__(self, 'considered', considered)
        object.__setattr__(self, 'unranked', unranked)
        items_array = np.array(items, dtype=np.intp)
        items_array.flags.writeable = False
        unranked_array = np.array(unranked, dtype=np.intp)
        unranked_array.flags.writeable = False
        object.__setattr__(self, 'items_array', items_array)
        object.__setattr__(self, 'unranked_array', unranked_array)

    @property
    def length(self):
        """n_i, the number of placed entities."""
        return len(self.items)

    @property
    def considered_count(self):
        """K_i, the number of considered entities."""
        return len(self.considered)

    def positions(self, num_entities):
        """Return, for every entity id, its 0-based position, `UNRANKED`
        or `ABSENT`."""
        positions = np.full(num_entities, ABSENT, dtype=np.intp)
        if self.unranked:
            positions[self.unranked_array] = UNRANKED
        positions[self.items_array] = np.arange(len(self.items))
        return positions


def classify_ranking(ranking, num_entities):
    """Return the `RankingKind` of `ranking` in a universe of
    `num_entities` entities."""
    full = ranking.considered_count == num_entities
    if ranking.unranked:
        return (RankingKind.TOP_M_COMPLETE if full
                else RankingKind.TOP_M_PARTIAL)
    return RankingKind.COMPLETE if full else RankingKind.PARTIAL


@dataclass(frozen=True)
class Dataset(object):
    """Rankings of `num_entities` entities plus the per-ranker prior
    reliabilities p_i.  Immutable once built."""

    num_entities: int
    rankings: tuple
    reliability_prior: tuple
    entity_labels: tuple = None

    def __post_init__(self):
        if int(self.num_entities) < 1:
            raise DatasetValidationException('num_entities must be at '
                                             'least 1')
        object.__setattr__(self, 'num_entities', int(self.num_entities))
        object.__setattr__(self, 'rankings', tuple(self.rankings))
        prior = tuple(float(p) for p in self.reliability_prior)
        object.__setattr__(self, 'reliability_prior', prior)
        if not self.rankings:
            raise DatasetValidationException('dataset has no rankings')
        if len(prior) != len(self.rankings):
            raise DatasetValidationException(
                '%d reliabilities for %d rankings'
                % (len(prior), len(self.rankings)))
        for i, (ranking, p) in enumerate(zip(self.rankings, prior)):
            if not isinstance(ranking, Ranking):
                raise DatasetValidationException('not a Ranking: %r'
                                                 % (ranking,), ranker=i)
            out_of_range = [e for e in ranking.considered
                            if e < 0 or e >= self.num_entities]
            if out_of_range:
                raise DatasetValidationException(
                    'entity %d outside [0, %d)'
                    % (min(out_of_range), self.num_entities), ranker=i)
            if not 0.0 < p <= 1.0:
                raise DatasetValidationException('reliability prior %r '
                                                 'outside (0, 1]' % p,
                                                 ranker=i)
        if self.entity_labels is not None:
            labels = tuple(str(label) for label in self.entity_labels)
            if len(labels) != self.num_entities:
                raise DatasetValidationException(
                    '%d entity labels for %d entities'
                    % (len(labels), self.num_entities))
            object.__setattr__(self, 'entity_labels', labels)

    @property
    def num_rankers(self):
        return len(self.rankings)

    @property
    def reliability_array(self):
        return np.array(self.reliability_prior, dtype=float)

    @functools.cached_property
    def exposure_layout(self):
        """`wand.likelihood.ExposureLayout` of the rankings, built once."""
        return ExposureLayout(self.rankings, self.num_entities)

    def label(self, entity):
        """Display name of `entity`; its id when there are no labels."""
        if self.entity_labels is None:
            return str(entity)
        return self.entity_labels[entity]

    def kinds(self):
        return [classify_ranking(r, self.num_entities) for r in self.rankings]


def _require(condition, msg, ranker=None):
    if not condition:
        raise DatasetValidationException(msg, ranker=ranker)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _dataset_from_document(doc):
    _require(isinstance(doc, dict), 'document must be a JSON object')
    num_entities = doc.get('num_entities')
    _require(_is_int(num_entities) and num_entities >= 1,
             '"num_entities" must be a positive integer')
    records = doc.get('rankings')
    _require(isinstance(records, list) and records,
             '"rankings" must be a non-empty list')
    full = range(num_entities)
    rankings = []
    prior = []
    for i, record in enumerate(records):
        _require(isinstance(record, dict), 'ranking must be an object', i)
        items = record.get('items')
        _require(isinstance(items, list), '"items" must be a list', i)
        for item in items:
            if isinstance(item, list):
                raise DatasetValidationException(
                    'tied entities %r are not supported' % (item,), ranker=i)
            _require(_is_int(item), 'entity ids must be integers', i)
            _require(0 <= item < num_entities,
                     'entity %d outside [0, %d)' % (item, num_entities), i)
        considered = record.get('considered')
        if considered is None:
            considered = full
        else:
            _require(isinstance(considered, list),
                     '"considered" must be a list', i)
            for entity in considered:
                _require(_is_int(entity), 'entity ids must be integers', i)
                _require(0 <= entity < num_entities,
                         'entity %d outside [0, %d)'
                         % (entity, num_entities), i)
        try:
            rankings.append(Ranking(items, frozenset(considered)))
        except DatasetValidationException as e:
            raise DatasetValidationException(e.detail, ranker=i)
        p = record.get('p', DEFAULT_RELIABILITY)
        _require(isinstance(p, (int, float)) and not isinstance(p, bool)
                 and 0.0 < p <= 1.0,
                 'reliability prior %r outside (0, 1]' % (p,), i)
        prior.append(float(p))
    labels = doc.get('entity_labels')
    if labels is not None:
        _require(isinstance(labels, list)
                 and all(isinstance(label, str) for label in labels),
                 '"entity_labels" must be a list of strings')
    return Dataset(num_entities, tuple(rankings), tuple(prior),
                   None if labels is None else tuple(labels))


def parse_dataset(source):
    """Parse a dataset document.

    :Parameters:
        `source` : bytes, str or binary file object
            UTF-8 JSON of the form ``{"num_entities": K, "entity_labels":
            [...]?, "rankings": [{"items": [...], "considered": [...]?,
            "p": p?}]}``.
    :Returns: a validated `Dataset`.  A missing ``considered`` means every
        entity; a missing ``p`` means `DEFAULT_RELIABILITY`.
    :Raises DatasetValidationException: carrying the offending ranker
        index where there is one.
    """
    if hasattr(source, 'read'):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode('utf-8')
    try:
        doc = json.loads(source)
    except ValueError as e:
        raise DatasetValidationException('not valid JSON (%s)' % e)
    dataset = _dataset_from_document(doc)
    _logger.debug('parsed %d rankings of %d entities',
                  dataset.num_rankers, dataset.num_entities)
    return dataset


def dataset_to_document(dataset):
    records = []
    for ranking, p in zip(dataset.rankings, dataset.reliability_prior):
        record = {'items': list(ranking.items)}
        if ranking.considered_count != dataset.num_entities:
            record['considered'] = sorted(ranking.considered)
        record['p'] = p
        records.append(record)
    doc = {'num_entities': dataset.num_entities}
    if dataset.entity_labels is not None:
        doc['entity_labels'] = list(dataset.entity_labels)
    doc['rankings'] = records
    return doc


def serialize_dataset(dataset):
    """Return the JSON text of `dataset`; `parse_dataset` inverts it."""
    return json.dumps(dataset_to_document(dataset), indent=1)


def load_dataset(path):
    with open(path, 'rb') as f:
        return parse_dataset(f)


def save_dataset(dataset, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(serialize_dataset(dataset))
        f.write('\n')
