#!/usr/bin/env python

"""Tests for parsing, validating and serialising ranked data."""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

import io
import json
import os
import tempfile
import unittest

import wand_testing

from wand.exceptions import DatasetValidationException
from wand.ranking_data import (
    ABSENT, DEFAULT_RELIABILITY, UNRANKED, Dataset, Ranking, RankingKind,
    classify_ranking, load_dataset, parse_dataset, save_dataset,
    serialize_dataset)


class TestRanking(unittest.TestCase):

    def test_unranked_are_considered_minus_items(self):
        r = Ranking((3, 1), frozenset([0, 1, 2, 3]))
        self.assertEqual(r.unranked, (0, 2))
        self.assertEqual(r.length, 2)
        self.assertEqual(r.considered_count, 4)

    def test_positions(self):
        r = Ranking((2, 0), frozenset([0, 1, 2]))
        self.assertEqual(r.positions(4).tolist(), [1, UNRANKED, 0, ABSENT])

    def test_rejects_duplicates(self):
        self.assertRaises(DatasetValidationException,
                          Ranking, (1, 1), frozenset([0, 1]))

    def test_rejects_item_outside_considered(self):
        self.assertRaises(DatasetValidationException,
                          Ranking, (0, 2), frozenset([0, 1]))

    def test_rejects_empty(self):
        self.assertRaises(DatasetValidationException,
                          Ranking, (), frozenset([0, 1]))

    def test_rejects_ties(self):
        self.assertRaises(DatasetValidationException,
                          Ranking, ((0, 1), 2), frozenset([0, 1, 2]))

    def test_classification(self):
        K = 4
        cases = [
            (Ranking((0, 1, 2, 3), frozenset(range(4))), RankingKind.COMPLETE),
            (Ranking((2, 0), frozenset([0, 2])), RankingKind.PARTIAL),
            (Ranking((3,), frozenset(range(4))), RankingKind.TOP_M_COMPLETE),
            (Ranking((0,), frozenset([0, 1, 2])), RankingKind.TOP_M_PARTIAL),
        ]
        for ranking, kind in cases:
            self.assertEqual(classify_ranking(ranking, K), kind)


class TestParse(unittest.TestCase):

    def test_defaults(self):
        data = parse_dataset('{"num_entities": 3, '
                             '"rankings": [{"items": [2, 0, 1]}]}')
        self.assertEqual(data.num_entities, 3)
        self.assertEqual(data.num_rankers, 1)
        self.assertEqual(data.rankings[0].considered, frozenset([0, 1, 2]))
        self.assertEqual(data.reliability_prior, (DEFAULT_RELIABILITY,))
        self.assertEqual(data.kinds(), [RankingKind.COMPLETE])
        self.assertEqual(data.label(2), '2')

    def test_bytes_and_file_objects(self):
        text = b'{"num_entities": 2, "rankings": [{"items": [1], "p": 0.9}]}'
        self.assertEqual(parse_dataset(text), parse_dataset(io.BytesIO(text)))

    def test_labels(self):
        data = parse_dataset('{"num_entities": 2, "entity_labels": ["x", "y"],'
                             ' "rankings": [{"items": [1, 0]}]}')
        self.assertEqual(data.label(1), 'y')

    def assertInvalid(self, text, ranker=None):
        try:
            parse_dataset(text)
        except DatasetValidationException as e:
            self.assertEqual(e.get_ranker(), ranker)
            return e
        self.fail('%s was accepted' % text)

    def test_errors_carry_ranker_index(self):
        e = self.assertInvalid('{"num_entities": 3, "rankings": ['
                               '{"items": [0, 1]}, {"items": [2, 2]}]}', 1)
        self.assertTrue(str(e).startswith('ranker 1: '))
        self.assertInvalid('{"num_entities": 3, "rankings": ['
                           '{"items": [0, 3]}]}', 0)
        self.assertInvalid('{"num_entities": 3, "rankings": ['
                           '{"items": [0], "considered": [1, 2]}]}', 0)
        self.assertInvalid('{"num_entities": 3, "rankings": ['
                           '{"items": [0], "p": 0}]}', 0)
        self.assertInvalid('{"num_entities": 3, "rankings": ['
                           '{"items": [0], "p": 1.5}]}', 0)
        self.assertInvalid('{"num_entities": 3, "rankings": ['
                           '{"items": []}]}', 0)
        self.assertInvalid('{"num_entities": 3, "rankings": ['
                           '{"items": [[0, 1], 2]}]}', 0)

    def test_document_errors(self):
        self.assertInvalid('not json')
        self.assertInvalid('[]')
        self.assertInvalid('{"num_entities": 0, "rankings": [{"items": [0]}]}')
        self.assertInvalid('{"num_entities": 2, "rankings": []}')

    def test_p_of_one_is_accepted(self):
        data = parse_dataset('{"num_entities": 2, '
                             '"rankings": [{"items": [0], "p": 1}]}')
        self.assertEqual(data.reliability_prior, (1.0,))


class TestDataset(unittest.TestCase):

    def test_rejects_out_of_range_entity(self):
        r = Ranking((0, 5), frozenset([0, 5]))
        self.assertRaises(DatasetValidationException,
                          Dataset, 3, (r,), (0.5,))

    def test_rejects_length_mismatch(self):
        r = Ranking((0,), frozenset([0, 1]))
        self.assertRaises(DatasetValidationException,
                          Dataset, 2, (r, r), (0.5,))

    def test_serialize_parses_back(self):
        data = Dataset(5, (Ranking((4, 0, 2), frozenset(range(5))),
                           Ranking((1, 3), frozenset([1, 2, 3])),
                           Ranking((2,), frozenset([0, 2, 4]))),
                       (0.75, 0.5, 1.0), ('a', 'b', 'c', 'd', 'e'))
        text = serialize_dataset(data)
        records = json.loads(text)['rankings']
        self.assertNotIn('considered', records[0])
        self.assertEqual(records[1]['considered'], [1, 2, 3])
        self.assertEqual(parse_dataset(text), data)

    def test_save_and_load(self):
        data = wand_testing.dataset([(0, 1, 2), (2, 1, 0)], 3)
        fd, path = tempfile.mkstemp(suffix='.json')
        os.close(fd)
        try:
            save_dataset(data, path)
            self.assertEqual(load_dataset(path), data)
        finally:
            os.remove(path)


if __name__ == '__main__':
    unittest.main()
