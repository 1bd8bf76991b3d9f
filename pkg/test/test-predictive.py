#!/usr/bin/env python

"""Tests for the posterior predictive checks."""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

import csv
import itertools
import os
import shutil
import tempfile
import unittest

import wand_testing

import numpy as np

from wand.exceptions import (
    ConfigurationException, EnumerationCapException, TraceFormatException)
from wand.predictive import (
    APPROXIMATE, FULL, TRUNCATED, choose_method, diagnostic_probabilities,
    full_predictive, monte_carlo_predictive)
from wand.ranking_data import Ranking


def _one_cluster(skills, w=1, rankers=2):
    K = len(skills)
    return wand_testing.state([0] * rankers, [list(range(K))], [skills],
                              w=[w] * rankers)


def _naive(ordering, skills):
    remaining = list(range(len(skills)))
    prob = 1.0
    for entity in ordering:
        prob *= skills[entity] / sum(skills[j] for j in remaining)
        remaining.remove(entity)
    return prob


class TestFull(unittest.TestCase):

    def setUp(self):
        self.data = wand_testing.dataset([(0, 1, 2), (2, 0, 1)], 3)

    def test_single_sample_is_plackett_luce(self):
        skills = [1.0, 2.0, 3.0]
        trace = wand_testing.trace([_one_cluster(skills)], 3)
        dist = full_predictive(trace, self.data, 0)
        self.assertEqual(dist.support_size, 6)
        self.assertAlmostEqual(dist.probabilities.sum(), 1.0, delta=1e-9)
        for ordering, prob in zip(dist.orderings, dist.probabilities):
            self.assertAlmostEqual(prob, _naive(ordering, skills),
                                   delta=1e-12)
        self.assertEqual(tuple(dist.orderings[dist.observed_index]),
                         (0, 1, 2))

    def test_average_over_samples(self):
        samples = [[1.0, 2.0, 3.0], [4.0, 0.5, 0.5], [1.0, 1.0, 8.0]]
        weights = [1, 1, 0]
        states = [_one_cluster(s, w) for s, w in zip(samples, weights)]
        dist = full_predictive(wand_testing.trace(states, 3), self.data, 1)
        for ordering in itertools.permutations(range(3)):
            expected = np.mean([_naive(ordering, s) if w else 1 / 6.
                                for s, w in zip(samples, weights)])
            self.assertAlmostEqual(dist.probability_of(ordering), expected,
                                   delta=1e-12)

    def test_uninformative_is_uniform(self):
        trace = wand_testing.trace([_one_cluster([1.0, 5.0, 9.0], w=0)] * 2,
                                   3)
        dist = full_predictive(trace, self.data, 0)
        np.testing.assert_allclose(dist.probabilities, 1 / 6.)
        self.assertEqual(dist.diagnostic(), 1.0)

    def test_unique_mode(self):
        trace = wand_testing.trace([_one_cluster([100.0, 10.0, 1.0])], 3)
        self.assertEqual(full_predictive(trace, self.data, 0).diagnostic(),
                         1.0)
        # only (2, 1, 0) and (1, 2, 0) are less likely than (2, 0, 1)
        self.assertEqual(full_predictive(trace, self.data, 1).diagnostic(),
                         0.5)

    def test_cap(self):
        data = wand_testing.dataset([tuple(range(9))], 9)
        trace = wand_testing.trace([_one_cluster([1.0] * 9, rankers=1)], 9)
        try:
            full_predictive(trace, data, 0, cap=1000)
        except EnumerationCapException as e:
            self.assertEqual(e.count, 362880)
            self.assertEqual(e.get_ranker(), 0)
        else:
            self.fail('cap was not enforced')

    def test_mismatched_trace(self):
        trace = wand_testing.trace([_one_cluster([1.0] * 4)], 4)
        self.assertRaises(TraceFormatException, full_predictive, trace,
                          self.data, 0)


class TestMonteCarlo(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(30)
        self.data = wand_testing.dataset([(0, 1, 2), (1, 0, 2)], 3)
        self.trace = wand_testing.trace(
            [_one_cluster(rng.gamma(2.0, 1.0, size=3) + 0.5)
             for _ in range(20)], 3)

    def test_converges_to_full(self):
        full = full_predictive(self.trace, self.data, 0)
        for mode in (TRUNCATED, APPROXIMATE):
            dist = monte_carlo_predictive(self.trace, self.data, 0, 50, mode,
                                          seed=1)
            variation = 0.5 * sum(abs(dist.probability_of(o) - p)
                                  for o, p in zip(full.orderings,
                                                  full.probabilities))
            self.assertLess(variation, 0.01)

    def test_full_support_modes_coincide(self):
        truncated = monte_carlo_predictive(self.trace, self.data, 1, 50,
                                           TRUNCATED, seed=2)
        approximate = monte_carlo_predictive(self.trace, self.data, 1, 50,
                                             APPROXIMATE, seed=2)
        self.assertEqual(truncated.support_size, 6)
        np.testing.assert_array_equal(truncated.orderings,
                                      approximate.orderings)
        np.testing.assert_array_equal(truncated.probabilities,
                                      approximate.probabilities)
        self.assertEqual(truncated.diagnostic(), approximate.diagnostic())

    def test_partial_support(self):
        data = wand_testing.dataset([tuple(range(6))], 6)
        trace = wand_testing.trace(
            [_one_cluster([1.0, 2.0, 3.0, 4.0, 5.0, 6.0], rankers=1)] * 3, 6)
        truncated = monte_carlo_predictive(trace, data, 0, 1, TRUNCATED, 3)
        self.assertLessEqual(truncated.support_size, 4)
        self.assertEqual(tuple(truncated.orderings[0]), tuple(range(6)))
        self.assertAlmostEqual(truncated.probabilities.sum(), 1.0,
                               delta=1e-12)
        approximate = monte_carlo_predictive(trace, data, 0, 1, APPROXIMATE,
                                             3)
        self.assertGreater(approximate.residual, 0.0)
        self.assertAlmostEqual(approximate.probabilities.sum()
                               + approximate.residual, 1.0, delta=1e-12)
        self.assertEqual(approximate.total_orderings, 720)
        self.assertTrue(0.0 < approximate.diagnostic() <= 1.0)

    def test_deterministic(self):
        first = monte_carlo_predictive(self.trace, self.data, 0, 2,
                                       TRUNCATED, seed=7)
        second = monte_carlo_predictive(self.trace, self.data, 0, 2,
                                        TRUNCATED, seed=7)
        np.testing.assert_array_equal(first.orderings, second.orderings)
        np.testing.assert_array_equal(first.probabilities,
                                      second.probabilities)

    def test_bad_arguments(self):
        self.assertRaises(ConfigurationException, monte_carlo_predictive,
                          self.trace, self.data, 0, 0)
        self.assertRaises(ConfigurationException, monte_carlo_predictive,
                          self.trace, self.data, 0, 1, FULL)


class TestReport(unittest.TestCase):

    def setUp(self):
        self.dir = tempfile.mkdtemp()
        self.data = wand_testing.dataset([(0, 1, 2), (2, 1, 0), (1, 2, 0)],
                                         3)
        self.trace = wand_testing.trace(
            [_one_cluster([3.0, 2.0, 1.0], rankers=3),
             _one_cluster([1.0, 1.5, 2.0], rankers=3)], 3)

    def tearDown(self):
        shutil.rmtree(self.dir)

    def test_method_choice(self):
        self.assertEqual(choose_method(Ranking(tuple(range(9)),
                                               frozenset(range(9))),
                                       'auto', 4 * 10 ** 5), FULL)
        top8 = Ranking(tuple(range(8)), frozenset(range(30)))
        self.assertEqual(choose_method(top8, 'auto', 10 ** 5), TRUNCATED)
        self.assertRaises(ConfigurationException, choose_method, top8,
                          'exact', 10)

    def test_workers_do_not_change_results(self):
        one = diagnostic_probabilities(self.trace, self.data, 'truncated',
                                       seed=4, workers=1)
        three = diagnostic_probabilities(self.trace, self.data, 'truncated',
                                         seed=4, workers=3)
        self.assertEqual(list(one), list(three))

    def test_full_report(self):
        report = diagnostic_probabilities(self.trace, self.data, workers=2)
        self.assertEqual(len(report), 3)
        self.assertEqual([check.method for check in report], [FULL] * 3)
        self.assertEqual([check.support_size for check in report], [6] * 3)
        self.assertEqual(report[0].diagnostic_prob, 1.0)
        path = os.path.join(self.dir, 'ppc.csv')
        report.write_csv(path)
        with open(path, newline='') as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ['ranker', 'method', 'support_size',
                                   'observed_prob', 'diagnostic_prob'])
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[1][:3], ['0', 'full', '6'])


if __name__ == '__main__':
    unittest.main()
