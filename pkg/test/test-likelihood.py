#!/usr/bin/env python

"""Tests for the Plackett-Luce likelihoods and the latent-variable form."""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

import itertools
import math
import unittest
from collections import Counter

import wand_testing

import numpy as np

from wand.exceptions import (
    InvalidLatentException, InvalidSkillException, MissingSkillException)
from wand.likelihood import (
    ExposureLayout, SkillAssignment, complete_data_log_lik,
    exposure_statistics, log_f_from_exposures, ordering_count,
    ordering_log_probs, pl_log_prob, sample_latents, sample_ordering,
    uniform_log_prob, weighted_pl_log_prob)
from wand.ranking_data import Ranking


def _tails(ranking, skills, w):
    lam = np.asarray(skills, dtype=float) ** w
    return [lam[list(ranking.items[j:])].sum() + lam[list(ranking.unranked)]
            .sum() for j in range(ranking.length)]


class TestPlackettLuce(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(20260101)

    def test_known_value(self):
        r = Ranking((2, 1, 0), frozenset(range(3)))
        self.assertAlmostEqual(math.exp(pl_log_prob(r, [1.0, 2.0, 3.0])),
                               3.0 / 6.0 * 2.0 / 3.0, places=14)

    def test_complete_rankings_normalise(self):
        for K in (2, 3, 4, 5):
            skills = self.rng.gamma(1.0, 1.0, size=K) + 1e-3
            total = sum(math.exp(pl_log_prob(Ranking(p, frozenset(range(K))),
                                             skills))
                        for p in itertools.permutations(range(K)))
            self.assertAlmostEqual(total, 1.0, delta=1e-12)

    def test_top_m_rankings_normalise(self):
        K = 7
        for considered_count in (3, 5, 6):
            considered = sorted(self.rng.choice(K, considered_count,
                                                replace=False).tolist())
            skills = self.rng.gamma(2.0, 1.0, size=K)
            for M in range(1, considered_count):
                total = sum(
                    math.exp(pl_log_prob(Ranking(p, frozenset(considered)),
                                         skills))
                    for p in itertools.permutations(considered, M))
                self.assertAlmostEqual(total, 1.0, delta=1e-12)

    def test_scale_invariance(self):
        r = Ranking((3, 0), frozenset([0, 1, 3, 4]))
        skills = self.rng.gamma(1.0, 1.0, size=5)
        self.assertAlmostEqual(pl_log_prob(r, skills),
                               pl_log_prob(r, skills * 7.5), delta=1e-12)

    def test_skill_assignment_mapping(self):
        r = Ranking((1, 0), frozenset([0, 1]))
        self.assertAlmostEqual(pl_log_prob(r, SkillAssignment({0: 1.0,
                                                                1: 3.0})),
                               math.log(0.75), places=14)

    def test_missing_skill(self):
        r = Ranking((0, 1), frozenset([0, 1, 2]))
        skills = SkillAssignment({0: 1.0, 1: 2.0}, num_entities=3)
        try:
            pl_log_prob(r, skills)
        except MissingSkillException as e:
            self.assertEqual(e.entity, 2)
        else:
            self.fail('missing skill was not reported')

    def test_negative_entity_has_no_skill(self):
        skills = SkillAssignment([1.0, 2.0, 3.0])
        self.assertEqual(skills[2], 3.0)
        for entity in (-1, -3, 3):
            try:
                skills[entity]
            except MissingSkillException as e:
                self.assertEqual(e.entity, entity)
            else:
                self.fail('entity %d was given a skill' % entity)
        self.assertRaises(MissingSkillException, skills.require, [0, -1])

    def test_skills_outside_considered_are_not_needed(self):
        r = Ranking((0,), frozenset([0, 1]))
        skills = SkillAssignment({0: 1.0, 1: 1.0}, num_entities=4)
        self.assertAlmostEqual(pl_log_prob(r, skills), math.log(0.5))

    def test_invalid_skills(self):
        self.assertRaises(InvalidSkillException, SkillAssignment,
                          [1.0, -2.0])
        self.assertRaises(InvalidSkillException, SkillAssignment,
                          [1.0, 0.0])
        self.assertRaises(InvalidSkillException, SkillAssignment,
                          [1.0, np.inf])


class TestWeighted(unittest.TestCase):

    def test_informative_is_plackett_luce(self):
        r = Ranking((1, 2, 0), frozenset(range(3)))
        skills = [0.5, 4.0, 2.0]
        self.assertEqual(weighted_pl_log_prob(r, skills, 1),
                         pl_log_prob(r, skills))

    def test_uninformative_is_uniform(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            K = int(rng.integers(2, 9))
            considered_count = int(rng.integers(1, K + 1))
            length = int(rng.integers(1, considered_count + 1))
            considered = rng.choice(K, considered_count, replace=False)
            items = tuple(rng.permutation(considered)[:length].tolist())
            r = Ranking(items, frozenset(considered.tolist()))
            skills = rng.gamma(1.0, 1.0, size=K)
            expected = (math.factorial(considered_count - length)
                        / math.factorial(considered_count))
            value = math.exp(weighted_pl_log_prob(r, skills, 0))
            self.assertAlmostEqual(value, expected,
                                   delta=1e-12 * expected)
            self.assertEqual(weighted_pl_log_prob(r, skills, 0),
                             uniform_log_prob(r))

    def test_ordering_count(self):
        self.assertEqual(ordering_count(9, 9), 362880)
        self.assertEqual(ordering_count(4, 2), 12)
        self.assertEqual(ordering_count(30, 8),
                         math.factorial(30) // math.factorial(22))

    def test_bad_weight(self):
        r = Ranking((0,), frozenset([0, 1]))
        self.assertRaises(InvalidLatentException, weighted_pl_log_prob, r,
                          [1.0, 1.0], 2)


class TestCompleteData(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(99)
        self.ranking = Ranking((4, 1, 2), frozenset([0, 1, 2, 4, 5]))
        self.skills = self.rng.gamma(1.5, 1.0, size=6)

    def test_integrates_to_weighted_likelihood(self):
        # f(x, z) = PL_W(x) * prod_j Exp(z_j; S_j), so subtracting the
        # exponential log-densities leaves the marginal.
        z = self.rng.exponential(1.0, size=self.ranking.length)
        for w in (0, 1):
            tails = np.array(_tails(self.ranking, self.skills, w))
            exponential = np.sum(np.log(tails) - tails * z)
            self.assertAlmostEqual(
                complete_data_log_lik(self.ranking, z, self.skills, w)
                - exponential,
                weighted_pl_log_prob(self.ranking, self.skills, w),
                delta=1e-10)

    def test_uninformative_rates(self):
        z = np.array([0.5, 1.0, 2.0])
        # K_i = 5: rates 5, 4, 3
        self.assertAlmostEqual(
            complete_data_log_lik(self.ranking, z, self.skills, 0),
            -(5 * 0.5 + 4 * 1.0 + 3 * 2.0), places=12)

    def test_exposure_form_agrees(self):
        z = self.rng.exponential(1.0, size=self.ranking.length)
        a, b = exposure_statistics(self.ranking, z, 6)
        self.assertEqual(a.tolist(), [0, 1, 1, 0, 1, 0])
        self.assertEqual(b[3], 0.0)
        for w in (0, 1):
            self.assertAlmostEqual(
                float(log_f_from_exposures(a, b, self.skills, w)),
                complete_data_log_lik(self.ranking, z, self.skills, w),
                delta=1e-10)

    def test_exposure_form_on_rows(self):
        z = self.rng.exponential(1.0, size=self.ranking.length)
        a, b = exposure_statistics(self.ranking, z, 6)
        rows = np.vstack([self.skills, 2.0 * self.skills])
        values = log_f_from_exposures(a, b, rows, 1)
        self.assertEqual(values.shape, (2,))
        self.assertAlmostEqual(
            values[1], complete_data_log_lik(self.ranking, z,
                                             2.0 * self.skills, 1),
            delta=1e-10)

    def test_layout_matches_per_ranking_statistics(self):
        rankings = [self.ranking, Ranking((0, 5), frozenset(range(6))),
                    Ranking((3,), frozenset([3, 5]))]
        layout = ExposureLayout(rankings, 6)
        Z = [self.rng.exponential(1.0, size=r.length) for r in rankings]
        A, B = layout.exposures(Z)
        for i, (ranking, z) in enumerate(zip(rankings, Z)):
            a, b = exposure_statistics(ranking, z, 6)
            np.testing.assert_array_equal(A[i], a)
            np.testing.assert_allclose(B[i], b, rtol=1e-12)

    def test_layout_latent_means(self):
        rankings = [self.ranking, Ranking((5, 0), frozenset([0, 3, 5]))]
        layout = ExposureLayout(rankings, 6)
        skills = np.vstack([self.skills, self.skills[::-1]])
        rng = np.random.default_rng(4)
        draws = [layout.sample_latents(skills, [1, 0], rng)
                 for _ in range(20000)]
        self.assertEqual([len(z) for z in draws[0]], [3, 2])
        first = np.array([z[0] for z in draws])
        second = np.array([z[1] for z in draws])
        rates = np.array(_tails(self.ranking, self.skills, 1))
        np.testing.assert_allclose(first.mean(axis=0), 1.0 / rates,
                                   rtol=0.05)
        np.testing.assert_allclose(second.mean(axis=0), [1 / 3., 1 / 2.],
                                   rtol=0.05)

    def test_bad_latents(self):
        self.assertRaises(InvalidLatentException, complete_data_log_lik,
                          self.ranking, [1.0, 1.0], self.skills, 1)
        self.assertRaises(InvalidLatentException, complete_data_log_lik,
                          self.ranking, [1.0, 0.0, 1.0], self.skills, 1)

    def test_latent_means(self):
        rng = np.random.default_rng(3)
        draws = np.array([sample_latents(self.ranking, self.skills, 1, rng)
                          for _ in range(20000)])
        rates = np.array(_tails(self.ranking, self.skills, 1))
        np.testing.assert_allclose(draws.mean(axis=0), 1.0 / rates,
                                   rtol=0.05)
        draws = np.array([sample_latents(self.ranking, self.skills, 0, rng)
                          for _ in range(20000)])
        np.testing.assert_allclose(draws.mean(axis=0), [1 / 5., 1 / 4.,
                                                        1 / 3.], rtol=0.05)


class TestOrderings(unittest.TestCase):

    def test_vectorised_log_probs(self):
        rng = np.random.default_rng(5)
        skills = rng.gamma(1.0, 1.0, size=6)
        considered = np.array([0, 2, 3, 5])
        orderings = np.array(list(itertools.permutations(considered, 2)))
        values = ordering_log_probs(orderings, considered, skills, 1)
        for row, value in zip(orderings, values):
            r = Ranking(tuple(row), frozenset(considered.tolist()))
            self.assertAlmostEqual(value, pl_log_prob(r, skills), delta=1e-12)
        values = ordering_log_probs(orderings, considered, skills, 0)
        np.testing.assert_allclose(values, -math.log(12))

    def test_first_choice_marginal(self):
        rng = np.random.default_rng(11)
        firsts = Counter(sample_ordering([0, 1, 2], [1.0, 2.0, 3.0], 1, 3,
                                         rng)[0]
                         for _ in range(10000))
        self.assertAlmostEqual(firsts[2] / 10000.0, 0.5, delta=0.025)
        self.assertAlmostEqual(firsts[0] / 10000.0, 1 / 6., delta=0.025)

    def test_uniform_top_two(self):
        rng = np.random.default_rng(12)
        draws = 24000
        counts = Counter(sample_ordering(range(4), [9.0, 1.0, 1.0, 1.0], 0,
                                         2, rng)
                         for _ in range(draws))
        self.assertEqual(len(counts), 12)
        for pair, count in counts.items():
            self.assertEqual(len(set(pair)), 2)
            self.assertAlmostEqual(count / float(draws), 1 / 12.,
                                   delta=0.015)


if __name__ == '__main__':
    unittest.main()
