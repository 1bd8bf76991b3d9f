#!/usr/bin/env python

"""Tests for the process-wide worker limit and the random streams."""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

import os
import unittest

import wand_testing

from wand.environment import (
    THREADS_ENV, get_default_worker_limit, make_rng, set_default_worker_limit,
    validate_seed)
from wand.exceptions import ConfigurationException


class TestWorkerLimit(unittest.TestCase):

    def setUp(self):
        self.saved = os.environ.pop(THREADS_ENV, None)

    def tearDown(self):
        set_default_worker_limit(None)
        os.environ.pop(THREADS_ENV, None)
        if self.saved is not None:
            os.environ[THREADS_ENV] = self.saved

    def test_environment(self):
        os.environ[THREADS_ENV] = '3'
        self.assertEqual(get_default_worker_limit(), 3)
        os.environ[THREADS_ENV] = 'many'
        self.assertRaises(ConfigurationException, get_default_worker_limit)
        os.environ[THREADS_ENV] = '0'
        self.assertRaises(ConfigurationException, get_default_worker_limit)

    def test_unset_means_cpu_count(self):
        self.assertEqual(get_default_worker_limit(), os.cpu_count() or 1)

    def test_override(self):
        os.environ[THREADS_ENV] = '3'
        set_default_worker_limit(5)
        self.assertEqual(get_default_worker_limit(), 5)
        set_default_worker_limit(None)
        self.assertEqual(get_default_worker_limit(), 3)
        self.assertRaises(ConfigurationException, set_default_worker_limit, 0)


class TestStreams(unittest.TestCase):

    def test_seeds(self):
        self.assertEqual(validate_seed('12'), 12)
        self.assertEqual(validate_seed(2 ** 64 - 1), 2 ** 64 - 1)
        for bad in (-1, 2 ** 64, 'x', None):
            self.assertRaises(ConfigurationException, validate_seed, bad)

    def test_streams_are_reproducible_and_distinct(self):
        first = make_rng(7, 0, 1).random(5).tolist()
        self.assertEqual(make_rng(7, 0, 1).random(5).tolist(), first)
        self.assertNotEqual(make_rng(7, 0, 2).random(5).tolist(), first)
        self.assertNotEqual(make_rng(8, 0, 1).random(5).tolist(), first)
        self.assertNotEqual(make_rng(7, 1, 1).random(5).tolist(), first)


if __name__ == '__main__':
    unittest.main()
