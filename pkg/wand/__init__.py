"""\
Bayesian clustering of rankers and entities with an infinite mixture of
weighted Plackett-Luce models.  See `wand.gibbs` to fit a model,
`wand.summaries` and `wand.predictive` to read a trace.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = [
           # from ranking_data
           'Ranking', 'Dataset', 'RankingKind', 'parse_dataset',
           'serialize_dataset', 'load_dataset', 'save_dataset',

           # from likelihood
           'SkillAssignment', 'pl_log_prob', 'weighted_pl_log_prob',
           'complete_data_log_lik',

           # from chain_state
           'Hyperparams', 'ChainState', 'Trace', 'read_trace',

           # from gibbs
           'SweepConfig', 'run_chain',

           # from environment
           'get_default_worker_limit', 'set_default_worker_limit',

           # from exceptions
           'WandException', 'DatasetValidationException',
           'MissingSkillException', 'InvalidSkillException',
           'InvalidLatentException', 'ConfigurationException',
           'EmptyTraceException', 'UnsatisfiableConditionException',
           'EnumerationCapException', 'TraceFormatException',
           'DimensionMismatchException', 'InvariantViolationException',

           # submodules
           'summaries', 'predictive', 'simulate',
           ]

__docformat__ = 'restructuredtext'

from wand._version import version, __version__

from wand.exceptions import (
    WandException, DatasetValidationException, MissingSkillException,
    InvalidSkillException, InvalidLatentException, ConfigurationException,
    EmptyTraceException, UnsatisfiableConditionException,
    EnumerationCapException, TraceFormatException,
    DimensionMismatchException, InvariantViolationException)
from wand.environment import (
    get_default_worker_limit, set_default_worker_limit)
from wand.ranking_data import (
    Ranking, Dataset, RankingKind, parse_dataset, serialize_dataset,
    load_dataset, save_dataset)
from wand.likelihood import (
    SkillAssignment, pl_log_prob, weighted_pl_log_prob,
    complete_data_log_lik)
from wand.chain_state import Hyperparams, ChainState, Trace, read_trace
from wand.gibbs import SweepConfig, run_chain
from wand import summaries, predictive, simulate
