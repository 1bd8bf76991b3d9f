"""Command-line front end: ``wand fit|summarize|ppc|simulate``.

Data goes to files in the output directory; progress and log messages go
to standard error.  Exit status is 0 when every output was written, 1 on
an input or sampling error and 2 on a usage error.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('RunConfig', 'build_parser', 'main', 'cmd_fit', 'cmd_summarize',
           'cmd_ppc', 'cmd_simulate')
__docformat__ = 'restructuredtext'

import argparse
import csv
import logging
import os
import sys
import traceback
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from wand._version import __version__
from wand.chain_state import (
    Hyperparams, Trace, prior_cluster_count_distribution, read_trace)
from wand.environment import get_default_worker_limit, validate_seed
from wand.exceptions import (
    ConfigurationException, EmptyTraceException, WandException)
from wand.gibbs import SweepConfig, run_chain
from wand.predictive import AUTO, DEFAULT_CAP, METHODS, check_trace_matches
from wand.predictive import diagnostic_probabilities
from wand.ranking_data import load_dataset, save_dataset
from wand.simulate import (
    generate, load_spec, save_truth, two_cluster_spec)
from wand import summaries


_logger = logging.getLogger('wand.cli')

COMMANDS = ('fit', 'summarize', 'ppc', 'simulate')


@dataclass
class RunConfig(object):
    """Everything one subcommand needs, validated."""

    command: str
    out: str = '.'
    data: str = None
    traces: list = field(default_factory=list)
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    seed: int = 0
    chains: int = 1
    condition_nr: int = None
    cut_height: float = 0.5
    mode: str = AUTO
    samples_per_iter: int = 1
    cap: int = DEFAULT_CAP
    spec: str = None
    simulation: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigurationException('unknown command %r'
                                         % (self.command,))
        self.seed = validate_seed(self.seed)
        for path in [self.data, self.spec] + list(self.traces):
            if path is not None and not os.path.isfile(path):
                raise ConfigurationException('no such file: %s' % path)
        if self.command in ('fit', 'ppc') and self.data is None:
            raise ConfigurationException('%s needs --data' % self.command)
        if self.command in ('summarize', 'ppc') and not self.traces:
            raise ConfigurationException('%s needs --trace' % self.command)
        if self.chains < 1:
            raise ConfigurationException('--chains must be positive')

    @classmethod
    def from_args(cls, args):
        kwargs = dict(command=args.command, out=args.out, seed=args.seed)
        if args.command == 'fit':
            kwargs.update(
                data=args.data, chains=args.chains,
                hyperparams=Hyperparams(
                    a=args.a, a_alpha=args.a_alpha, b_alpha=args.b_alpha,
                    a_gamma=args.a_gamma, b_gamma=args.b_gamma,
                    m_r=args.m_r, m_e=args.m_e),
                sweep=SweepConfig(
                    iterations=args.iters, burn_in=args.burnin,
                    thin=args.thin, rescale_enabled=not args.no_rescale,
                    check_invariants=args.check_invariants))
        elif args.command == 'summarize':
            kwargs.update(data=args.data, traces=args.trace,
                          condition_nr=args.condition_nr,
                          cut_height=args.cut_height)
        elif args.command == 'ppc':
            kwargs.update(data=args.data, traces=args.trace, mode=args.mode,
                          samples_per_iter=args.samples_per_iter,
                          cap=args.cap)
        else:
            kwargs.update(spec=args.spec, simulation=dict(
                num_entities=args.entities,
                num_rankers=args.rankers,
                reliability=args.p, considered_count=args.considered,
                top_m=args.top_m))
        return cls(**kwargs)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('%r is not an integer' % text)
    if value < 1:
        raise argparse.ArgumentTypeError('must be at least 1, not %d'
                                         % value)
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError('must not be negative')
    return value


def build_parser():
    defaults = Hyperparams()
    parser = argparse.ArgumentParser(
        prog='wand', description='Clustering rankers with a mixture of '
        'weighted Plackett-Luce models.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    parser.add_argument('--log-level', default='INFO',
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    commands = parser.add_subparsers(dest='command', required=True)

    fit = commands.add_parser('fit', help='run the Gibbs sampler')
    fit.add_argument('--data', required=True, help='dataset JSON')
    fit.add_argument('--out', default='.', help='directory for the traces')
    fit.add_argument('--iters', type=_non_negative_int, default=1000,
                     help='sweeps after burn-in')
    fit.add_argument('--burnin', type=_non_negative_int, default=0)
    fit.add_argument('--thin', type=_positive_int, default=1)
    fit.add_argument('--seed', type=int, default=0)
    fit.add_argument('--chains', type=_positive_int, default=1)
    for name, option in (('a', '--a'), ('a_alpha', '--a-alpha'),
                         ('b_alpha', '--b-alpha'), ('a_gamma', '--a-gamma'),
                         ('b_gamma', '--b-gamma')):
        fit.add_argument(option, dest=name, type=float,
                         default=getattr(defaults, name))
    fit.add_argument('--m-r', dest='m_r', type=_positive_int,
                     default=defaults.m_r,
                     help='auxiliary ranker clusters per proposal')
    fit.add_argument('--m-e', dest='m_e', type=_positive_int,
                     default=defaults.m_e,
                     help='auxiliary entity clusters per proposal')
    fit.add_argument('--no-rescale', action='store_true',
                     help='skip the skill rescaling step')
    fit.add_argument('--check-invariants', action='store_true',
                     help='verify the chain state at every recorded sweep')

    summarize = commands.add_parser('summarize',
                                    help='posterior summaries as CSV')
    summarize.add_argument('--trace', action='append', required=True,
                           help='trace file; repeat to pool chains')
    summarize.add_argument('--data', help='dataset JSON, for entity labels')
    summarize.add_argument('--out', default='.')
    summarize.add_argument('--condition-nr', type=_positive_int,
                           help='number of ranker clusters to condition on '
                           '(default: the most probable)')
    summarize.add_argument('--cut-height', type=float, default=0.5,
                           help='height at which entity dendrograms are cut')
    summarize.add_argument('--seed', type=int, default=0,
                           help=argparse.SUPPRESS)

    ppc = commands.add_parser('ppc', help='posterior predictive checks')
    ppc.add_argument('--data', required=True)
    ppc.add_argument('--trace', action='append', required=True)
    ppc.add_argument('--out', default='.')
    ppc.add_argument('--mode', choices=(AUTO,) + METHODS, default=AUTO,
                     help='auto enumerates when within --cap and falls '
                     'back to truncated otherwise')
    ppc.add_argument('--samples-per-iter', type=_positive_int, default=1,
                     help='orderings drawn per retained sample (L)')
    ppc.add_argument('--cap', type=_positive_int, default=DEFAULT_CAP,
                     help='largest number of orderings to enumerate')
    ppc.add_argument('--seed', type=int, default=0)

    simulate = commands.add_parser('simulate', help='draw a synthetic '
                                   'dataset')
    simulate.add_argument('--spec', help='generative spec JSON; without it '
                          'two reversed-skill ranker clusters are used')
    simulate.add_argument('--entities', type=_positive_int, default=9)
    simulate.add_argument('--rankers', type=_positive_int, default=40,
                          help='total rankers, split evenly; an odd one '
                          'goes to the first cluster')
    simulate.add_argument('--p', type=float, default=0.75)
    simulate.add_argument('--considered', type=_positive_int)
    simulate.add_argument('--top-m', dest='top_m', type=_positive_int)
    simulate.add_argument('--seed', type=int, default=0)
    simulate.add_argument('--out', default='.')
    return parser


def _fit_chain(job):
    data_path, h, sweep, seed, chain, path, progress = job
    # workers re-read the dataset rather than unpickle it
    data = load_dataset(data_path)
    trace = run_chain(data, h, sweep, seed, chain, trace_path=path,
                      progress=progress)
    return chain, [record.loglik for record in trace]


def cmd_fit(cfg):
    data = load_dataset(cfg.data)
    _logger.info('%d rankers, %d entities', data.num_rankers,
                 data.num_entities)
    os.makedirs(cfg.out, exist_ok=True)
    workers = min(cfg.chains, get_default_worker_limit())
    jobs = [(cfg.data, cfg.hyperparams, cfg.sweep, cfg.seed, k,
             os.path.join(cfg.out, 'trace-%d.ndjson' % k), workers == 1)
            for k in range(cfg.chains)]
    if workers == 1:
        results = [_fit_chain(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_fit_chain, jobs))
    for chain, logliks in results:
        if logliks:
            _logger.info('chain %d: %d records, loglik mean %.3f, last %.3f',
                         chain, len(logliks), sum(logliks) / len(logliks),
                         logliks[-1])
    return 0


def _load_traces(paths):
    traces = [read_trace(path) for path in paths]
    if len(traces) == 1:
        return traces[0]
    return Trace.pooled(traces)


def _modal_count(trace):
    counts = Counter(state.num_ranker_clusters for state in trace.states)
    return min(counts, key=lambda k: (-counts[k], k))


def _write_rows(path, header, rows):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_summarize(cfg):
    trace = _load_traces(cfg.traces)
    labels = None
    if cfg.data is not None:
        data = load_dataset(cfg.data)
        check_trace_matches(trace, data)
        if data.entity_labels is not None:
            labels = list(data.entity_labels)
    if len(trace) == 0:
        raise EmptyTraceException('summaries')
    os.makedirs(cfg.out, exist_ok=True)

    def out(name):
        return os.path.join(cfg.out, name)

    header = trace.header
    h = header.hyperparams
    delta = summaries.ranker_dissimilarity(trace)
    summaries.write_matrix_csv(out('ranker_dissimilarity.csv'), delta)
    if delta.dim >= 2:
        summaries.write_merges_csv(out('ranker_dendrogram.csv'),
                                   summaries.complete_linkage(delta))
    summaries.write_counts_csv(out('ranker_cluster_counts.csv'),
                               summaries.cluster_count_distribution(trace))
    summaries.write_counts_csv(
        out('ranker_cluster_counts_prior.csv'),
        prior_cluster_count_distribution(header.num_rankers, h.a_alpha,
                                         h.b_alpha))
    summaries.write_reliability_csv(
        out('reliability.csv'), summaries.reliability_probabilities(trace))
    _write_rows(out('loglik.csv'), ['iter', 'loglik'],
                [(t, repr(ll)) for t, ll in summaries.loglik_series(trace)])
    _write_rows(out('map_allocation.csv'), ['ranker', 'cluster'],
                enumerate(summaries.map_allocation(trace).tolist()))

    num_clusters = cfg.condition_nr or _modal_count(trace)
    _logger.info('conditioning on %d ranker clusters', num_clusters)
    summaries.write_reliability_csv(
        out('cluster_reliability.csv'),
        summaries.cluster_reliability(trace, num_clusters), header='cluster')
    for s in range(num_clusters):
        entity_delta = summaries.entity_dissimilarity(trace, num_clusters, s,
                                                      labels)
        summaries.write_matrix_csv(out('entity_dissimilarity_%d.csv' % s),
                                   entity_delta)
        summaries.write_counts_csv(
            out('entity_cluster_counts_%d.csv' % s),
            summaries.cluster_count_distribution(
                trace, summaries.ENTITY, num_clusters, s))
        summaries.write_aggregate_csv(
            out('aggregate_ranking_%d.csv' % s),
            summaries.aggregate_ranking(trace, num_clusters, s, labels))
        if entity_delta.dim < 2:
            continue
        summaries.write_merges_csv(out('entity_dendrogram_%d.csv' % s),
                                   summaries.complete_linkage(entity_delta))
        groups = summaries.entity_cluster_ordering(trace, num_clusters, s,
                                                   cfg.cut_height)
        _write_rows(out('entity_groups_%d.csv' % s),
                    ['group', 'entities', 'mean_skill'],
                    [(g, ' '.join(str(j) for j in group.entities),
                      repr(group.mean_skill))
                     for g, group in enumerate(groups)])
    return 0


def cmd_ppc(cfg):
    data = load_dataset(cfg.data)
    trace = _load_traces(cfg.traces)
    check_trace_matches(trace, data)
    report = diagnostic_probabilities(
        trace, data, method=cfg.mode, samples_per_iter=cfg.samples_per_iter,
        cap=cfg.cap, seed=cfg.seed, progress=True)
    os.makedirs(cfg.out, exist_ok=True)
    report.write_csv(os.path.join(cfg.out, 'ppc.csv'))
    return 0


def cmd_simulate(cfg):
    if cfg.spec is not None:
        spec = load_spec(cfg.spec)
    else:
        spec = two_cluster_spec(**cfg.simulation)
    data, truth = generate(spec, cfg.seed)
    os.makedirs(cfg.out, exist_ok=True)
    save_dataset(data, os.path.join(cfg.out, 'data.json'))
    save_truth(truth, os.path.join(cfg.out, 'truth.json'))
    return 0


_COMMANDS = {'fit': cmd_fit, 'summarize': cmd_summarize, 'ppc': cmd_ppc,
             'simulate': cmd_simulate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        stream=sys.stderr,
                        format='%(name)s: %(levelname)s: %(message)s')
    try:
        cfg = RunConfig.from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except WandException as e:
        if e.include_traceback:
            traceback.print_exc()
        _logger.error('%s', e)
        return 1
    except OSError as e:
        _logger.error('%s', e)
        return 1
