"""Marginal Gibbs sampler for the infinite mixture of weighted
Plackett-Luce models.

One sweep updates, in order: ranker allocations, entity allocations
within each ranker cluster, skills, latents, reliability weights,
concentrations, and finally rescales the skills.  The allocation moves
propose new clusters through auxiliary components drawn from the prior.

Every update works on the per-entity exposure statistics of
`wand.likelihood.exposure_statistics`, under which the complete-data
log-likelihood of ranker i with skills lam is
``w_i * a_i . log(lam) - b_i . lam**w_i``.
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('SweepConfig', 'update_ranker_allocations',
           'update_entity_allocations', 'update_skills', 'update_latents',
           'update_weights', 'update_concentrations', 'rescale', 'sweep',
           'run_chain', 'compute_exposures', 'skill_posterior_parameters',
           'weight_probability', 'weight_probabilities',
           'sample_concentration')
__docformat__ = 'restructuredtext'

import logging
import math
import sys
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from wand.chain_state import (
    Trace, TraceHeader, TraceRecord, TraceWriter,
    complete_data_log_likelihood, draw_skills, init_from_prior, relabel,
    resample_latents, seat_customers)
from wand.environment import CHAIN_STREAM, make_rng
from wand.exceptions import ConfigurationException
from wand.likelihood import SKILL_FLOOR, log_f_table


_logger = logging.getLogger('wand.gibbs')


@dataclass(frozen=True)
class SweepConfig(object):
    """How long to run and what to keep.

    `iterations` sweeps are run after `burn_in` sweeps and every `thin`-th
    of them is recorded.
    """

    iterations: int = 1000
    burn_in: int = 0
    thin: int = 1
    rescale_enabled: bool = True
    check_invariants: bool = False

    def __post_init__(self):
        for name, low in (('iterations', 0), ('burn_in', 0), ('thin', 1)):
            value = getattr(self, name)
            if int(value) != value or value < low:
                raise ConfigurationException('%s must be an integer >= %d, '
                                             'not %r' % (name, low, value))
            object.__setattr__(self, name, int(value))

    @property
    def total_sweeps(self):
        return self.burn_in + self.iterations

    @property
    def expected_records(self):
        return self.iterations // self.thin


def compute_exposures(data, Z):
    """`exposure_statistics` of every ranker as two (n, K) matrices."""
    return data.exposure_layout.exposures(Z)


def _sample_log_weights(log_weights, u):
    """Index drawn with probability proportional to exp(log_weights),
    by inverting the cumulative weights at the uniform `u`."""
    top = max(log_weights)
    weights = [math.exp(value - top) for value in log_weights]
    target = u * math.fsum(weights)
    for index, weight in enumerate(weights):
        target -= weight
        if target < 0.0:
            return index
    return len(weights) - 1


def update_ranker_allocations(state, data, h, rng, exposures=None):
    """Reallocate every ranker in turn.

    An existing cluster c is weighted by its size without ranker i times
    f(x_i, z_i | c); each of `h.m_r` auxiliary clusters, drawn from the
    prior (gamma, CRP entity partition, G0 atoms), by alpha/m_r times
    f(x_i, z_i | aux).  A ranker alone in its cluster keeps that cluster
    as the first auxiliary.  Empty clusters are dropped immediately and
    the result is relabelled.

    `exposures` are the matrices of `compute_exposures` for the current
    latents, computed here when not given.
    """
    n, K = data.num_rankers, data.num_entities
    A, B = exposures if exposures is not None else compute_exposures(
        data, state.Z)
    c = state.c.copy()
    D = list(state.D)
    Lambda = list(state.Lambda)
    gamma = list(state.gamma)
    counts = np.bincount(c, minlength=len(Lambda)).tolist()
    # columns[s][i] = log f(x_i, z_i | cluster s)
    columns = log_f_table(A, B, np.array([lam[d] for d, lam
                                          in zip(D, Lambda)]),
                          state.w).T.tolist()
    # every auxiliary cluster of this pass, drawn up front
    aux_gamma = rng.gamma(h.a_gamma, 1.0 / h.b_gamma, size=(n, h.m_r))
    aux_d = seat_customers(rng.random((n, h.m_r, K)), aux_gamma)
    aux_atoms = draw_skills(h.a, (n, h.m_r, K), rng)
    aux_log_f = log_f_table(A, B,
                            np.take_along_axis(aux_atoms, aux_d, axis=2),
                            state.w).tolist()
    uniforms = rng.random(n).tolist()
    log_aux = math.log(state.alpha / h.m_r)

    def drop(label):
        del D[label], Lambda[label], gamma[label], columns[label]
        del counts[label]
        c[c > label] -= 1

    for i in range(n):
        own = int(c[i])
        counts[own] -= 1
        singleton = counts[own] == 0
        existing = [s for s, count in enumerate(counts) if count > 0]
        log_weights = [math.log(counts[s]) + columns[s][i]
                       for s in existing]
        if singleton:
            log_weights.append(log_aux + columns[own][i])
        log_weights.extend(log_aux + value
                           for value in aux_log_f[i][int(singleton):])
        choice = _sample_log_weights(log_weights, uniforms[i])
        if choice < len(existing):
            c[i] = existing[choice]
            counts[existing[choice]] += 1
            if singleton:
                drop(own)
        elif singleton and choice == len(existing):
            counts[own] += 1
        else:
            j = choice - len(existing)
            d = aux_d[i, j].copy()
            lam = aux_atoms[i, j, :d.max() + 1].copy()
            D.append(d)
            Lambda.append(lam)
            gamma.append(float(aux_gamma[i, j]))
            columns.append(log_f_table(A, B, lam[d][None, :],
                                       state.w)[:, 0].tolist())
            counts.append(1)
            c[i] = len(Lambda) - 1
            if singleton:
                drop(own)

    state.c = c
    state.D = D
    state.Lambda = Lambda
    state.gamma = np.array(gamma, dtype=float)
    return relabel(state)


def update_entity_allocations(state, data, h, rng, exposures=None):
    """Reallocate every entity within every ranker cluster.

    For cluster s and entity l, an existing atom is weighted by the number
    of other entities sharing it, an auxiliary G0 atom by gamma_s/m_e, each
    times the product of f(x_i, z_i) over the informative rankers in s.
    Only entity l's skill changes between candidates, so that product
    reduces to ``a_s[l] log(v) - b_s[l] v`` up to a common constant.
    """
    K = data.num_entities
    num = state.num_ranker_clusters
    A, B = exposures if exposures is not None else compute_exposures(
        data, state.Z)
    informative = state.w == 1
    fresh = draw_skills(h.a, (num, K, h.m_e), rng).tolist()
    uniforms = rng.random((num, K)).tolist()
    D = []
    Lambda = []
    for s in range(num):
        members = (state.c == s) & informative
        a_s = A[members].sum(axis=0).tolist()
        b_s = B[members].sum(axis=0).tolist()
        d = state.D[s].tolist()
        lam = np.maximum(state.Lambda[s], SKILL_FLOOR).tolist()
        counts = np.bincount(d, minlength=len(lam)).tolist()
        log_aux = math.log(state.gamma[s] / h.m_e)
        for l in range(K):
            own = d[l]
            counts[own] -= 1
            singleton = counts[own] == 0
            aux = fresh[s][l]
            if singleton:
                aux = [lam[own]] + aux[:-1]
            existing = [t for t, count in enumerate(counts) if count > 0]
            values = [lam[t] for t in existing] + aux
            log_weights = [a_s[l] * math.log(v) - b_s[l] * v
                           for v in values]
            for k, t in enumerate(existing):
                log_weights[k] += math.log(counts[t])
            for k in range(len(existing), len(values)):
                log_weights[k] += log_aux
            choice = _sample_log_weights(log_weights, uniforms[s][l])
            if choice < len(existing):
                d[l] = existing[choice]
                counts[existing[choice]] += 1
            elif singleton and choice == len(existing):
                counts[own] += 1
                continue
            else:
                lam.append(values[choice])
                d[l] = len(lam) - 1
                counts.append(1)
            if singleton:
                del lam[own], counts[own]
                d = [t - 1 if t > own else t for t in d]
        D.append(np.array(d, dtype=np.intp))
        Lambda.append(np.array(lam, dtype=float))
    state.D = D
    state.Lambda = Lambda
    return relabel(state)


def skill_posterior_parameters(state, data, h, exposures=None):
    """Gamma full-conditional parameters of every atom.

    :Returns: list over ranker clusters of ``(shape, rate)`` vector pairs:
        ``shape = a + beta_st`` counts how often an atom's entities are
        ranked by informative rankers in s; ``rate = 1 + sum of latents``
        over the positions whose denominator contains one of the atom's
        entities, unranked considered entities included.
    """
    A, B = exposures if exposures is not None else compute_exposures(
        data, state.Z)
    informative = state.w == 1
    params = []
    for s, (d, lam) in enumerate(zip(state.D, state.Lambda)):
        members = (state.c == s) & informative
        beta = np.bincount(d, weights=A[members].sum(axis=0),
                           minlength=len(lam))
        exposure = np.bincount(d, weights=B[members].sum(axis=0),
                               minlength=len(lam))
        params.append((h.a + beta, 1.0 + exposure))
    return params


def update_skills(state, data, h, rng, exposures=None):
    """Draw every atom from its gamma full conditional."""
    state.Lambda = [np.maximum(rng.gamma(shape, 1.0 / rate), SKILL_FLOOR)
                    for shape, rate in skill_posterior_parameters(
                        state, data, h, exposures)]
    return state


def update_latents(state, data, rng):
    """z_ij ~ Exp(S_ij(w_i)), rate parameterisation."""
    return resample_latents(state, data, rng)


def weight_probabilities(A, B, skills, prior):
    """Pr(w_i = 1 | rest) for every row of the exposure matrices.

    `skills` holds the skills each ranker sees, one row per ranker, and
    `prior` the p_i.
    """
    lam = np.maximum(np.asarray(skills, dtype=float), SKILL_FLOOR)
    prior = np.asarray(prior, dtype=float)
    with np.errstate(divide='ignore'):
        log_one = (np.log(prior) + np.sum(A * np.log(lam), axis=1)
                   - np.sum(B * lam, axis=1))
        log_zero = np.log1p(-prior) - np.sum(B, axis=1)
    return np.exp(log_one - np.logaddexp(log_one, log_zero))


def weight_probability(a, b, skills, p):
    """Pr(w_i = 1 | rest) from ranker i's exposure statistics."""
    return float(weight_probabilities(np.atleast_2d(a), np.atleast_2d(b),
                                      np.atleast_2d(skills), [p])[0])


def update_weights(state, data, rng):
    """Resample every reliability weight given its ranker's latents."""
    A, B = compute_exposures(data, state.Z)
    prob = weight_probabilities(A, B, state.ranker_skill_matrix(),
                                data.reliability_array)
    state.w = (rng.random(data.num_rankers) < prob).astype(state.w.dtype)
    return state


def sample_concentration(current, clusters, size, shape, rate, rng):
    """One auxiliary-variable update of a DP concentration with a
    Ga(shape, rate) prior, given `clusters` occupied clusters among `size`
    items."""
    eta = rng.beta(current + 1.0, size)
    posterior_rate = rate - math.log(eta)
    odds = (shape + clusters - 1.0) / (size * posterior_rate)
    if rng.random() < odds / (1.0 + odds):
        posterior_shape = shape + clusters
    else:
        posterior_shape = shape + clusters - 1.0
    return rng.gamma(posterior_shape, 1.0 / posterior_rate)


def update_concentrations(state, data, h, rng):
    """Update alpha, then every gamma_s."""
    state.alpha = float(sample_concentration(
        state.alpha, state.num_ranker_clusters, data.num_rankers,
        h.a_alpha, h.b_alpha, rng))
    state.gamma = np.array([
        sample_concentration(g, len(lam), data.num_entities, h.a_gamma,
                             h.b_gamma, rng)
        for g, lam in zip(state.gamma, state.Lambda)], dtype=float)
    return state


def rescale(state, h, rng):
    """Move the total skill to a fresh Ga(N a, 1) draw, N being the number
    of atoms, keeping every ratio of skills."""
    target = rng.gamma(state.total_atoms * h.a, 1.0)
    factor = target / sum(lam.sum() for lam in state.Lambda)
    state.Lambda = [np.maximum(lam * factor, SKILL_FLOOR)
                    for lam in state.Lambda]
    return state


def sweep(state, data, h, rng, rescale_enabled=True):
    """One full Gibbs sweep.

    The latents stay fixed from the ranker move through the skill move, so
    those three share one set of exposures.
    """
    exposures = compute_exposures(data, state.Z)
    state = update_ranker_allocations(state, data, h, rng, exposures)
    state = update_entity_allocations(state, data, h, rng, exposures)
    state = update_skills(state, data, h, rng, exposures)
    state = update_latents(state, data, rng)
    state = update_weights(state, data, rng)
    state = update_concentrations(state, data, h, rng)
    if rescale_enabled:
        state = rescale(state, h, rng)
    return state


def run_chain(data, h, cfg, seed, chain=0, trace_path=None, progress=False):
    """Run one chain from a prior draw.

    :Parameters:
        `data` : `wand.ranking_data.Dataset`
        `h` : `wand.chain_state.Hyperparams`
        `cfg` : `SweepConfig`
        `seed` : int
            64-bit unsigned seed; with `chain` it fixes the random stream.
        `trace_path` : str or None
            If given, records are streamed there as they are produced.
        `progress` : bool
            Show a progress bar on standard error.
    :Returns: the `wand.chain_state.Trace`.
    """
    rng = make_rng(seed, CHAIN_STREAM, chain)
    header = TraceHeader(seed=int(seed), chain=int(chain), hyperparams=h,
                         burn_in=cfg.burn_in, thin=cfg.thin,
                         iterations=cfg.iterations,
                         num_rankers=data.num_rankers,
                         num_entities=data.num_entities,
                         rescale=cfg.rescale_enabled)
    _logger.info('chain %d: seed %d, %d burn-in + %d sweeps, thin %d',
                 chain, seed, cfg.burn_in, cfg.iterations, cfg.thin)
    trace = Trace(header)
    writer = TraceWriter(trace_path, header) if trace_path else None
    try:
        state = init_from_prior(data, h, rng)
        bar = tqdm(total=cfg.total_sweeps, disable=not progress,
                   desc='chain %d' % chain, file=sys.stderr, unit='sweep')
        with bar:
            for t in range(1, cfg.total_sweeps + 1):
                state = sweep(state, data, h, rng, cfg.rescale_enabled)
                bar.update()
                if t <= cfg.burn_in or (t - cfg.burn_in) % cfg.thin:
                    continue
                if cfg.check_invariants:
                    state.check_invariants()
                record = TraceRecord(t, state.copy(latents=False),
                                     complete_data_log_likelihood(state, data))
                trace.append(record)
                if writer is not None:
                    writer.write(record)
                _logger.debug('chain %d sweep %d: N^r=%d loglik=%.3f', chain,
                              t, state.num_ranker_clusters, record.loglik)
    finally:
        if writer is not None:
            writer.close()
    if len(trace):
        _logger.info('chain %d finished: %d records, mean loglik %.3f',
                     chain, len(trace),
                     np.mean([record.loglik for record in trace]))
    else:
        _logger.info('chain %d finished with no records', chain)
    return trace
