"""Posterior summaries of a trace.

Ranker and entity dissimilarity matrices, complete-linkage dendrograms,
distributions of cluster counts, aggregate rankings within a ranker
cluster and posterior reliability probabilities.

Summaries conditioned on N ranker clusters need a ranker cluster to mean
the same thing in every sample.  Each conditioned sample's clusters are
matched greedily to the clusters of the modal partition by the Jaccard
overlap of their members; ties go to the lower modal label, then the
lower sample label.  Cluster ``s`` below always refers to the modal
partition's cluster ``s`` (labelled by first appearance).
"""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('DissimilarityMatrix', 'Dendrogram', 'AggregateEntry',
           'EntityGroup', 'ranker_dissimilarity', 'entity_dissimilarity',
           'complete_linkage', 'cut_dendrogram',
           'cluster_count_distribution', 'aggregate_ranking',
           'reliability_probabilities', 'cluster_reliability',
           'entity_cluster_ordering', 'map_allocation', 'loglik_series',
           'modal_partition', 'conditioned_samples', 'write_matrix_csv',
           'write_merges_csv', 'write_counts_csv', 'write_aggregate_csv',
           'write_reliability_csv', 'RANKER', 'ENTITY')
__docformat__ = 'restructuredtext'

import csv
import logging
from collections import Counter, namedtuple

import numpy as np
from scipy.cluster.hierarchy import fcluster

from wand.exceptions import (
    DimensionMismatchException, EmptyTraceException,
    InvariantViolationException, UnsatisfiableConditionException)


_logger = logging.getLogger('wand.summaries')

RANKER = 'ranker'
ENTITY = 'entity'

AggregateEntry = namedtuple('AggregateEntry',
                            'entity label mean_skill rank')
EntityGroup = namedtuple('EntityGroup', 'entities mean_skill')


class DissimilarityMatrix(object):
    """Symmetric matrix of probabilities with a zero diagonal."""

    def __init__(self, entries, labels=None):
        entries = np.array(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvariantViolationException('dissimilarities must be a '
                                              'square matrix')
        if not np.array_equal(entries, entries.T):
            raise InvariantViolationException('dissimilarities are not '
                                              'symmetric')
        if np.any(np.diag(entries) != 0.0):
            raise InvariantViolationException('dissimilarity diagonal is '
                                              'not zero')
        if np.any(entries < 0.0) or np.any(entries > 1.0):
            raise InvariantViolationException('dissimilarities outside '
                                              '[0, 1]')
        entries.flags.writeable = False
        self._entries = entries
        if labels is None:
            labels = [str(k) for k in range(len(entries))]
        self.labels = list(labels)

    @property
    def dim(self):
        return len(self._entries)

    @property
    def entries(self):
        return self._entries

    def __getitem__(self, key):
        return self._entries[key]


class Dendrogram(object):
    """Agglomerative merge table.

    Leaves are ``0 .. leaf_count-1``; the k-th merge creates cluster
    ``leaf_count + k``, as in scipy linkage matrices.
    """

    def __init__(self, merges, leaf_count):
        merges = [(int(a), int(b), float(h)) for a, b, h in merges]
        if len(merges) != leaf_count - 1:
            raise InvariantViolationException('%d merges for %d leaves'
                                              % (len(merges), leaf_count))
        heights = [h for _, _, h in merges]
        if any(later < earlier for earlier, later in zip(heights,
                                                         heights[1:])):
            raise InvariantViolationException('merge heights decrease')
        self.merges = merges
        self.leaf_count = leaf_count

    def heights(self):
        return [h for _, _, h in self.merges]

    def to_linkage_matrix(self):
        sizes = [1] * self.leaf_count
        rows = []
        for a, b, h in self.merges:
            sizes.append(sizes[a] + sizes[b])
            rows.append([a, b, h, sizes[-1]])
        return np.array(rows, dtype=float).reshape(-1, 4)


def _require_records(trace, what):
    if len(trace) == 0:
        raise EmptyTraceException(what)


def _canonical(labels):
    """Relabel by first appearance and return as a tuple."""
    mapping = {}
    return tuple(mapping.setdefault(int(label), len(mapping))
                 for label in labels)


def _pairwise_disagreement(label_rows):
    total = None
    for labels in label_rows:
        labels = np.asarray(labels)
        differ = (labels[:, None] != labels[None, :]).astype(float)
        total = differ if total is None else total + differ
    return total / len(label_rows)


def ranker_dissimilarity(trace, labels=None):
    """Delta_ij = Pr(c_i != c_j | data): the fraction of retained samples
    in which rankers i and j sit in different clusters."""
    _require_records(trace, 'ranker dissimilarities')
    return DissimilarityMatrix(
        _pairwise_disagreement([state.c for state in trace.states]), labels)


def conditioned_samples(trace, num_clusters):
    """States of the retained samples with exactly `num_clusters` ranker
    clusters."""
    _require_records(trace, 'a conditioned summary')
    states = [state for state in trace.states
              if state.num_ranker_clusters == num_clusters]
    if not states:
        raise UnsatisfiableConditionException(
            'no retained sample has %d ranker clusters' % num_clusters)
    return states


def modal_partition(states):
    """The most frequent ranker partition among `states` as a list of
    member sets, labelled by first appearance.  Ties go to the partition
    seen first."""
    counts = Counter(_canonical(state.c) for state in states)
    modal, _ = counts.most_common(1)[0]
    clusters = [set() for _ in range(max(modal) + 1)]
    for ranker, label in enumerate(modal):
        clusters[label].add(ranker)
    return clusters


def _align(state, modal_clusters):
    """Map each modal cluster label to a cluster label of `state`."""
    sample_clusters = [set(np.flatnonzero(state.c == q).tolist())
                       for q in range(state.num_ranker_clusters)]
    scored = []
    for m, modal in enumerate(modal_clusters):
        for q, members in enumerate(sample_clusters):
            jaccard = len(modal & members) / float(len(modal | members))
            scored.append((-jaccard, m, q))
    scored.sort()
    mapping = {}
    used = set()
    for _, m, q in scored:
        if m in mapping or q in used:
            continue
        mapping[m] = q
        used.add(q)
    return mapping


def _aligned_clusters(trace, num_clusters, cluster):
    states = conditioned_samples(trace, num_clusters)
    if not 0 <= cluster < num_clusters:
        raise UnsatisfiableConditionException(
            'cluster %d does not exist among %d' % (cluster, num_clusters))
    modal = modal_partition(states)
    return [(state, _align(state, modal)[cluster]) for state in states]


def entity_dissimilarity(trace, num_clusters, cluster, labels=None):
    """Pr(d_sj != d_sj' | data, N^r = num_clusters) within ranker cluster
    `cluster`."""
    aligned = _aligned_clusters(trace, num_clusters, cluster)
    return DissimilarityMatrix(
        _pairwise_disagreement([state.D[q] for state, q in aligned]),
        labels)


def complete_linkage(dissimilarities):
    """Agglomerative clustering with furthest-neighbour distances.

    At each step the two active clusters with the smallest dissimilarity
    merge; the dissimilarity of the new cluster to any other is the
    larger of its parts'.  Ties go to the lexicographically smallest pair
    of cluster ids.
    """
    dim = dissimilarities.dim
    if dim < 2:
        raise DimensionMismatchException('complete linkage needs at least '
                                         '2 items, got %d' % dim)
    entries = dissimilarities.entries
    distance = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            distance[(i, j)] = float(entries[i, j])
    active = list(range(dim))
    merges = []
    for new in range(dim, 2 * dim - 1):
        best = None
        for x, a in enumerate(active):
            for b in active[x + 1:]:
                height = distance[(a, b)]
                if best is None or height < best[0]:
                    best = (height, a, b)
        height, a, b = best
        merges.append((a, b, height))
        active.remove(a)
        active.remove(b)
        for k in active:
            distance[(k, new)] = max(distance[(min(a, k), max(a, k))],
                                     distance[(min(b, k), max(b, k))])
        active.append(new)
    return Dendrogram(merges, dim)


def cut_dendrogram(dendrogram, height):
    """Flat clusters joined at or below `height`, labelled by first
    appearance."""
    flat = fcluster(dendrogram.to_linkage_matrix(), t=height,
                    criterion='distance')
    return np.array(_canonical(flat), dtype=np.intp)


def cluster_count_distribution(trace, level=RANKER, num_clusters=None,
                               cluster=None):
    """Empirical distribution of N^r, or of N^e_s given N^r =
    `num_clusters` for ranker cluster `cluster`.

    :Returns: dict mapping each observed count to its probability,
        ordered by count.
    """
    if level == RANKER:
        _require_records(trace, 'a cluster count distribution')
        counts = Counter(state.num_ranker_clusters for state in trace.states)
    elif level == ENTITY:
        aligned = _aligned_clusters(trace, num_clusters, cluster)
        counts = Counter(len(state.Lambda[q]) for state, q in aligned)
    else:
        raise ValueError('unknown level %r' % (level,))
    total = float(sum(counts.values()))
    return dict((k, counts[k] / total) for k in sorted(counts))


def _mean_cluster_skills(trace, num_clusters, cluster):
    aligned = _aligned_clusters(trace, num_clusters, cluster)
    return np.mean([state.Lambda[q][state.D[q]] for state, q in aligned],
                   axis=0)


def aggregate_ranking(trace, num_clusters, cluster, labels=None):
    """Entities of ranker cluster `cluster` ordered by posterior mean skill,
    given N^r = `num_clusters`.  Means are reported unnormalised."""
    means = _mean_cluster_skills(trace, num_clusters, cluster)
    order = sorted(range(len(means)), key=lambda j: (-means[j], j))
    return [AggregateEntry(j, labels[j] if labels else str(j),
                           float(means[j]), rank)
            for rank, j in enumerate(order, start=1)]


def entity_cluster_ordering(trace, num_clusters, cluster, height):
    """Entity groups read off the entity dendrogram of `cluster` cut at
    `height`, ordered by the average posterior mean skill of their
    members."""
    dendrogram = complete_linkage(
        entity_dissimilarity(trace, num_clusters, cluster))
    groups = cut_dendrogram(dendrogram, height)
    means = _mean_cluster_skills(trace, num_clusters, cluster)
    result = [EntityGroup(tuple(np.flatnonzero(groups == g).tolist()),
                          float(means[groups == g].mean()))
              for g in range(groups.max() + 1)]
    result.sort(key=lambda group: (-group.mean_skill, group.entities))
    return result


def reliability_probabilities(trace):
    """Pr(w_i = 1 | data) for every ranker."""
    _require_records(trace, 'reliability probabilities')
    return np.mean([state.w for state in trace.states], axis=0)


def cluster_reliability(trace, num_clusters):
    """Average Pr(w_i = 1 | data) over the members of each modal ranker
    cluster given N^r = `num_clusters`: higher means a more homogeneous
    cluster."""
    modal = modal_partition(conditioned_samples(trace, num_clusters))
    probs = reliability_probabilities(trace)
    return [float(np.mean([probs[i] for i in sorted(members)]))
            for members in modal]


def map_allocation(trace):
    """Ranker allocation of the retained sample with the highest
    complete-data log-likelihood.  A single allocation can misrepresent a
    multimodal posterior; report it alongside the dendrogram only."""
    _require_records(trace, 'a MAP allocation')
    best = max(trace.records, key=lambda record: record.loglik)
    return np.array(_canonical(best.state.c), dtype=np.intp)


def loglik_series(trace):
    return [(record.iteration, record.loglik) for record in trace]


def write_matrix_csv(path, matrix):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow([''] + matrix.labels)
        for label, row in zip(matrix.labels, matrix.entries):
            writer.writerow([label] + [repr(float(x)) for x in row])


def write_merges_csv(path, dendrogram):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['a', 'b', 'height'])
        for a, b, height in dendrogram.merges:
            writer.writerow([a, b, repr(height)])


def write_counts_csv(path, distribution):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['k', 'prob'])
        for k, prob in distribution.items():
            writer.writerow([k, repr(float(prob))])


def write_aggregate_csv(path, entries):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['entity', 'label', 'mean_skill', 'rank'])
        for entry in entries:
            writer.writerow([entry.entity, entry.label,
                             repr(entry.mean_skill), entry.rank])


def write_reliability_csv(path, probabilities, header='ranker'):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow([header, 'prob'])
        for i, prob in enumerate(probabilities):
            writer.writerow([i, repr(float(prob))])
