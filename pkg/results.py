"""
The configurations x queries matrix of mean runtimes and the per-query
rankings derived from it.
"""

import csv
import logging
from collections import namedtuple

import numpy as np

import configspace

logger = logging.getLogger('pyBenchRank.results')


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class MissingCellsError(Error):
    def __init__(self, gaps):
        shown = ', '.join('%s/%s' % g for g in gaps[:10])
        if len(gaps) > 10:
            shown += ', ... (%d more)' % (len(gaps) - 10)
        Error.__init__(self, 'no log records for %s' % shown)
        self.gaps = gaps

class RankingRangeError(Error):
    pass


class ResultMatrix:
    """
    Mean runtime_ms per (configuration, query). Rows follow the order of
    'configs', columns the order of 'queries'. 'labels' name the rows;
    they keep the labels of the space the logs were written against even
    when the matrix is later restricted to a filtered space. 'declared'
    is that space, None when unknown.
    """

    def __init__(self, space, configs, queries, runtime, labels=None, dataset=None,
                 declared=None):
        self.space = space
        self.declared = declared
        self.configs = tuple(configs)
        self.queries = tuple(queries)
        self.runtime = np.asarray(runtime, dtype=float)
        if labels is None:
            labels = [configspace.encode_label(space, c) for c in self.configs]
        self.labels = tuple(labels)
        self.dataset = dataset
        if self.runtime.shape != (len(self.configs), len(self.queries)):
            raise Error('runtime matrix is %s, expected %d x %d'
                        % (self.runtime.shape, len(self.configs), len(self.queries)))
        if self.runtime.size and not (self.runtime > 0).all():
            raise Error('runtimes must be positive')
        self._row = {label: i for i, label in enumerate(self.labels)}

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return 'ResultMatrix(%d configs x %d queries)' % self.runtime.shape

    @property
    def query_count(self):
        return len(self.queries)

    def row(self, label):
        try:
            return self._row[label]
        except KeyError:
            raise Error('configuration %s not in the result matrix' % label)

    def value(self, label, query):
        return float(self.runtime[self.row(label), self.queries.index(query)])

    def config_means(self):
        """Mean runtime of every configuration across all queries."""
        return self.runtime.mean(axis=1)

    def option_column(self, dimension):
        """Option index of 'dimension' for every row."""
        pos = self.space.position(dimension)
        return np.array([c.choices[pos] for c in self.configs], dtype=int)

    def drop_queries(self, excluded):
        excluded = set(excluded)
        keep = [i for i, q in enumerate(self.queries) if q not in excluded]
        return ResultMatrix(self.space, self.configs, [self.queries[i] for i in keep],
                            self.runtime[:, keep], self.labels, self.dataset, self.declared)

    def restrict(self, include=None, exclude=None):
        """
        Matrix over the sub-space left by the include/exclude filters.
        Rows keep their original labels. Options the matrix no longer has
        are ignored; options its declared space never had raise.
        """
        subspace = configspace.filter_space(self.space, include, exclude,
                                            declared=self.declared)
        rows, configs = [], []
        for i, cfg in enumerate(self.configs):
            sub = configspace.project(self.space, subspace, cfg)
            if sub is not None:
                rows.append(i)
                configs.append(sub)
        return ResultMatrix(subspace, configs, self.queries, self.runtime[rows, :],
                            [self.labels[i] for i in rows], self.dataset, self.declared)


def aggregate(logs, space, queries=None, discard_first=False, dataset=None, declared=None):
    """
    Average the runtimes of 'logs' into a ResultMatrix over every
    configuration of 'space'.

    'queries' fixes the column order and drops records of other queries;
    by default columns follow first appearance in the logs. With
    'discard_first' run 1 is left out of every cell that has more runs.

    When 'space' was filtered from 'declared', log labels are those of
    'declared' and records of configurations filtered out are skipped.
    """
    datasets = sorted({r.dataset for r in logs})
    if dataset is None and len(datasets) > 1:
        raise Error('logs mix datasets %s; choose one' % ', '.join(datasets))
    if dataset is not None:
        logs = [r for r in logs if r.dataset == dataset]
    elif datasets:
        dataset = datasets[0]

    configs = space.enumerate()
    labels = [configspace.declared_label(space, declared, c) for c in configs]
    row = {label: i for i, label in enumerate(labels)}
    known = set(declared.labels()) if declared is not None else set()

    if queries is None:
        queries = []
        for r in logs:
            if r.query not in queries:
                queries.append(r.query)
    queries = list(queries)
    col = {q: j for j, q in enumerate(queries)}

    cells = {}
    for r in logs:
        if r.query not in col:
            continue
        if r.config not in row:
            if r.config in known:
                continue
            raise Error('log record for unknown configuration %s' % r.config)
        cells.setdefault((row[r.config], col[r.query]), []).append((r.run, r.runtime_ms))

    runtime = np.zeros((len(labels), len(queries)))
    gaps = []
    for i, label in enumerate(labels):
        for j, q in enumerate(queries):
            runs = cells.get((i, j))
            if not runs:
                gaps.append((label, q))
                continue
            if discard_first and len(runs) > 1:
                runs = [r for r in runs if r[0] != 1] or runs
            runtime[i, j] = np.mean([ms for _, ms in runs])
    if gaps:
        raise MissingCellsError(gaps)

    logger.debug('aggregated %d records into %d x %d', len(logs), len(labels), len(queries))
    return ResultMatrix(space, configs, queries, runtime, labels, dataset, declared)


PerQueryRanking = namedtuple('PerQueryRanking', ['queries', 'order', 'positions'])
PerQueryRanking.__doc__ = """
order[q] lists the labels best first; positions[q][label] is the 1-based rank.
"""

def per_query_rankings(matrix):
    order = {}
    positions = {}
    for j, q in enumerate(matrix.queries):
        column = matrix.runtime[:, j]
        idx = sorted(range(len(matrix.labels)),
                     key=lambda i: (column[i], matrix.labels[i]))
        labels = [matrix.labels[i] for i in idx]
        order[q] = labels
        positions[q] = {label: pos for pos, label in enumerate(labels, 1)}
    return PerQueryRanking(matrix.queries, order, positions)

def bottom_h(ranking, query, h):
    """The h worst ranked labels of 'query'."""
    try:
        labels = ranking.order[query]
    except KeyError:
        raise RankingRangeError('query %s is not ranked' % query)
    if not 1 <= h <= len(labels):
        raise RankingRangeError('h must be between 1 and %d, got %d' % (len(labels), h))
    return set(labels[-h:])


def write_matrix_csv(matrix, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(('config',) + matrix.queries)
        for label, values in zip(matrix.labels, matrix.runtime):
            w.writerow([label] + ['%.6f' % v for v in values])

def write_query_ranks_csv(matrix, ranking, path):
    """Per configuration, the rank it takes in each query."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(('config',) + matrix.queries)
        for label in matrix.labels:
            w.writerow([label] + [ranking.positions[q][label] for q in matrix.queries])
