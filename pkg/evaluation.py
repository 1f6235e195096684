"""
Metrics over ranking sets: conformance against the measured per-query
results, coherence between two ranking sets, replicability of one option
against another and per-dimension runtime summaries.
"""

import itertools
import logging
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

import configspace
import ranking
import results

logger = logging.getLogger('pyBenchRank.evaluation')

COHERENCE_MODES = ('pairwise', 'positional')
FULL_SPACE = 'Full conf. Space'


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class MetricError(Error):
    pass


def _labels(rs):
    return rs.labels if isinstance(rs, ranking.RankingSet) else [str(l) for l in rs]


def conformance(ranking_set, per_query, k, h):
    """
    1 - (number of times one of the top k configurations falls into the
    bottom h of a query) / (|Q| * k). 'per_query' is a PerQueryRanking or
    a ResultMatrix.
    """
    if isinstance(per_query, results.ResultMatrix):
        per_query = results.per_query_rankings(per_query)
    labels = _labels(ranking_set)
    if not 1 <= k <= len(labels):
        raise MetricError('k must be between 1 and %d, got %d' % (len(labels), k))
    if not per_query.queries:
        raise MetricError('conformance needs at least one query')
    top = labels[:k]
    hits = 0
    for q in per_query.queries:
        try:
            bottom = results.bottom_h(per_query, q, h)
        except results.Error as e:
            raise MetricError(str(e))
        hits += sum(1 for label in top if label in bottom)
    return 1 - hits / (len(per_query.queries) * k)


def coherence(r1, r2, mode='pairwise'):
    """
    Distance between two ranking sets of the same length, 0 for identical
    sets and 1 for sets without common elements.

    pairwise    over all pairs of elements of r1, the fraction of pairs not
                present in both sets with the same rank difference
    positional  the fraction of positions naming different elements
    """
    a, b = _labels(r1), _labels(r2)
    if len(a) != len(b):
        raise MetricError('ranking sets differ in length: %d and %d' % (len(a), len(b)))
    if mode not in COHERENCE_MODES:
        raise MetricError('unknown coherence mode %r' % mode)
    if not a:
        return 0.0
    if mode == 'positional':
        return sum(1 for x, y in zip(a, b) if x != y) / len(a)

    pairs = list(itertools.combinations(range(len(a)), 2))
    if not pairs:
        return 0.0 if a == b else 1.0
    pos2 = {label: i for i, label in enumerate(b)}
    disagreements = 0
    for i, j in pairs:
        x, y = a[i], a[j]
        if x in pos2 and y in pos2 and i - j == pos2[x] - pos2[y]:
            continue
        disagreements += 1
    return disagreements / len(pairs)


ReplicabilityGroup = namedtuple('ReplicabilityGroup', ['option', 'wins', 'cells', 'percent'])

@dataclass
class ReplicabilityReport:
    dimension: str
    option_a: str
    option_b: str
    group_by: str
    groups: list = field(default_factory=list)     # of ReplicabilityGroup

    def percent_of(self, option):
        for g in self.groups:
            if g.option == option:
                return g.percent
        raise MetricError('no group %s' % option)


def replicability_pair(matrix, option_a, option_b, dim, group_by):
    """
    Per option of 'group_by', the percentage of (query, other options)
    cells where the configuration with option_a of 'dim' is strictly
    faster than its counterpart with option_b. A group without comparable
    cells has percent None.
    """
    space = matrix.space
    try:
        pos = space.position(dim)
        gpos = space.position(group_by)
        a = space.dimensions[pos].resolve(option_a)
        b = space.dimensions[pos].resolve(option_b)
    except configspace.Error as e:
        raise MetricError(str(e))
    if pos == gpos:
        raise MetricError('cannot group %s by itself' % dim)

    rows = {c.choices: i for i, c in enumerate(matrix.configs)}
    group_options = space.dimensions[gpos].options
    wins = np.zeros(len(group_options), dtype=int)
    cells = np.zeros(len(group_options), dtype=int)
    for choices, i in rows.items():
        if choices[pos] != a:
            continue
        other = list(choices)
        other[pos] = b
        j = rows.get(tuple(other))
        if j is None:
            continue
        g = choices[gpos]
        wins[g] += int((matrix.runtime[i] < matrix.runtime[j]).sum())
        cells[g] += matrix.query_count

    report = ReplicabilityReport(space.dimensions[pos].name, space.dimensions[pos].options[a],
                                 space.dimensions[pos].options[b],
                                 space.dimensions[gpos].name)
    for g, option in enumerate(group_options):
        percent = 100.0 * wins[g] / cells[g] if cells[g] else None
        report.groups.append(ReplicabilityGroup(option, int(wins[g]), int(cells[g]), percent))
    return report


ImpactRow = namedtuple('ImpactRow', ['target', 'varying', 'mean', 'min', 'max', 'cells'])

def dimension_impact(matrix, target_dim, varying_dim):
    """
    Runtime summary per (target option, varying option) over all queries
    and the options of the remaining dimensions.
    """
    space = matrix.space
    try:
        tpos = space.position(target_dim)
        vpos = space.position(varying_dim)
    except configspace.Error as e:
        raise MetricError(str(e))
    if tpos == vpos:
        raise MetricError('target and varying dimension are both %s' % target_dim)
    tcol = np.array([c.choices[tpos] for c in matrix.configs], dtype=int)
    vcol = np.array([c.choices[vpos] for c in matrix.configs], dtype=int)

    rows = []
    for t, topt in enumerate(space.dimensions[tpos].options):
        for v, vopt in enumerate(space.dimensions[vpos].options):
            values = matrix.runtime[(tcol == t) & (vcol == v)]
            if not values.size:
                continue
            rows.append(ImpactRow(topt, vopt, float(values.mean()), float(values.min()),
                                  float(values.max()), int(values.size)))
    return rows


GlobalColumn = namedtuple('GlobalColumn', ['title', 'table', 'error'])

def global_ranking_table(matrix, dim, filters, aggregator='mean'):
    """
    Rank scores of 'dim' over the full space and over every filtered
    sub-space. 'filters' maps column titles to {'include': ..., 'exclude': ...}.
    A column whose filter leaves 'dim' with different options carries an
    error instead of a table.
    """
    try:
        options = matrix.space.dimension(dim).options
    except configspace.Error as e:
        raise MetricError(str(e))
    columns = [GlobalColumn(FULL_SPACE, ranking.sd_scores(matrix, dim, aggregator), None)]
    for title, spec in filters.items():
        spec = spec or {}
        try:
            sub = matrix.restrict(spec.get('include'), spec.get('exclude'))
            if not sub.space.has_dimension(dim):
                raise MetricError('filter removes dimension %s' % dim)
            kept = sub.space.dimension(dim).options
            if kept != options:
                raise MetricError('filter leaves %s without configurations for %s'
                                  % (dim, ', '.join(o for o in options if o not in kept)))
            table = ranking.sd_scores(sub, dim, aggregator)
        except (MetricError, configspace.Error, ranking.Error, results.Error) as e:
            logger.warning('global ranking column %s: %s', title, e)
            columns.append(GlobalColumn(str(title), None, str(e)))
            continue
        columns.append(GlobalColumn(str(title), table, None))
    return columns
