"""
Ranking criteria over a ResultMatrix.

    sd        rank score of every option of one dimension, from how often
              the option places 1st, 2nd, ... over the queries
    pareto_q  non-dominated fronts over the per-query runtimes
    pareto_agg  non-dominated fronts over the option rank scores
    rta       area of the triangle spanned by three option rank scores
"""

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

import configspace

logger = logging.getLogger('pyBenchRank.ranking')

AGGREGATORS = {'mean': np.mean, 'min': np.min, 'median': np.median}

# half of sin(120 degrees): the triangle between three axes 120 degrees apart
RTA_Y = math.sin(math.radians(120)) / 2
RTA_MAX = RTA_Y * 3


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class CriterionError(Error):
    pass


@dataclass(frozen=True)
class RankingSet:
    """Configuration labels best first, each with the score it was ranked by."""
    criterion: str
    entries: tuple          # of (label, score)

    def __post_init__(self):
        entries = tuple((str(l), float(s)) for l, s in self.entries)
        object.__setattr__(self, 'entries', entries)
        labels = [l for l, _ in entries]
        if len(set(labels)) != len(labels):
            raise CriterionError('%s ranks a configuration twice' % self.criterion)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def labels(self):
        return [l for l, _ in self.entries]

    def score_of(self, label):
        for l, s in self.entries:
            if l == label:
                return s
        raise CriterionError('%s not ranked by %s' % (label, self.criterion))

    def position(self, label):
        """1-based rank index of 'label'."""
        return self.labels.index(label) + 1


def top_k(ranking_set, k):
    if not 1 <= k <= len(ranking_set):
        raise CriterionError('k must be between 1 and %d, got %d' % (len(ranking_set), k))
    return RankingSet(ranking_set.criterion, ranking_set.entries[:k])

def write_ranking_csv(ranking_set, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(('rank', 'config', 'score'))
        for rank, (label, score) in enumerate(ranking_set, 1):
            w.writerow((rank, label, '%.6f' % score))


#
# Single dimension rank scores
#

@dataclass
class SdScoreTable:
    dimension: str
    options: tuple
    occurrences: np.ndarray     # occurrences[o, r - 1]: queries placing option o at rank r
    scores: np.ndarray
    query_count: int

    @property
    def d(self):
        return len(self.options)

    def score_of(self, option):
        try:
            return float(self.scores[self.options.index(option)])
        except ValueError:
            raise CriterionError('option %s not in the %s scores' % (option, self.dimension))

    def ranked_options(self):
        """Options by score, best first; declaration order breaks ties."""
        idx = sorted(range(self.d), key=lambda o: (-self.scores[o], o))
        return [self.options[o] for o in idx]


def sd_scores_from_occurrences(dimension, options, occurrences):
    """
    Rank scores from occurrence counts: with d options and |Q| queries an
    option scores sum over r of O(r) * (d - r) / (|Q| * (d - 1)).
    """
    occ = np.asarray(occurrences, dtype=int)
    d = len(options)
    if d < 2:
        raise CriterionError('dimension %s needs at least two options to rank, has %d'
                             % (dimension, d))
    if occ.shape != (d, d):
        raise CriterionError('occurrence table for %s must be %d x %d' % (dimension, d, d))
    totals = occ.sum(axis=1)
    if len(set(totals.tolist())) != 1:
        raise CriterionError('occurrence rows of %s sum to %s, expected equal totals'
                             % (dimension, totals.tolist()))
    q = int(totals[0])
    if q < 1:
        raise CriterionError('no queries behind the %s occurrences' % dimension)
    weights = d - np.arange(1, d + 1)
    scores = occ @ weights / (q * (d - 1))
    return SdScoreTable(dimension, tuple(options), occ, scores, q)

def sd_scores(matrix, dimension, aggregator='mean'):
    """
    Rank the options of 'dimension' in every query by the aggregated
    runtime of the configurations sharing each option, count placements
    and turn them into rank scores.
    """
    try:
        dim = matrix.space.dimension(dimension)
    except configspace.Error as e:
        raise CriterionError(str(e))
    try:
        agg = AGGREGATORS[aggregator]
    except KeyError:
        raise CriterionError('unknown aggregator %r' % aggregator)
    d = len(dim.options)
    if d < 2:
        raise CriterionError('dimension %s needs at least two options to rank, has %d'
                             % (dim.name, d))
    if not matrix.query_count:
        raise CriterionError('no queries to rank %s by' % dim.name)

    option = matrix.option_column(dim.name)
    per_option = np.empty((d, matrix.query_count))
    for o in range(d):
        rows = matrix.runtime[option == o]
        if not len(rows):
            raise CriterionError('option %s of %s has no configurations'
                                 % (dim.options[o], dim.name))
        per_option[o] = agg(rows, axis=0)

    occ = np.zeros((d, d), dtype=int)
    for j in range(matrix.query_count):
        for r, o in enumerate(np.argsort(per_option[:, j], kind='stable')):
            occ[o, r] += 1
    table = sd_scores_from_occurrences(dim.name, dim.options, occ)
    logger.debug('sd %s: %s', dim.name,
                 ', '.join('%s=%.4f' % (o, s) for o, s in zip(table.options, table.scores)))
    return table

def sd_tables(matrix, aggregator='mean'):
    """An SdScoreTable for every dimension of the matrix space, in order."""
    return {name: sd_scores(matrix, name, aggregator) for name in matrix.space.names}

def sd_ranking_set(matrix, dimension, aggregator='mean', table=None):
    """
    Configurations by the score of their option, then by mean runtime
    over all queries, then by label.
    """
    table = table or sd_scores(matrix, dimension, aggregator)
    option = matrix.option_column(table.dimension)
    means = matrix.config_means()
    score = [float(table.scores[o]) for o in option]
    idx = sorted(range(len(matrix)),
                 key=lambda i: (-score[i], means[i], matrix.labels[i]))
    return RankingSet('sd:%s' % table.dimension,
                      [(matrix.labels[i], score[i]) for i in idx])

def write_sd_csv(table, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(['option'] + ['r%d' % r for r in range(1, table.d + 1)] + ['score'])
        for o, option in enumerate(table.options):
            w.writerow([option] + table.occurrences[o].tolist() + ['%.6f' % table.scores[o]])


#
# Non-dominated sorting
#

@dataclass
class ParetoResult:
    objectives: np.ndarray
    sense: str
    fronts: list = field(default_factory=list)  # lists of row indices, front 0 first
    front_of: np.ndarray = None
    crowding: np.ndarray = None


def dominates(u, v, sense='minimize'):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if sense == 'maximize':
        u, v = -u, -v
    return bool((u <= v).all() and (u < v).any())

def nondominated_sort(vectors, sense='minimize'):
    """
    Peel the vectors into non-dominated fronts and compute the crowding
    distance of every vector inside its front. Boundary vectors of a
    front get an infinite distance.
    """
    if sense not in ('minimize', 'maximize'):
        raise CriterionError('sense must be minimize or maximize')
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return ParetoResult(np.zeros((0, 0)), sense, [], np.zeros(0, dtype=int), np.zeros(0))
    m = len(vectors[0])
    if m < 1 or any(len(v) != m for v in vectors):
        raise CriterionError('objective vectors must all have the same length >= 1')

    objs = np.asarray(vectors, dtype=float)
    cost = -objs if sense == 'maximize' else objs
    # dom[i, j]: i dominates j
    le = (cost[:, None, :] <= cost[None, :, :]).all(axis=2)
    lt = (cost[:, None, :] < cost[None, :, :]).any(axis=2)
    dom = le & lt

    n = len(objs)
    dominated_by = dom.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    front_of = np.full(n, -1, dtype=int)
    fronts = []
    while remaining.any():
        front = np.flatnonzero(remaining & (dominated_by == 0))
        front_of[front] = len(fronts)
        fronts.append(front.tolist())
        remaining[front] = False
        dominated_by = dominated_by - dom[front].sum(axis=0)

    crowding = np.zeros(n)
    for front in fronts:
        crowding[front] = crowding_distance(cost[front])
    return ParetoResult(objs, sense, fronts, front_of, crowding)

def crowding_distance(points):
    points = np.asarray(points, dtype=float)
    n, m = points.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(m):
        order = np.argsort(points[:, k], kind='stable')
        values = points[order, k]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = values[-1] - values[0]
        if span == 0:
            continue
        dist[order[1:-1]] += (values[2:] - values[:-2]) / span
    return dist

def _front_ranking(criterion, labels, result):
    idx = sorted(range(len(labels)),
                 key=lambda i: (result.front_of[i], -result.crowding[i], labels[i]))
    return RankingSet(criterion,
                      [(labels[i], 1.0 / (1 + result.front_of[i])) for i in idx])

def pareto_q_fronts(matrix):
    if not matrix.query_count:
        raise CriterionError('pareto_q needs at least one query')
    result = nondominated_sort(matrix.runtime.tolist(), 'minimize')
    logger.debug('pareto_q: %d fronts', len(result.fronts))
    return result

def pareto_q(matrix, result=None):
    """Fronts minimizing the runtime of every query at once."""
    result = result or pareto_q_fronts(matrix)
    return _front_ranking('pareto_q', matrix.labels, result)

def agg_objectives(matrix, tables):
    """Per configuration, the rank score of its option in every dimension."""
    missing = [name for name in matrix.space.names if name not in tables]
    if missing or not tables:
        raise CriterionError('pareto_agg needs rank scores for %s'
                             % ', '.join(missing or matrix.space.names))
    vectors = []
    for cfg in matrix.configs:
        vectors.append([tables[name].score_of(matrix.space.option_of(cfg, name))
                        for name in matrix.space.names])
    return vectors

def pareto_agg_fronts(matrix, tables):
    result = nondominated_sort(agg_objectives(matrix, tables), 'maximize')
    logger.debug('pareto_agg: %d fronts over %d objectives',
                 len(result.fronts), len(matrix.space.names))
    return result

def pareto_agg(matrix, tables, result=None):
    """Fronts maximizing the option rank scores of every dimension."""
    result = result or pareto_agg_fronts(matrix, tables)
    return _front_ranking('pareto_agg', matrix.labels, result)


#
# Triangle area
#

def rta(rs, rp, rf):
    """(area, area normalized by the unit triangle) for three scores in [0, 1]."""
    for name, value in (('rs', rs), ('rp', rp), ('rf', rf)):
        if not 0 <= value <= 1:
            raise CriterionError('%s = %s is outside [0, 1]' % (name, value))
    area = RTA_Y * (rf * rp + rs * rp + rf * rs)
    return area, area / RTA_MAX

def rta_scores(matrix, tables):
    """Per configuration, the three rank scores of its options."""
    names = list(tables)
    if len(names) != 3:
        raise CriterionError('triangle area needs exactly three dimensions, got %d'
                             % len(names))
    return [tuple(tables[n].score_of(matrix.space.option_of(cfg, n)) for n in names)
            for cfg in matrix.configs]

def rta_ranking_set(matrix, tables):
    scores = [rta(*s)[1] for s in rta_scores(matrix, tables)]
    idx = sorted(range(len(matrix)), key=lambda i: (-scores[i], matrix.labels[i]))
    return RankingSet('rta', [(matrix.labels[i], scores[i]) for i in idx])
