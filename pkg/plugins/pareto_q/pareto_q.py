import csv
import itertools

import ranking
import report
from plugin import Criterion

CLASS_NAME = 'ParetoQ'

# objectives drawn as 2D projections; the rest only go to the CSV
PROJECTED = 3

def write_points(path, labels, names, result):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(['config', 'front', 'crowding'] + list(names))
        for i, label in enumerate(labels):
            crowd = result.crowding[i]
            w.writerow([label, int(result.front_of[i]),
                        'inf' if crowd == float('inf') else '%.6f' % crowd] +
                       ['%.6f' % v for v in result.objectives[i]])
    return path

def projections(stem, labels, names, result, what):
    """One scatter SVG per pair of the first objectives."""
    paths = []
    for a, b in itertools.combinations(range(min(PROJECTED, len(names))), 2):
        points = [(label, result.objectives[i][a], result.objectives[i][b],
                   int(result.front_of[i])) for i, label in enumerate(labels)]
        svg = report.scatter_svg('%s: %s vs %s' % (what, names[a], names[b]),
                                 points, names[a], names[b])
        paths.append(report.write_text('%s_%s_%s.svg' % (stem, names[a], names[b]), svg))
    return paths


class ParetoQ(Criterion):
    NAME = 'pareto_q'

    def produce(self, matrix, arg=None, aggregator='mean'):
        return ranking.pareto_q(matrix)

    def plot(self, matrix, ranking_set, outdir, arg=None, aggregator='mean'):
        result = ranking.pareto_q_fronts(matrix)
        stem = self.output_stem(outdir)
        paths = [write_points(stem + '_points.csv', matrix.labels, matrix.queries, result)]
        return paths + projections(stem, matrix.labels, matrix.queries, result,
                                   'runtime (ms)')
