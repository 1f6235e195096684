import math
import os

import ranking
import report
from plugin import Criterion

SCRIPTDIR = os.path.dirname(__file__)

CLASS_NAME = 'Rta'

# Preload the templates
tname = os.path.join(SCRIPTDIR, 'templates', 'triangle.tmpl')
TRIANGLE_TEMPLATE = open(tname, 'rb').read().decode('utf-8')

# axis directions, 120 degrees apart, first one pointing up
ANGLES = (90, 210, 330)

class Rta(Criterion):
    NAME = 'rta'

    def check(self, matrix, arg=None):
        if len(matrix.space.names) != 3:
            raise ranking.CriterionError(
                'triangle area needs exactly three dimensions, the space has %d (%s)'
                % (len(matrix.space.names), ', '.join(matrix.space.names)))

    def tables(self, matrix, aggregator):
        self.check(matrix)
        return ranking.sd_tables(matrix, aggregator)

    def produce(self, matrix, arg=None, aggregator='mean'):
        return ranking.rta_ranking_set(matrix, self.tables(matrix, aggregator))

    def plot(self, matrix, ranking_set, outdir, arg=None, aggregator='mean'):
        """One triangle per configuration, in ranking order."""
        tables = self.tables(matrix, aggregator)
        scores = dict(zip(matrix.labels, ranking.rta_scores(matrix, tables)))
        directory = os.path.join(outdir, 'rta')
        paths = []
        for rank, label in enumerate(ranking_set.labels, 1):
            svg = self.triangle(label, rank, matrix.space.names, scores[label])
            paths.append(report.write_text(os.path.join(directory, '%s.svg' % label), svg))
        return paths

    def triangle(self, label, rank, names, scores, size=300):
        cx, cy, radius = size / 2, size / 2 + 15, size * 0.35

        def at(angle, r):
            a = math.radians(angle)
            return cx + r * math.cos(a), cy - r * math.sin(a)

        def polygon(points):
            return ' '.join('%.1f,%.1f' % p for p in points)

        outer = [at(a, radius) for a in ANGLES]
        inner = [at(a, radius * s) for a, s in zip(ANGLES, scores)]
        axes = []
        for (x, y), name, score in zip(outer, names, scores):
            lx, ly = at(ANGLES[len(axes)], radius + 14)
            axes.append({'x': '%.1f' % x, 'y': '%.1f' % y,
                         'lx': '%.1f' % lx, 'ly': '%.1f' % ly,
                         'text': report.escape('R_%s %.2f' % (name, score))})
        area, normalized = ranking.rta(*scores)
        return report.render(TRIANGLE_TEMPLATE, size=size, cx='%.1f' % cx, cy='%.1f' % cy,
                             title=report.escape('%s (rank %d)' % (label, rank)),
                             outer=polygon(outer), inner=polygon(inner), axes=axes,
                             foot_y=size - 8, area='%.4f' % area,
                             normalized='%.4f' % normalized)
