import os

import ranking
import report
from plugin import Criterion

SCRIPTDIR = os.path.dirname(__file__)

CLASS_NAME = 'Sd'

# Preload the templates
tname = os.path.join(SCRIPTDIR, 'templates', 'bars.tmpl')
BARS_TEMPLATE = open(tname, 'rb').read().decode('utf-8')

class Sd(Criterion):
    NAME = 'sd'

    def check(self, matrix, arg=None):
        if arg is None:
            raise ranking.CriterionError('sd needs a dimension, as in sd:schema')
        if not matrix.space.has_dimension(arg):
            raise ranking.CriterionError('dimension %s is not part of the space' % arg)

    def scores(self, matrix, arg, aggregator='mean'):
        self.check(matrix, arg)
        return ranking.sd_scores(matrix, arg, aggregator)

    def produce(self, matrix, arg=None, aggregator='mean'):
        table = self.scores(matrix, arg, aggregator)
        return ranking.sd_ranking_set(matrix, arg, aggregator, table=table)

    def plot(self, matrix, ranking_set, outdir, arg=None, aggregator='mean'):
        table = self.scores(matrix, arg, aggregator)
        stem = self.output_stem(outdir, arg)
        csv_path = stem + '_scores.csv'
        ranking.write_sd_csv(table, csv_path)
        svg_path = report.write_text(stem + '.svg', self.bars(table))
        return [csv_path, svg_path]

    def bars(self, table, width=480, height=320):
        """One bar per option, height proportional to its rank score."""
        left, right, top, bottom = 50, width - 20, 40, height - 50
        slot = (right - left) / table.d
        scale = bottom - top
        bars = []
        for o, option in enumerate(table.ranked_options()):
            score = table.score_of(option)
            x = left + o * slot + slot * 0.15
            bars.append({'x': '%.1f' % x, 'w': '%.1f' % (slot * 0.7),
                         'y': '%.1f' % (bottom - score * scale),
                         'h': '%.1f' % (score * scale),
                         'cx': '%.1f' % (x + slot * 0.35),
                         'fill': report.color(o),
                         'option': report.escape(option),
                         'score': '%.2f' % score})
        ticks = [{'y': '%.1f' % (bottom - v * scale), 'ty': '%.1f' % (bottom - v * scale + 3),
                  'text': '%.2f' % v} for v in (0.0, 0.25, 0.5, 0.75, 1.0)]
        return report.render(BARS_TEMPLATE, width=width, height=height,
                             title=report.escape('Rank scores of %s' % table.dimension),
                             left=left, right=right, bottom=bottom,
                             tick_x=left - 4, label_y=bottom + 16,
                             mid=(left + right) // 2, bars=bars, ticks=ticks)
