import ranking
from plugin import Criterion
from plugins.pareto_q.pareto_q import projections, write_points

CLASS_NAME = 'ParetoAgg'

class ParetoAgg(Criterion):
    NAME = 'pareto_agg'

    def check(self, matrix, arg=None):
        single = [d.name for d in matrix.space.dimensions if len(d) < 2]
        if single:
            raise ranking.CriterionError('pareto_agg cannot score single option dimensions %s'
                                         % ', '.join(single))

    def tables(self, matrix, aggregator):
        self.check(matrix)
        return ranking.sd_tables(matrix, aggregator)

    def produce(self, matrix, arg=None, aggregator='mean'):
        return ranking.pareto_agg(matrix, self.tables(matrix, aggregator))

    def plot(self, matrix, ranking_set, outdir, arg=None, aggregator='mean'):
        result = ranking.pareto_agg_fronts(matrix, self.tables(matrix, aggregator))
        stem = self.output_stem(outdir)
        names = ['R_%s' % n for n in matrix.space.names]
        paths = [write_points(stem + '_points.csv', matrix.labels, names, result)]
        return paths + projections(stem, matrix.labels, names, result, 'rank scores')
