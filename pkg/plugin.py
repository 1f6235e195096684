import logging
import os

import ranking

CRITERIA = ('sd', 'pareto_q', 'pareto_agg', 'rta')

def split_name(name):
    """'sd:schema' -> ('sd', 'schema'), 'rta' -> ('rta', None)"""
    base, _, arg = str(name).partition(':')
    return base.strip().lower(), (arg.strip() or None)

def GetPlugin(name):
    """
    Get the criterion instance for a name like 'pareto_q' or 'sd:schema'
    (the part after the colon is handed to the criterion when it runs).
    """
    base, _ = split_name(name)
    if base not in CRITERIA:
        logging.getLogger('pyBenchRank.plugin').error(
            'Error no %s criterion exists. Known criteria: %s', base, ', '.join(CRITERIA))
        raise ranking.CriterionError('unknown criterion %r' % name)
    module_name = '.'.join(['plugins', base, base])
    module = __import__(module_name, globals(), locals(), base)
    return getattr(module, module.CLASS_NAME)()

def expand(names, space):
    """
    Criterion names with a bare 'sd' expanded to one 'sd:<dimension>'
    per dimension of 'space'.
    """
    out = []
    for name in names:
        base, arg = split_name(name)
        if base == 'sd' and arg is None:
            out.extend('sd:%s' % d for d in space.names)
        else:
            out.append(name if arg is None else '%s:%s' % (base, arg))
    return out


class Criterion(object):
    """
    Criterion derived classes are singletons. Calling the constructor
    always returns the same instance.

    Derived classes must not have an __init__ method, instead create
    an init method (so it is only called when the initial instance is
    created by __new__).
    """

    NAME = ''

    def __new__(cls, *args, **kwds):
        it = cls.__dict__.get('__it__')
        if it is not None:
            return it
        cls.__it__ = it = object.__new__(cls)
        it.init(*args, **kwds)
        return it

    def init(self):
        self.logger = logging.getLogger('pyBenchRank.plugin')

    def title(self, arg=None):
        return self.NAME if arg is None else '%s:%s' % (self.NAME, arg)

    def check(self, matrix, arg=None):
        """Raise CriterionError when the criterion cannot rank 'matrix'."""
        pass

    def produce(self, matrix, arg=None, aggregator='mean'):
        raise NotImplementedError

    def plot(self, matrix, ranking_set, outdir, arg=None, aggregator='mean'):
        """Write the criterion's chart and data files; return their paths."""
        return []

    def output_stem(self, outdir, arg=None):
        return os.path.join(outdir, self.title(arg).replace(':', '_'))
