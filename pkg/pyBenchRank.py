#!/usr/bin/env python3

import argparse
import logging
import platform
import sys

import commands
import config
import configspace
import evaluation
import microsql
import ntriples
import partition
import ranking
import results
import schemagen
import storage
import workload

if sys.version_info < (3, 7):
    print('ERROR: pyBenchRank requires Python >= 3.7.\n')
    sys.exit(1)

# errors reported as a message and a nonzero exit instead of a traceback
KNOWN_ERRORS = tuple(m.Error for m in (commands, configspace, evaluation, microsql, ntriples,
                                       partition, ranking, results, schemagen, storage,
                                       workload))

def exceptionLogger(*args):
    sys.excepthook = sys.__excepthook__
    logging.getLogger('pyBenchRank').critical('Exception in pyBenchRank', exc_info=args)

def build_parser():
    parser = argparse.ArgumentParser(
        prog='pyBenchRank',
        description='Rank the configurations of an RDF relational benchmark.')
    parser.add_argument('-c', '--config', help='YAML configuration file')
    parser.add_argument('--out', default='out', help='output directory')
    parser.add_argument('--seed', type=int, default=None,
                        help='recorded in the run manifest; no criterion is random yet')
    parser.add_argument('--discard-first', action='store_true',
                        help='leave run 1 out of every runtime average')
    parser.add_argument('--version', action='version',
                        version='pyBenchRank ' + commands.BENCHRANK_VERSION)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('prepare', help='generate, partition and store every configuration')
    p.add_argument('input', help='N-Triples file (optionally gzipped)')

    p = sub.add_parser('run', help='time the workload on the prepared data')
    p.add_argument('workload', help='workload YAML file')
    p.add_argument('--data', help='prepared data directory (default: --out)')
    p.add_argument('--log', required=True, help='log CSV to write')

    p = sub.add_parser('ingest', help='validate a log and write the result matrix')
    p.add_argument('log')

    p = sub.add_parser('rank', help='rank configurations with one or more criteria')
    p.add_argument('log')
    p.add_argument('--criteria', nargs='+', default=['sd', 'pareto_q', 'pareto_agg', 'rta'],
                   help='criterion names, e.g. sd:schema pareto_q rta')
    p.add_argument('-k', type=int, default=None, help='top-k size')

    p = sub.add_parser('evaluate', help='conformance and coherence of the criteria')
    p.add_argument('logs', nargs='+', help='one log, or several logs to compare for coherence')
    p.add_argument('--criteria', nargs='+', default=['sd', 'pareto_q', 'pareto_agg', 'rta'])
    p.add_argument('-k', type=int, default=None)
    p.add_argument('--bottom', type=int, default=None, help='bottom-h size')
    p.add_argument('--mode', choices=('pairwise', 'positional'), default=None,
                   help='coherence mode')

    p = sub.add_parser('replicability', help='how often option A beats option B')
    p.add_argument('log')
    p.add_argument('option_a')
    p.add_argument('option_b')
    p.add_argument('--dim', default='schema')
    p.add_argument('--group-by', default='partition')

    p = sub.add_parser('report', help='full markdown report with charts')
    p.add_argument('log')
    p.add_argument('--criteria', nargs='+', default=None)
    return parser

def dispatch(args, opts):
    if args.command == 'prepare':
        return commands.cmd_prepare(opts, args.input)
    if args.command == 'run':
        return commands.cmd_run(opts, args.workload, args.data or opts.out, args.log)
    if args.command == 'ingest':
        return commands.cmd_ingest(opts, args.log)
    if args.command == 'rank':
        return commands.cmd_rank(opts, args.log, args.criteria, args.k)
    if args.command == 'evaluate':
        return commands.cmd_evaluate(opts, args.logs, args.criteria, args.k,
                                     args.bottom, args.mode)
    if args.command == 'replicability':
        return commands.cmd_replicability(opts, args.log, args.option_a, args.option_b,
                                          args.dim, args.group_by)
    return commands.cmd_report(opts, args.log, args.criteria)

def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            config.load(args.config)
        else:
            config.reset()
    except config.Error as e:
        logging.basicConfig()
        logging.getLogger('pyBenchRank').error('%s', e)
        return commands.EXIT_USAGE
    config.init_logging()
    sys.excepthook = exceptionLogger

    logger = logging.getLogger('pyBenchRank')
    logger.debug('Python: ' + platform.python_version())
    logger.debug('System: ' + platform.platform())

    opts = commands.Options(args.out, args.seed, args.discard_first)
    try:
        return dispatch(args, opts)
    except config.Error as e:
        logger.error('configuration: %s', e)
        return commands.EXIT_USAGE
    except KNOWN_ERRORS as e:
        logger.error('%s', e)
        return commands.EXIT_FAILED

if __name__ == '__main__':
    sys.exit(main())
