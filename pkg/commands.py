"""
The sub-commands of pyBenchRank.py. Every cmd_* function works on the
loaded configuration (see config.py) and returns the process exit code.
"""

import csv
import datetime
import logging
import os
from dataclasses import dataclass, field

import pytz
import yaml
from tzlocal import get_localzone

import config
import configspace
import evaluation
import ntriples
import partition
import plugin
import ranking
import report
import results
import schemagen
import storage
import workload

logger = logging.getLogger('pyBenchRank.commands')

BENCHRANK_VERSION = '1.0.0'
RUN_MANIFEST = 'run_manifest.yaml'
NAME_MANIFEST = 'names.csv'
NO_PARTITIONING = 'none'

EXIT_OK = 0
EXIT_FAILED = 1     # at least one stage or configuration failed
EXIT_USAGE = 2      # bad configuration or arguments


class Error(Exception):
    """Base class for exceptions in this module."""
    pass


@dataclass
class RunManifest:
    config_path: str
    dataset: str
    version: str = BENCHRANK_VERSION
    timestamp: datetime.datetime = None
    seed: int = None
    stages: dict = field(default_factory=dict)     # stage -> output path

    def __post_init__(self):
        if self.timestamp is None:
            self.timestamp = datetime.datetime.now(pytz.utc)

    def local_time(self):
        return self.timestamp.astimezone(get_localzone())

    def record(self, stage, path):
        if not os.path.exists(path):
            raise Error('%s output %s does not exist' % (stage, path))
        self.stages[stage] = path

    def save(self, directory):
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, RUN_MANIFEST)
        data = {'config': self.config_path, 'dataset': self.dataset,
                'version': self.version, 'seed': self.seed,
                'timestamp': self.timestamp.strftime('%Y-%m-%dT%H:%M:%SZ'),
                'stages': dict(sorted(self.stages.items()))}
        with open(path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(data, f, default_flow_style=False)
        logger.info('%s written at %s', path, self.local_time().strftime('%Y-%m-%d %H:%M:%S %Z'))
        return path

    @classmethod
    def load(cls, directory):
        with open(os.path.join(directory, RUN_MANIFEST), encoding='utf-8') as f:
            data = yaml.safe_load(f)
        stamp = datetime.datetime.strptime(data['timestamp'], '%Y-%m-%dT%H:%M:%SZ')
        return cls(data['config'], data['dataset'], data['version'],
                   pytz.utc.localize(stamp), data.get('seed'), data.get('stages') or {})


class Options:
    """Global command line flags shared by the sub-commands."""

    def __init__(self, out='out', seed=None, discard_first=False):
        self.out = out
        self.seed = seed
        self.discard_first = discard_first

    def manifest(self, directory=None):
        """The run manifest kept in 'directory', or a new one."""
        if directory and os.path.exists(os.path.join(directory, RUN_MANIFEST)):
            run = RunManifest.load(directory)
            run.timestamp = datetime.datetime.now(pytz.utc)
            return run
        return RunManifest(config.configs_found[-1] if config.configs_found else '',
                           config.get_dataset(), seed=self.seed)


#
# Data preparation
#

def roles(space):
    """(schema, partition, storage) dimension names of 'space', None if absent."""
    return tuple(config.get_role(space, r) for r in ('schema', 'partition', 'storage'))

def config_dir(root, dataset, space, cfg):
    """
    <root>/<dataset>/<schema>/<partitioning or none>/<storage>[/<other options>...]
    """
    schema_dim, part_dim, store_dim = roles(space)
    parts = [root, dataset,
             space.option_of(cfg, schema_dim) if schema_dim else 'st',
             space.option_of(cfg, part_dim) if part_dim else NO_PARTITIONING,
             space.option_of(cfg, store_dim) if store_dim else 'csv']
    for name in space.names:
        if name not in (schema_dim, part_dim, store_dim):
            parts.append(space.option_of(cfg, name))
    return os.path.join(*parts)

def prepared_dirs(root, dataset, space, declared=None):
    """Prepared directory per configuration label (labels of 'declared' when given)."""
    return {configspace.declared_label(space, declared, cfg):
            config_dir(root, dataset, space, cfg)
            for cfg in space.enumerate()}

def log_space(space, declared):
    """
    The space log labels are written in: the declared space, unless the
    filters removed whole dimensions.
    """
    return declared if space.names == declared.names else space


def prepare_configuration(st, space, cfg, directory, schemas):
    """
    Generate, partition and store the tables of one configuration.
    'schemas' caches SchemaSets (or the error they raised) per schema kind.
    """
    schema_dim, part_dim, store_dim = roles(space)
    kind = config.get_schema_kind(space.option_of(cfg, schema_dim)) if schema_dim else 'ST'
    technique = config.get_partition_kind(space.option_of(cfg, part_dim)) if part_dim else None
    fmt = config.get_storage_format(space.option_of(cfg, store_dim)) if store_dim else 'rows-csv'

    if kind not in schemas:
        kinds, threshold = config.get_extvp()
        try:
            schemas[kind] = schemagen.build_schema(kind, st,
                                                   schemagen.ExtVpParams(kinds, threshold))
        except schemagen.Error as e:
            schemas[kind] = e
    schema = schemas[kind]
    if isinstance(schema, Exception):
        raise schema

    os.makedirs(directory, exist_ok=True)
    manifest = storage.StorageManifest(directory)
    n = config.get_partition_count()
    for table in schema:
        if technique is None:
            plan = partition.PartitionPlan('HP', 1)
        else:
            plan = partition.PartitionPlan.for_table(technique, n, table)
        storage.write(partition.partition(table, plan), fmt, directory, manifest)
    storage.save_manifest(manifest)
    schemagen.write_manifest(os.path.join(directory, NAME_MANIFEST), schema.name_manifest)
    return manifest

def cmd_prepare(opts, input_path):
    space = config.get_filtered_space()
    dataset = config.get_dataset()
    run = opts.manifest(os.path.join(opts.out, dataset))

    triples, stats = ntriples.read_file(input_path, config.get_parse_mode())
    if not triples:
        logger.warning('%s holds no triples; tables will be empty', input_path)
    st = schemagen.gen_st(triples)

    declared = config.get_space()
    schemas = {}
    failed = {}
    for cfg in space.enumerate():
        label = configspace.declared_label(space, declared, cfg)
        directory = config_dir(opts.out, dataset, space, cfg)
        try:
            manifest = prepare_configuration(st, space, cfg, directory, schemas)
        except (config.Error, schemagen.Error, partition.Error, storage.Error) as e:
            logger.error('%s: %s', label, e)
            failed[label] = str(e)
            continue
        logger.info('%s: %d tables, %d rows in %s', label, len(manifest.entries),
                    sum(e.rows for e in manifest.entries.values()), directory)

    logger.info('%d triples parsed, %d lines skipped', stats.triples_parsed, stats.lines_skipped)
    run.stages['prepare'] = os.path.join(opts.out, dataset)
    run.save(os.path.join(opts.out, dataset))
    if failed:
        logger.error('%d of %d configurations failed: %s', len(failed), space.size,
                     ', '.join(sorted(failed)))
        return EXIT_FAILED
    return EXIT_OK


#
# Workload runs and logs
#

def cmd_run(opts, workload_path, data_dir, log_path):
    space = config.get_filtered_space()
    dataset = config.get_dataset()
    queries = config.get_queries() or None
    wl = workload.load_workload(workload_path, dataset, config.get_runs(), queries)
    if queries is None:
        excluded = {str(q) for q in config.get_excluded_queries()}
        wl.query_ids = [q for q in wl.query_ids if q not in excluded]
    schema_dim = roles(space)[0]
    wl.validate(space, schema_dim)

    declared = config.get_space()
    outcome = workload.run_workload(
        wl, space, prepared_dirs(data_dir, dataset, space, declared), schema_dim, log_path,
        progress=lambda label, count: logger.info('%s: %d runs timed', label, count),
        declared=declared)

    run = opts.manifest(os.path.dirname(log_path) or '.')
    run.record('run', log_path)
    run.save(os.path.dirname(log_path) or '.')
    if outcome.errors:
        logger.error('%d of %d configurations failed: %s', len(outcome.errors), space.size,
                     ', '.join(outcome.failed))
        return EXIT_FAILED
    return EXIT_OK


def load_logs(log_path, space):
    return workload.ingest_logs(log_path, space, config.get_log_columns())

def load_matrix(opts, log_path, space=None):
    """
    Ingest, aggregate and drop excluded queries. Log labels are read in
    the declared space, so a log covering every declared configuration
    can be ranked on the filtered subset with its original labels.
    """
    space = space or config.get_filtered_space()
    declared = log_space(space, config.get_space())
    logs = load_logs(log_path, declared)
    if not logs:
        raise Error('%s holds no log records' % log_path)
    queries = config.get_queries() or None
    matrix = results.aggregate(logs, space, queries, opts.discard_first, config.get('dataset'),
                               declared)
    return matrix.drop_queries(config.get_excluded_queries())

def cmd_ingest(opts, log_path):
    matrix = load_matrix(opts, log_path)
    per_query = results.per_query_rankings(matrix)
    os.makedirs(opts.out, exist_ok=True)
    results.write_matrix_csv(matrix, os.path.join(opts.out, 'matrix.csv'))
    results.write_query_ranks_csv(matrix, per_query, os.path.join(opts.out, 'query_ranks.csv'))
    report.write_text(os.path.join(opts.out, 'query_ranks.md'),
                      report.query_ranks_table(matrix, per_query))
    logger.info('%s: %d configurations x %d queries', log_path, len(matrix), matrix.query_count)
    return EXIT_OK


#
# Ranking and evaluation
#

def produce_rankings(matrix, names, k=None):
    """
    RankingSets of the named criteria, in order. A criterion that cannot
    rank this space is skipped with its reason when several are asked
    for and raises when it is the only one.
    """
    names = plugin.expand(names, matrix.space)
    aggregator = config.get_aggregator()
    produced = {}
    skipped = {}
    for name in names:
        _, arg = plugin.split_name(name)
        criterion = plugin.GetPlugin(name)
        title = criterion.title(arg)
        try:
            criterion.check(matrix, arg)
            rs = criterion.produce(matrix, arg, aggregator)
            if k is not None:
                ranking.top_k(rs, k)
        except ranking.CriterionError as e:
            if len(names) == 1:
                raise
            logger.warning('%s skipped: %s', title, e)
            skipped[title] = str(e)
            continue
        produced[title] = (criterion, arg, rs)
    return produced, skipped

def cmd_rank(opts, log_path, criteria, k=None):
    k = k or config.get_top_k()
    matrix = load_matrix(opts, log_path)
    produced, skipped = produce_rankings(matrix, criteria, k)
    os.makedirs(opts.out, exist_ok=True)
    aggregator = config.get_aggregator()

    top = {}
    for title, (criterion, arg, rs) in produced.items():
        stem = criterion.output_stem(opts.out, arg)
        ranking.write_ranking_csv(rs, stem + '.csv')
        top[title] = ranking.top_k(rs, k)
        report.write_text(stem + '.md', report.topk_table({title: top[title]}, k))
        for path in criterion.plot(matrix, rs, opts.out, arg, aggregator):
            logger.debug('%s: %s', title, path)
        logger.info('%s: top-%d %s', title, k, ', '.join(top[title].labels))
    report.write_text(os.path.join(opts.out, 'topk.md'),
                      report.topk_table(top, k, skipped=skipped))
    return EXIT_OK if produced else EXIT_FAILED


def evaluate_rows(matrix, other, criteria, k, h, mode):
    """(criterion, conformance, coherence) per criterion; coherence needs 'other'."""
    produced, _ = produce_rankings(matrix, criteria, k)
    theirs = produce_rankings(other, criteria, k)[0] if other is not None else {}
    rows = []
    for title, (_, _, rs) in produced.items():
        conf = evaluation.conformance(rs, matrix, k, h)
        coh = None
        if title in theirs:
            coh = evaluation.coherence(ranking.top_k(rs, k), ranking.top_k(theirs[title][2], k),
                                       mode)
        rows.append((title, conf, coh))
    return rows

def coherence_matrices(matrices, criteria, k, mode):
    """
    Per criterion, an N x N list of coherence values between the top-k of
    every ordered pair of matrices. The diagonal and pairs where either
    side could not rank are None.
    """
    tops = []
    for m in matrices:
        produced, _ = produce_rankings(m, criteria, k)
        tops.append({title: ranking.top_k(rs, k) for title, (_, _, rs) in produced.items()})
    titles = []
    for top in tops:
        titles.extend(t for t in top if t not in titles)

    result = {}
    n = len(matrices)
    for title in titles:
        grid = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i != j and title in tops[i] and title in tops[j]:
                    grid[i][j] = evaluation.coherence(tops[i][title], tops[j][title], mode)
        result[title] = grid
    return result

def cmd_evaluate(opts, log_paths, criteria, k=None, h=None, mode=None):
    """
    Conformance of every criterion on the first log. With more logs,
    coherence between every pair of them; metrics.csv carries the value
    for the first two.
    """
    k = k or config.get_top_k()
    h = h or config.get_bottom_h()
    mode = mode or config.get_coherence_mode()
    space = config.get_filtered_space()
    matrices = [load_matrix(opts, path, space) for path in log_paths]
    matrix = matrices[0]
    for path, other in zip(log_paths[1:], matrices[1:]):
        if set(other.labels) != set(matrix.labels) or other.space != matrix.space:
            raise Error('%s and %s cover different configuration spaces'
                        % (log_paths[0], path))

    other = matrices[1] if len(matrices) > 1 else None
    rows = evaluate_rows(matrix, other, criteria, k, h, mode)
    os.makedirs(opts.out, exist_ok=True)
    with open(os.path.join(opts.out, 'metrics.csv'), 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(('criterion', 'conformance', 'coherence', 'mode', 'k', 'h'))
        for title, conf, coh in rows:
            w.writerow((title, '%.6f' % conf, '' if coh is None else '%.6f' % coh, mode, k, h))
    report.write_text(os.path.join(opts.out, 'metrics.md'),
                      report.metrics_table(rows, mode, k, h))

    if len(matrices) > 1:
        grids = coherence_matrices(matrices, criteria, k, mode)
        with open(os.path.join(opts.out, 'coherence.csv'), 'w', newline='',
                  encoding='utf-8') as f:
            w = csv.writer(f, lineterminator='\n')
            w.writerow(('criterion', 'from', 'to', 'from_log', 'to_log', 'coherence', 'mode', 'k'))
            for title, grid in grids.items():
                for i, line in enumerate(grid):
                    for j, value in enumerate(line):
                        if i == j:
                            continue
                        w.writerow((title, i + 1, j + 1, log_paths[i], log_paths[j],
                                    '' if value is None else '%.6f' % value, mode, k))
        report.write_text(os.path.join(opts.out, 'coherence.md'),
                          report.coherence_tables(grids, log_paths, mode, k))
        logger.info('coherence of %d criteria over %d logs', len(grids), len(matrices))
    return EXIT_OK


def cmd_replicability(opts, log_path, option_a, option_b, dim, group_by):
    matrix = load_matrix(opts, log_path)
    rep = evaluation.replicability_pair(matrix, option_a, option_b, dim, group_by)
    os.makedirs(opts.out, exist_ok=True)
    stem = os.path.join(opts.out, 'replicability_%s_%s' % (rep.option_a, rep.option_b))
    with open(stem + '.csv', 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow((rep.group_by, 'wins', 'cells', 'percent'))
        for g in rep.groups:
            w.writerow((g.option, g.wins, g.cells, 'NA' if g.percent is None else '%.2f' % g.percent))
    report.write_text(stem + '.md', report.replicability_table([rep]))
    return EXIT_OK


def cmd_report(opts, log_path, criteria=None):
    """
    One markdown report with the per-query rankings, the rank scores of
    every dimension, the top-k of every criterion with its conformance,
    the global ranking of the schema dimension and the impact of every
    dimension on every other, plus the charts behind them.
    """
    criteria = criteria or list(plugin.CRITERIA)
    k, h = config.get_top_k(), config.get_bottom_h()
    aggregator = config.get_aggregator()
    matrix = load_matrix(opts, log_path)
    per_query = results.per_query_rankings(matrix)
    os.makedirs(opts.out, exist_ok=True)

    sections = [report.query_ranks_table(matrix, per_query)]
    for name in matrix.space.names:
        try:
            table = ranking.sd_scores(matrix, name, aggregator)
        except ranking.CriterionError as e:
            logger.warning('no rank scores for %s: %s', name, e)
            continue
        sections.append(report.sd_table(table))

    produced, skipped = produce_rankings(matrix, criteria, k)
    top = {title: ranking.top_k(rs, k) for title, (_, _, rs) in produced.items()}
    conf = {title: evaluation.conformance(rs, per_query, k, h)
            for title, (_, _, rs) in produced.items()}
    sections.append(report.topk_table(top, k, conf, skipped))
    for title, (criterion, arg, rs) in produced.items():
        ranking.write_ranking_csv(rs, criterion.output_stem(opts.out, arg) + '.csv')
        criterion.plot(matrix, rs, opts.out, arg, aggregator)

    schema_dim = roles(matrix.space)[0]
    if schema_dim:
        try:
            columns = evaluation.global_ranking_table(matrix, schema_dim,
                                                      config.get_global_filters(), aggregator)
            sections.append(report.global_table(columns, schema_dim))
        except (evaluation.Error, ranking.Error) as e:
            logger.warning('no global ranking: %s', e)

    for target in matrix.space.names:
        for varying in matrix.space.names:
            if target == varying:
                continue
            rows = evaluation.dimension_impact(matrix, target, varying)
            sections.append(report.impact_table(rows, target, varying))
            report.write_text(os.path.join(opts.out, 'impact_%s_by_%s.svg' % (target, varying)),
                              report.impact_svg(rows, target, varying))

    results.write_matrix_csv(matrix, os.path.join(opts.out, 'matrix.csv'))
    text = report.document('Benchmark ranking report', matrix, sections, BENCHRANK_VERSION,
                           [str(q) for q in config.get_excluded_queries()])
    run = opts.manifest(opts.out)
    run.record('report', report.write_text(os.path.join(opts.out, 'report.md'), text))
    run.save(opts.out)
    return EXIT_OK
