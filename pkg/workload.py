"""
Query workloads, the timing loop and the runtime log files it produces.

A workload file maps query ids to the SQL text of each schema option:

    queries:
      Q1:
        st: "SELECT ..."
        vp: "SELECT ..."
      Q2: "SELECT ..."          # same text for every schema option

Log files are CSV with the header dataset,config,query,run,runtime_ms.
"""

import csv
import logging
import math
import os
from dataclasses import dataclass, field

import yaml

import configspace
import microsql
import storage

logger = logging.getLogger('pyBenchRank.workload')

LOG_HEADER = ('dataset', 'config', 'query', 'run', 'runtime_ms')
ANY_SCHEMA = '*'


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class WorkloadError(Error):
    pass

class LogIngestError(Error):
    def __init__(self, row, reason):
        Error.__init__(self, 'row %d: %s' % (row, reason))
        self.row = row
        self.reason = reason


@dataclass(frozen=True)
class LogRecord:
    dataset: str
    config: str
    query: str
    run: int
    runtime_ms: float

    def __post_init__(self):
        if not self.runtime_ms > 0:
            raise ValueError('runtime_ms must be positive')
        if self.run < 1:
            raise ValueError('run index starts at 1')


@dataclass
class Workload:
    dataset: str
    queries: dict               # (query id, schema option or '*') -> SQL text
    runs: int = 5
    query_ids: list = field(default_factory=list)

    def __post_init__(self):
        if not self.query_ids:
            seen = []
            for qid, _ in self.queries:
                if qid not in seen:
                    seen.append(qid)
            self.query_ids = seen

    def sql_for(self, qid, schema_option=None):
        if schema_option is not None:
            for key in ((qid, schema_option), (qid, str(schema_option).lower())):
                if key in self.queries:
                    return self.queries[key]
        if (qid, ANY_SCHEMA) in self.queries:
            return self.queries[(qid, ANY_SCHEMA)]
        raise WorkloadError('no SQL for query %s under schema %s' % (qid, schema_option))

    def validate(self, space, schema_dim=None):
        """Every query id needs SQL for every schema option of 'space'."""
        options = space.dimension(schema_dim).options if schema_dim else (None,)
        missing = []
        for qid in self.query_ids:
            for opt in options:
                try:
                    self.sql_for(qid, opt)
                except WorkloadError:
                    missing.append('%s/%s' % (qid, opt))
        if missing:
            raise WorkloadError('workload has no SQL for %s' % ', '.join(missing))


def load_workload(path, dataset, runs=5, query_ids=None):
    """
    Read a workload file. 'query_ids' restricts (and orders) the queries;
    ids it names that the file lacks are an error.
    """
    try:
        with open(path, encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise WorkloadError('%s: %s' % (path, e))
    section = data.get('queries') if isinstance(data, dict) else None
    if not isinstance(section, dict):
        raise WorkloadError('%s: expected a "queries" mapping' % path)

    queries = {}
    order = []
    for qid, body in section.items():
        qid = str(qid)
        order.append(qid)
        if isinstance(body, str):
            queries[(qid, ANY_SCHEMA)] = body
        elif isinstance(body, dict):
            for opt, sql in body.items():
                queries[(qid, str(opt))] = str(sql)
        else:
            raise WorkloadError('%s: query %s must be SQL text or a schema mapping'
                                % (path, qid))

    if query_ids is not None:
        absent = [q for q in query_ids if q not in order]
        if absent:
            raise WorkloadError('%s: queries %s not defined' % (path, ', '.join(absent)))
        order = list(query_ids)
        queries = {k: v for k, v in queries.items() if k[0] in order}
    return Workload(dataset, queries, runs, order)


@dataclass
class RunOutcome:
    records: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)          # label -> message
    row_counts: dict = field(default_factory=dict)      # (label, query) -> rows

    @property
    def failed(self):
        return sorted(self.errors)


def run_workload(workload, space, manifests, schema_dim=None, log_path=None,
                 progress=None, declared=None):
    """
    Time every query of 'workload' on every configuration of 'space'.

    Configurations are labelled in 'declared', the space 'space' was
    filtered from, when given. 'manifests' maps those labels to a
    StorageManifest or to the directory holding one. Each (configuration, query) is parsed once and
    executed workload.runs times, serially; records come out in
    (configuration, query, run) order. A configuration that fails is
    recorded in the outcome's errors and the rest carry on.
    """
    outcome = RunOutcome()
    writer = LogWriter(log_path) if log_path else None
    try:
        for cfg in space.enumerate():
            label = configspace.declared_label(space, declared, cfg)
            schema_opt = space.option_of(cfg, schema_dim) if schema_dim else None
            try:
                records = _run_configuration(workload, label, schema_opt,
                                             manifests.get(label), outcome)
            except (Error, microsql.Error, storage.Error) as e:
                logger.error('%s: %s', label, e)
                outcome.errors[label] = str(e)
                continue
            outcome.records.extend(records)
            if writer:
                writer.write(records)
            if progress:
                progress(label, len(records))
    finally:
        if writer:
            writer.close()
    return outcome

def _run_configuration(workload, label, schema_opt, manifest, outcome):
    if manifest is None:
        raise WorkloadError('no prepared data for %s' % label)
    if not isinstance(manifest, storage.StorageManifest):
        manifest = storage.load_manifest(manifest)

    records = []
    for qid in workload.query_ids:
        ast = microsql.parse_sql(workload.sql_for(qid, schema_opt))
        for run in range(1, workload.runs + 1):
            result = microsql.execute(ast, manifest)
            records.append(LogRecord(workload.dataset, label, qid, run,
                                     result.elapsed_ms))
            outcome.row_counts[(label, qid)] = len(result.rows)
        logger.debug('%s %s: %d rows', label, qid, outcome.row_counts[(label, qid)])
    return records


class LogWriter:
    def __init__(self, path):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self.f = open(path, 'w', newline='', encoding='utf-8')
        self.w = csv.writer(self.f, lineterminator='\n')
        self.w.writerow(LOG_HEADER)

    def write(self, records):
        for r in records:
            self.w.writerow((r.dataset, r.config, r.query, r.run,
                             format(r.runtime_ms, '.6f')))
        self.f.flush()

    def close(self):
        self.f.close()

def write_logs(path, records):
    writer = LogWriter(path)
    try:
        writer.write(records)
    finally:
        writer.close()


def ingest_logs(path, space=None, columns=None):
    """
    Read a log file. 'columns' maps the canonical column names to the
    header names used in the file. When 'space' is given every config
    label must decode in it. Error row numbers count data rows from 1.
    """
    columns = columns or {c: c for c in LOG_HEADER}
    try:
        f = open(path, newline='', encoding='utf-8')
    except OSError as e:
        raise WorkloadError('%s: %s' % (path, e.strerror))
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        expected = [columns[c] for c in LOG_HEADER]
        if header is None:
            raise LogIngestError(0, 'empty file, expected header %s' % ','.join(expected))
        if header != expected:
            raise LogIngestError(0, 'header %s, expected %s'
                                 % (','.join(header), ','.join(expected)))
        records = []
        known = set(space.labels()) if space is not None else None
        for row, rec in enumerate(reader, 1):
            records.append(_record(row, rec, known))
    logger.debug('%s: %d log records', path, len(records))
    return records

def _record(row, rec, known):
    if len(rec) != len(LOG_HEADER):
        raise LogIngestError(row, 'expected %d fields, got %d' % (len(LOG_HEADER), len(rec)))
    dataset, label, qid, run, runtime = rec
    if known is not None and label not in known:
        raise LogIngestError(row, 'unknown configuration label %r' % label)
    try:
        run = int(run)
    except ValueError:
        raise LogIngestError(row, 'run %r is not an integer' % run)
    if run < 1:
        raise LogIngestError(row, 'run index %d must be at least 1' % run)
    try:
        runtime = float(runtime)
    except ValueError:
        raise LogIngestError(row, 'runtime_ms %r is not a number' % runtime)
    if not (math.isfinite(runtime) and runtime > 0):
        raise LogIngestError(row, 'runtime_ms must be positive, got %s' % rec[4])
    return LogRecord(dataset, label, qid, run, runtime)
