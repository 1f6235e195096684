"""
Row partitioning of relational tables.

    HP   horizontal: row i goes to partition i mod n
    SBP  subject based: FNV-1a 64 hash of the subject column, mod n
    PBP  predicate based: FNV-1a 64 hash of the predicate column, mod n

A table with no predicate column (VP, ExtVP and WPT tables) holds a single
predicate or a whole subject row, so under PBP it is keyed by its own name
and lands in one partition.
"""

import logging
from dataclasses import dataclass

logger = logging.getLogger('pyBenchRank.partition')

TECHNIQUES = ('HP', 'SBP', 'PBP')

FNV_OFFSET = 0xcbf29ce484222325
FNV_PRIME = 0x100000001b3
MASK64 = (1 << 64) - 1

DEFAULT_KEYS = {'SBP': 's', 'PBP': 'p'}


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class PlanError(Error):
    pass


def fnv1a_64(data):
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


@dataclass(frozen=True)
class PartitionPlan:
    technique: str
    n: int = 1
    key_column: str = None

    def __post_init__(self):
        if self.technique not in TECHNIQUES:
            raise PlanError('unknown partitioning technique %r' % self.technique)
        if self.n < 1:
            raise PlanError('partition count must be at least 1')

    @classmethod
    def for_table(cls, technique, n, table):
        """
        Plan for 'table' using the default key column of the technique.
        PBP falls back to keying by table name when there is no 'p' column.
        """
        key = DEFAULT_KEYS.get(technique)
        if technique == 'PBP' and key not in table.columns:
            key = None
        return cls(technique, n, key)


@dataclass
class PartitionedTable:
    name: str
    columns: tuple
    partitions: list            # partitions[k] is the row list of partition k

    @property
    def n(self):
        return len(self.partitions)

    def sizes(self):
        return [len(p) for p in self.partitions]

    def rows(self):
        return [row for part in self.partitions for row in part]


def bucket(value, n):
    data = b'' if value is None else str(value).encode('utf-8')
    return fnv1a_64(data) % n

def partition(table, plan):
    parts = [[] for _ in range(plan.n)]
    if plan.technique == 'HP':
        for i, row in enumerate(table.rows):
            parts[i % plan.n].append(row)
    elif plan.key_column is None:
        if plan.technique != 'PBP':
            raise PlanError('%s needs a key column' % plan.technique)
        parts[bucket(table.name, plan.n)].extend(table.rows)
    else:
        if plan.key_column not in table.columns:
            raise PlanError('table %s has no column %r to partition on'
                            % (table.name, plan.key_column))
        idx = table.columns.index(plan.key_column)
        for row in table.rows:
            parts[bucket(row[idx], plan.n)].append(row)

    logger.debug('%s %s: sizes %s', table.name, plan.technique,
                 [len(p) for p in parts])
    return PartitionedTable(table.name, tuple(table.columns), parts)
