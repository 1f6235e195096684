"""
Relational layouts of an RDF graph.

    ST     one (s, p, o) table holding every triple
    VP     one (s, o) table per predicate
    WPT    one wide table, a column per predicate, keyed by subject
    ExtVP  VP tables reduced by semi-joins with the other VP tables

ST is generated first; the other layouts are derived from it (ExtVP from
VP). PT is recognised as a schema option but not generated.
"""

import csv
import logging
import re
from dataclasses import dataclass, field

import ntriples

logger = logging.getLogger('pyBenchRank.schemagen')

SCHEMA_KINDS = ('ST', 'VP', 'WPT', 'ExtVP')
JOIN_KINDS = ('SS', 'OS', 'SO', 'OO')
ST_COLUMNS = ('s', 'p', 'o')
VP_COLUMNS = ('s', 'o')

_nonword = re.compile(r'[^0-9A-Za-z]')
EXTVP_PREFIX = 'extvp_'


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class SchemaError(Error):
    pass


@dataclass
class RelTable:
    name: str
    columns: tuple
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise SchemaError('table %s row %d has %d values, expected %d'
                                  % (self.name, i, len(row), width))

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise SchemaError('table %s has no column %r' % (self.name, name))
        return [row[idx] for row in self.rows]

    def non_null_cells(self, exclude=()):
        """Cells holding a value, not counting the columns in 'exclude'."""
        keep = [i for i, c in enumerate(self.columns) if c not in exclude]
        return sum(1 for row in self.rows for i in keep if row[i] is not None)


@dataclass
class SchemaSet:
    schema_kind: str
    tables: dict                        # name -> RelTable, in generation order
    name_manifest: dict                 # predicate IRI -> table or column name
    reductions: dict = field(default_factory=dict)  # ExtVP name -> (p1, p2, kind)

    def __iter__(self):
        return iter(self.tables.values())

    def __len__(self):
        return len(self.tables)

    def __getitem__(self, name):
        return self.tables[name]

    def total_rows(self):
        return sum(len(t) for t in self.tables.values())


@dataclass(frozen=True)
class ExtVpParams:
    join_kinds: tuple = ('SS', 'OS', 'SO')
    selectivity_threshold: float = 1.0

    def __post_init__(self):
        kinds = tuple(k.upper() for k in self.join_kinds)
        object.__setattr__(self, 'join_kinds', kinds)
        if not kinds:
            raise SchemaError('ExtVP needs at least one join kind')
        for k in kinds:
            if k not in JOIN_KINDS:
                raise SchemaError('unknown ExtVP join kind %r' % k)
        if not 0 < self.selectivity_threshold <= 1:
            raise SchemaError('ExtVP selectivity threshold must be in (0, 1]')


def local_name(iri):
    iri = str(iri).strip()
    if iri.startswith('<') and iri.endswith('>'):
        iri = iri[1:-1]
    return re.split(r'[/#]', iri)[-1]


class NameRegistry:
    """
    Hand out sanitized identifiers for IRIs. A name already handed out
    gets a _1, _2, ... suffix, in first-seen order. A name starting with
    one of 'prefixes' gets a leading '_'.
    """

    def __init__(self, reserved=(), prefixes=()):
        self.used = set(reserved)
        self.prefixes = tuple(prefixes)
        self.manifest = {}

    def name_for(self, iri):
        iri = str(iri)
        if iri in self.manifest:
            return self.manifest[iri]
        base = sanitize_name(iri)
        if base.startswith(self.prefixes):
            base = '_' + base
        name = base
        n = 0
        while name in self.used:
            n += 1
            name = '%s_%d' % (base, n)
        self.used.add(name)
        self.manifest[iri] = name
        return name


def sanitize_name(iri):
    """
    Identifier for an IRI: its local name after the last '/' or '#',
    other characters than letters and digits replaced with '_', and a
    '_' prefix if it would start with a digit.
    """
    name = _nonword.sub('_', local_name(iri))
    if not name:
        name = '_'
    if name[0].isdigit():
        name = '_' + name
    return name


def gen_st(triples, name='st'):
    """One row per triple, input order and duplicates kept."""
    rows = []
    for t in triples:
        rows.append(t.cells() if isinstance(t, ntriples.Triple) else tuple(t))
    logger.debug('ST: %d rows', len(rows))
    return RelTable(name, ST_COLUMNS, rows)

def _check_st(st):
    if st.columns != ST_COLUMNS:
        raise SchemaError('expected an (s, p, o) table, got %s' % (st.columns,))

def gen_vp(st, registry=None):
    _check_st(st)
    registry = registry or NameRegistry(prefixes=(EXTVP_PREFIX,))
    groups = {}
    for s, p, o in st.rows:
        groups.setdefault(p, []).append((s, o))

    tables = {}
    for p in sorted(groups):
        name = registry.name_for(p)
        tables[name] = RelTable(name, VP_COLUMNS, groups[p])
    logger.debug('VP: %d tables', len(tables))
    return SchemaSet('VP', tables, dict(registry.manifest))

def gen_wpt(st, registry=None, name='wpt'):
    """
    Wide property table. A subject whose predicates have several objects
    gets as many rows as its largest object list; the k-th row holds the
    k-th object of each predicate (first appearance order) or None.
    """
    _check_st(st)
    registry = registry or NameRegistry(reserved=('s',))
    predicates = sorted({p for _, p, _ in st.rows})
    columns = ['s'] + [registry.name_for(p) for p in predicates]
    slot = {p: i for i, p in enumerate(predicates)}

    subjects = {}
    for s, p, o in st.rows:
        subjects.setdefault(s, [[] for _ in predicates])[slot[p]].append(o)

    rows = []
    for s, values in subjects.items():
        depth = max(len(v) for v in values)
        for k in range(depth):
            rows.append((s,) + tuple(v[k] if k < len(v) else None for v in values))
    logger.debug('WPT: %d rows x %d columns', len(rows), len(columns))
    return RelTable(name, columns, rows)

def _join_key(kind, vp1, vp2):
    """(column of vp1 to test, set of matching values from vp2)"""
    left = 0 if kind[0] == 'S' else 1
    right = 0 if kind[1] == 'S' else 1
    return left, {row[right] for row in vp2.rows}

def gen_extvp(vp, params=None):
    """
    Semi-join reductions ExtVP[p1|p2, kind] of every VP table p1 by every
    other table p2. Only non-empty tables are kept, and when the threshold
    is below 1 only those with |ExtVP| / |VP[p1]| <= threshold.
    """
    params = params or ExtVpParams()
    tables = {}
    reductions = {}
    names = list(vp.tables)
    for kind in params.join_kinds:
        for n1 in names:
            vp1 = vp.tables[n1]
            if not vp1.rows:
                continue
            for n2 in names:
                if n1 == n2 and kind in ('SS', 'OO'):
                    continue
                col, keys = _join_key(kind, vp1, vp.tables[n2])
                rows = [row for row in vp1.rows if row[col] in keys]
                if not rows:
                    continue
                if (params.selectivity_threshold < 1 and
                        len(rows) / len(vp1.rows) > params.selectivity_threshold):
                    continue
                name = extvp_name(n1, n2, kind)
                tables[name] = RelTable(name, VP_COLUMNS, rows)
                reductions[name] = (n1, n2, kind)
    logger.debug('ExtVP: %d tables kept', len(tables))
    return SchemaSet('ExtVP', tables, dict(vp.name_manifest), reductions)

def extvp_name(vp1, vp2, kind):
    return '%s%s__%s__%s' % (EXTVP_PREFIX, kind.lower(), vp1, vp2)


def build_schema(kind, st, extvp_params=None):
    """
    SchemaSet of layout 'kind' for an ST table. The ExtVP layout carries
    its VP tables too, so queries can fall back to them where no
    reduction was materialized.
    """
    if kind == 'ST':
        return SchemaSet('ST', {st.name: st}, {})
    if kind == 'VP':
        return gen_vp(st)
    if kind == 'WPT':
        registry = NameRegistry(reserved=('s',))
        table = gen_wpt(st, registry)
        return SchemaSet('WPT', {table.name: table}, dict(registry.manifest))
    if kind == 'ExtVP':
        vp = gen_vp(st)
        ext = gen_extvp(vp, extvp_params)
        tables = dict(vp.tables)
        for name, table in ext.tables.items():
            if name in tables:
                raise SchemaError('ExtVP table %s clashes with a VP table' % name)
            tables[name] = table
        return SchemaSet('ExtVP', tables, vp.name_manifest, ext.reductions)
    if kind == 'PT':
        raise SchemaError('PT generation unsupported')
    raise SchemaError('unknown schema kind %r' % kind)


def write_manifest(path, manifest):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(('iri', 'table_name'))
        for iri, name in manifest.items():
            w.writerow((iri, name))

def read_manifest(path):
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ['iri', 'table_name']:
            raise SchemaError('%s: bad name manifest header' % path)
        return {iri: name for iri, name in reader}
