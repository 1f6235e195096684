"""
A small SQL dialect over prepared tables:

    SELECT <col, ... | *> FROM <table> [[AS] alias]
        ([INNER] JOIN <table> [[AS] alias] ON a.x = b.y)*
        [WHERE <col> <op> <literal> (AND <col> <op> <literal>)*]

Keywords are case insensitive, string literals are single quoted with ''
as the escape for a quote, and op is one of = != <> < <= > >=. A numeric
literal compares numerically against cells that parse as numbers.

Execution pushes every filter down to the scan of its table, then joins
left to right with hash joins built on the right input, and projects last.
"""

import logging
import re
import time
from collections import namedtuple
from dataclasses import dataclass

import storage

logger = logging.getLogger('pyBenchRank.microsql')

KEYWORDS = ('SELECT', 'FROM', 'AS', 'JOIN', 'INNER', 'ON', 'WHERE', 'AND')
OPERATORS = ('=', '!=', '<>', '<', '<=', '>', '>=')

_token_re = re.compile(r"""
    (?P<ws>\s+)
  | (?P<string>'(?:[^']|'')*')
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|!=|<>|=|<|>)
  | (?P<punct>[,.*;])
""", re.VERBOSE)


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class SqlSyntaxError(Error):
    def __init__(self, offset, reason):
        Error.__init__(self, 'syntax error at offset %d: %s' % (offset, reason))
        self.offset = offset
        self.reason = reason

class ResolveError(Error):
    pass

class ExecutionError(Error):
    pass


Token = namedtuple('Token', ['kind', 'value', 'offset'])

@dataclass(frozen=True)
class ColumnRef:
    alias: str      # None until resolved when written without a qualifier
    column: str

    def __str__(self):
        return '%s.%s' % (self.alias, self.column) if self.alias else self.column

@dataclass(frozen=True)
class TableRef:
    table: str
    alias: str

@dataclass(frozen=True)
class Join:
    table: TableRef
    left: ColumnRef
    right: ColumnRef

@dataclass(frozen=True)
class Filter:
    column: ColumnRef
    op: str
    value: object   # str or float

@dataclass(frozen=True)
class QueryAst:
    projections: tuple      # of ColumnRef; empty tuple means '*'
    base: TableRef
    joins: tuple = ()
    filters: tuple = ()

    @property
    def star(self):
        return not self.projections

    def table_refs(self):
        return (self.base,) + tuple(j.table for j in self.joins)


Result = namedtuple('Result', ['columns', 'rows', 'elapsed_ms'])


def _tokenize(text):
    tokens = []
    pos = 0
    raw = text.encode('utf-8')
    def boff(i):
        return len(text[:i].encode('utf-8')) if len(raw) != len(text) else i
    while pos < len(text):
        m = _token_re.match(text, pos)
        if not m:
            if text[pos] == "'":
                raise SqlSyntaxError(boff(pos), 'unterminated string literal')
            raise SqlSyntaxError(boff(pos), 'unexpected character %r' % text[pos])
        kind = m.lastgroup
        value = m.group()
        if kind == 'ident' and value.upper() in KEYWORDS:
            kind, value = 'keyword', value.upper()
        elif kind == 'string':
            value = value[1:-1].replace("''", "'")
        elif kind == 'number':
            value = float(value)
        if kind != 'ws':
            tokens.append(Token(kind, value, boff(pos)))
        pos = m.end()
    tokens.append(Token('end', None, boff(len(text))))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, expected):
        tok = self.tok
        got = 'end of input' if tok.kind == 'end' else repr(tok.value)
        raise SqlSyntaxError(tok.offset, 'expected %s, got %s' % (expected, got))

    def accept(self, kind, value=None):
        tok = self.tok
        if tok.kind == kind and (value is None or tok.value == value):
            self.i += 1
            return tok
        return None

    def expect(self, kind, value=None, what=None):
        tok = self.accept(kind, value)
        if tok is None:
            self.fail(what or value or kind)
        return tok

    def column(self):
        first = self.expect('ident', what='column name').value
        if self.accept('punct', '.'):
            return ColumnRef(first, self.expect('ident', what='column name').value)
        return ColumnRef(None, first)

    def table(self):
        name = self.expect('ident', what='table name').value
        alias = name
        if self.accept('keyword', 'AS'):
            alias = self.expect('ident', what='alias').value
        elif self.tok.kind == 'ident':
            alias = self.accept('ident').value
        return TableRef(name, alias)

    def literal(self):
        tok = self.accept('string') or self.accept('number')
        if tok is None:
            self.fail('literal')
        return tok.value

    def query(self):
        self.expect('keyword', 'SELECT')
        projections = []
        if not self.accept('punct', '*'):
            projections.append(self.column())
            while self.accept('punct', ','):
                projections.append(self.column())
        self.expect('keyword', 'FROM')
        base = self.table()

        joins = []
        while self.tok.kind == 'keyword' and self.tok.value in ('JOIN', 'INNER'):
            if self.accept('keyword', 'INNER'):
                self.expect('keyword', 'JOIN')
            else:
                self.expect('keyword', 'JOIN')
            ref = self.table()
            self.expect('keyword', 'ON')
            left = self.column()
            self.expect('op', '=')
            right = self.column()
            joins.append(Join(ref, left, right))

        filters = []
        if self.accept('keyword', 'WHERE'):
            while True:
                col = self.column()
                op = self.expect('op', what='comparison operator').value
                filters.append(Filter(col, '!=' if op == '<>' else op, self.literal()))
                if not self.accept('keyword', 'AND'):
                    break
        self.accept('punct', ';')
        if self.tok.kind != 'end':
            self.fail('end of query')
        return QueryAst(tuple(projections), base, tuple(joins), tuple(filters))


def parse_sql(text):
    return _Parser(text).query()


def resolve(ast, schemas):
    """
    Check 'ast' against {table: columns} and return a copy whose column
    references all carry an alias.
    """
    aliases = {}
    for ref in ast.table_refs():
        if ref.alias in aliases:
            raise ResolveError('alias %s declared twice' % ref.alias)
        if ref.table not in schemas:
            raise ResolveError('unknown table %s' % ref.table)
        aliases[ref.alias] = tuple(schemas[ref.table])

    def fix(col):
        if col.alias is None:
            owners = [a for a, cols in aliases.items() if col.column in cols]
            if len(owners) != 1:
                raise ResolveError('column %s is %s' % (
                    col.column, 'ambiguous' if owners else 'unknown'))
            return ColumnRef(owners[0], col.column)
        if col.alias not in aliases:
            raise ResolveError('unknown alias %s' % col.alias)
        if col.column not in aliases[col.alias]:
            raise ResolveError('unknown column %s' % col)
        return col

    joins = tuple(Join(j.table, fix(j.left), fix(j.right)) for j in ast.joins)
    filters = tuple(Filter(fix(f.column), f.op, f.value) for f in ast.filters)
    return QueryAst(tuple(fix(c) for c in ast.projections), ast.base, joins, filters)


def _compare(cell, op, value):
    if cell is None:
        return False
    if isinstance(value, float):
        try:
            cell = float(cell)
        except ValueError:
            return False
    if op == '=':
        return cell == value
    if op == '!=':
        return cell != value
    if op == '<':
        return cell < value
    if op == '<=':
        return cell <= value
    if op == '>':
        return cell > value
    return cell >= value


class _Source:
    """Table access over a StorageManifest or a {name: RelTable} dict."""

    def __init__(self, source):
        self.source = source

    def columns(self):
        if isinstance(self.source, storage.StorageManifest):
            return {n: e.columns for n, e in self.source.entries.items()}
        return {n: t.columns for n, t in self.source.items()}

    def rows(self, table):
        if isinstance(self.source, storage.StorageManifest):
            return storage.read_table(self.source, table).rows
        return self.source[table].rows


def execute(ast, source):
    """
    Run 'ast' over 'source' (a StorageManifest or a dict of RelTables).
    elapsed_ms covers table reads, scans, joins and projection.
    """
    src = _Source(source)
    ast = resolve(ast, src.columns())
    schemas = src.columns()

    start = time.perf_counter_ns()
    try:
        result = _run(ast, src, schemas)
    except storage.Error as e:
        raise ExecutionError(str(e))
    elapsed = (time.perf_counter_ns() - start) / 1e6
    return Result(result[0], result[1], max(elapsed, 1e-6))

def _scan(ref, ast, src, schemas):
    cols = schemas[ref.table]
    preds = [(cols.index(f.column.column), f.op, f.value)
             for f in ast.filters if f.column.alias == ref.alias]
    rows = src.rows(ref.table)
    if preds:
        rows = [r for r in rows if all(_compare(r[i], op, v) for i, op, v in preds)]
    return rows

def _run(ast, src, schemas):
    layout = {}
    for i, c in enumerate(schemas[ast.base.table]):
        layout[(ast.base.alias, c)] = i
    width = len(schemas[ast.base.table])
    current = [tuple(r) for r in _scan(ast.base, ast, src, schemas)]

    for join in ast.joins:
        ref = join.table
        cols = schemas[ref.table]
        if join.right.alias == ref.alias and join.left.alias != ref.alias:
            outer, inner = join.left, join.right
        elif join.left.alias == ref.alias and join.right.alias != ref.alias:
            outer, inner = join.right, join.left
        else:
            raise ResolveError('join condition %s = %s must link %s to an earlier table'
                               % (join.left, join.right, ref.alias))
        if (outer.alias, outer.column) not in layout:
            raise ResolveError('%s is not available before joining %s' % (outer, ref.alias))

        build = {}
        key = cols.index(inner.column)
        for r in _scan(ref, ast, src, schemas):
            if r[key] is not None:
                build.setdefault(r[key], []).append(tuple(r))
        probe = layout[(outer.alias, outer.column)]
        joined = []
        for row in current:
            for match in build.get(row[probe], ()):
                joined.append(row + match)
        current = joined

        for i, c in enumerate(cols):
            layout[(ref.alias, c)] = width + i
        width += len(cols)

    if ast.star:
        names = ['%s.%s' % (ref.alias, c)
                 for ref in ast.table_refs() for c in schemas[ref.table]]
        return names, current
    picks = [layout[(c.alias, c.column)] for c in ast.projections]
    return [str(c) for c in ast.projections], [tuple(r[i] for i in picks) for r in current]
