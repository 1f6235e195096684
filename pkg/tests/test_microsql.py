import itertools
import operator
import os
import random
from collections import Counter

import pytest

import microsql
import partition
import schemagen
import storage
import workload
from conftest import SAMPLES
from microsql import ColumnRef, Filter, TableRef


def tables():
    knows = schemagen.RelTable('knows', ('s', 'o'), [
        ('alice', 'bob'), ('bob', 'carol'), ('alice', 'carol'), ('dave', 'alice')])
    name = schemagen.RelTable('name', ('s', 'o'), [
        ('alice', 'Alice'), ('bob', 'Bob'), ('carol', 'Carol')])
    age = schemagen.RelTable('age', ('s', 'o'), [
        ('alice', '31'), ('bob', '7'), ('carol', '27')])
    return {t.name: t for t in (knows, name, age)}


def test_parse_select():
    ast = microsql.parse_sql("select a.s, o FROM knows a WHERE a.o = 'bob' and s <> 'x';")
    assert ast.projections == (ColumnRef('a', 's'), ColumnRef(None, 'o'))
    assert ast.base == TableRef('knows', 'a')
    assert ast.filters == (Filter(ColumnRef('a', 'o'), '=', 'bob'),
                           Filter(ColumnRef(None, 's'), '!=', 'x'))

def test_parse_joins():
    ast = microsql.parse_sql('SELECT * FROM knows AS k INNER JOIN name n ON k.o = n.s '
                             'JOIN age ON age.s = n.s WHERE age.o >= 18')
    assert ast.star
    assert [j.table for j in ast.joins] == [TableRef('name', 'n'), TableRef('age', 'age')]
    assert ast.filters[0].value == 18.0

def test_quote_escape():
    ast = microsql.parse_sql("SELECT s FROM t WHERE o = 'it''s'")
    assert ast.filters[0].value == "it's"

@pytest.mark.parametrize('text, offset', [
    ('SELECT FROM t', 7),
    ('SELECT s t', 9),
    ("SELECT s FROM t WHERE o = 'open", 26),
    ('SELECT s FROM t WHERE o ~ 1', 24),
    ('SELECT s FROM t extra words', 22),
    ('', 0),
])
def test_syntax_errors(text, offset):
    with pytest.raises(microsql.SqlSyntaxError) as info:
        microsql.parse_sql(text)
    assert info.value.offset == offset

def test_offset_counts_bytes():
    with pytest.raises(microsql.SqlSyntaxError) as info:
        microsql.parse_sql("SELECT s FROM t WHERE o = 'é' AND")
    assert info.value.offset == len("SELECT s FROM t WHERE o = 'é' AND".encode('utf-8'))

def test_resolve_errors():
    schemas = {n: t.columns for n, t in tables().items()}
    for text in ('SELECT s FROM nope',
                 'SELECT s FROM knows JOIN name ON knows.o = name.s',
                 'SELECT x FROM knows',
                 'SELECT k.s FROM knows k JOIN name k ON k.o = k.s',
                 'SELECT z.s FROM knows'):
        with pytest.raises(microsql.ResolveError):
            microsql.resolve(microsql.parse_sql(text), schemas)

def test_execute_filter_and_project():
    res = microsql.execute(microsql.parse_sql("SELECT o FROM knows WHERE s = 'alice'"), tables())
    assert res.columns == ['knows.o']
    assert res.rows == [('bob',), ('carol',)]
    assert res.elapsed_ms > 0

def test_execute_numeric_compare():
    res = microsql.execute(microsql.parse_sql('SELECT s FROM age WHERE o > 10'), tables())
    assert sorted(res.rows) == [('alice',), ('carol',)]

def test_execute_join():
    res = microsql.execute(microsql.parse_sql(
        'SELECT k.s, n.o FROM knows k JOIN name n ON k.o = n.s'), tables())
    assert sorted(res.rows) == [('alice', 'Bob'), ('alice', 'Carol'),
                                ('bob', 'Carol'), ('dave', 'Alice')]

def test_join_order_independent_condition():
    res = microsql.execute(microsql.parse_sql(
        'SELECT k.s FROM knows k JOIN name n ON n.s = k.o WHERE n.o = \'Bob\''), tables())
    assert res.rows == [('alice',)]

def nested_loop(data, t1, t2, left_col, right_col):
    a, b = data[t1], data[t2]
    li, ri = a.columns.index(left_col), b.columns.index(right_col)
    return sorted(x + y for x, y in itertools.product(a.rows, b.rows)
                  if x[li] is not None and x[li] == y[ri])

def test_hash_join_matches_nested_loop():
    rnd = random.Random(7)
    for _ in range(20):
        data = {
            'l': schemagen.RelTable('l', ('s', 'o'), [
                ('n%d' % rnd.randrange(6), 'n%d' % rnd.randrange(6)) for _ in range(15)]),
            'r': schemagen.RelTable('r', ('s', 'o'), [
                ('n%d' % rnd.randrange(6), 'v%d' % rnd.randrange(3)) for _ in range(10)]),
        }
        res = microsql.execute(microsql.parse_sql(
            'SELECT * FROM l JOIN r ON l.o = r.s'), data)
        assert res.columns == ['l.s', 'l.o', 'r.s', 'r.o']
        assert sorted(res.rows) == nested_loop(data, 'l', 'r', 'o', 's')

def test_same_answer_from_every_format(tmp_path):
    query = microsql.parse_sql('SELECT k.s, a.o FROM knows k JOIN age a ON k.o = a.s')
    expected = sorted(microsql.execute(query, tables()).rows)
    for fmt in storage.FORMATS:
        manifest = storage.StorageManifest(str(tmp_path / fmt))
        for table in tables().values():
            plan = partition.PartitionPlan.for_table('SBP', 3, table)
            storage.write(partition.partition(table, plan), fmt, manifest.root, manifest)
        assert sorted(microsql.execute(query, manifest).rows) == expected


OPERATORS = {'=': operator.eq, '!=': operator.ne, '<': operator.lt, '<=': operator.le,
             '>': operator.gt, '>=': operator.ge}

def oracle(ast, data):
    """Nested-loop evaluation over every combination of table rows."""
    ast = microsql.resolve(ast, {n: t.columns for n, t in data.items()})
    refs = ast.table_refs()
    columns = {ref.alias: data[ref.table].columns for ref in refs}

    def get(env, col):
        return env[col.alias][columns[col.alias].index(col.column)]

    def holds(cell, f):
        if cell is None:
            return False
        if isinstance(f.value, float):
            try:
                cell = float(cell)
            except ValueError:
                return False
        return OPERATORS[f.op](cell, f.value)

    out = Counter()
    for combo in itertools.product(*(data[ref.table].rows for ref in refs)):
        env = {ref.alias: row for ref, row in zip(refs, combo)}
        if not all(get(env, j.left) is not None and get(env, j.left) == get(env, j.right)
                   for j in ast.joins):
            continue
        if not all(holds(get(env, f.column), f) for f in ast.filters):
            continue
        if ast.star:
            out[tuple(v for row in combo for v in row)] += 1
        else:
            out[tuple(get(env, c) for c in ast.projections)] += 1
    return out

@pytest.fixture(scope='module')
def sample_workload():
    return workload.load_workload(os.path.join(SAMPLES, 'workload.yaml'), 'synthetic')

@pytest.fixture(scope='module')
def expected(synthetic_triples, sample_workload):
    """Oracle answers per (schema option, query id), with the schema tables."""
    st = schemagen.gen_st(synthetic_triples)
    answers = {}
    for option, kind in (('st', 'ST'), ('vp', 'VP'), ('wpt', 'WPT'), ('extvp', 'ExtVP')):
        schema = schemagen.build_schema(kind, st)
        for qid in sample_workload.query_ids:
            ast = microsql.parse_sql(sample_workload.sql_for(qid, option))
            answers[(option, qid)] = (schema, ast, oracle(ast, schema.tables))
    return answers

def test_oracle_answers_are_not_trivial(expected):
    for (option, qid), (_, _, answer) in expected.items():
        assert sum(answer.values()) > 0, (option, qid)

@pytest.mark.parametrize('fmt', storage.FORMATS)
@pytest.mark.parametrize('technique', partition.TECHNIQUES)
def test_workload_matches_nested_loop(tmp_path, expected, fmt, technique):
    for (option, qid), (schema, ast, answer) in expected.items():
        root = str(tmp_path / option)
        if not os.path.isdir(root):
            manifest = storage.StorageManifest(root)
            for table in schema:
                plan = partition.PartitionPlan.for_table(technique, 4, table)
                storage.write(partition.partition(table, plan), fmt, root, manifest)
            storage.save_manifest(manifest)
        result = microsql.execute(ast, storage.load_manifest(root))
        assert Counter(result.rows) == answer, (option, qid)
        assert Counter(microsql.execute(ast, schema.tables).rows) == answer
