import os
import random
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import config
import configspace
import ntriples
import results

SAMPLES = os.path.join(ROOT, 'samples')

NT_FIXTURE = b"""\
<http://ex.org/alice> <http://ex.org/knows> <http://ex.org/bob> .
<http://ex.org/alice> <http://ex.org/name> "Alice" .
<http://ex.org/bob> <http://ex.org/knows> <http://ex.org/carol> .
<http://ex.org/bob> <http://ex.org/name> "Bob" .
<http://ex.org/carol> <http://ex.org/age> "27" .
<http://ex.org/alice> <http://ex.org/knows> <http://ex.org/carol> .
"""

BENCHMARK_SPACE = {'schemas': ['ST', 'VP', 'PT', 'WPT', 'ExtVP'],
               'partition': ['horizontal', 'subject', 'predicate'],
               'storage': ['CSV', 'Avro', 'Parquet', 'ORC']}


@pytest.fixture
def nt_bytes():
    return NT_FIXTURE

@pytest.fixture
def benchmark_space():
    return configspace.ConfigSpace.from_mapping(BENCHMARK_SPACE)

@pytest.fixture
def small_space():
    """2 schemas x 2 partitionings x 2 formats"""
    return configspace.ConfigSpace.from_mapping({
        'schema': ['st', 'vp'],
        'partition': ['horizontal', 'subject'],
        'storage': ['csv', 'parquet']})

@pytest.fixture
def load_config(monkeypatch):
    """Load a YAML text as the configuration for one test."""
    monkeypatch.setattr(config, 'config', {})
    monkeypatch.setattr(config, 'configs_found', False)

    def load(text):
        config.load_string(text)
    return load


def make_matrix(space, runtime, queries=None):
    runtime = np.asarray(runtime, dtype=float)
    queries = queries or ['Q%d' % (j + 1) for j in range(runtime.shape[1])]
    return results.ResultMatrix(space, space.enumerate(), queries, runtime)

@pytest.fixture
def matrix_of():
    return make_matrix


def synthetic_nt(count=1000, seed=11):
    """
    'count' N-Triples lines over example.org people: knows links, names,
    ages and a few awkward literals (empty, commas and quotes, unicode).
    """
    rnd = random.Random(seed)
    ex = 'http://example.org/'
    people = ['<%sperson%d>' % (ex, i) for i in range(120)]
    awkward = ['""', '"a, \\"b\\""', '"na\\u00EFve \\u2603"', '"\\\\x"', '"two\\nlines"']
    lines = []
    for i in range(count):
        s = rnd.choice(people)
        kind = rnd.random()
        if kind < 0.45:
            lines.append('%s <%sknows> %s .' % (s, ex, rnd.choice(people)))
        elif kind < 0.65:
            lines.append('%s <%sname> "Name %d" .' % (s, ex, rnd.randrange(200)))
        elif kind < 0.85:
            lines.append('%s <%sage> "%d" .' % (s, ex, rnd.randrange(18, 90)))
        else:
            lines.append('%s <%slikes> %s .' % (s, ex, rnd.choice(awkward)))
    return ('\n'.join(lines) + '\n').encode('utf-8')

@pytest.fixture(scope='session')
def synthetic_triples():
    return list(ntriples.parse_ntriples(synthetic_nt(), 'strict'))
