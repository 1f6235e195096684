import gzip
import io

import pytest
from rdflib import BNode, Literal, URIRef

import ntriples

TEN_LINES = b"""\
# a comment
<s1> <p1> "v1" .
<s1> <p2> <o1> .
<s2> <p1> "v2"@en .
  # an indented comment
<s2> <p3> "3"^^<http://www.w3.org/2001/XMLSchema#integer> .
<s3> <p2> _:b1 .
<s3> <p1> "unterminated .
_:b1 <p1> "with \\"quotes\\"" .
<s4> <p3> "caf\\u00e9" .
"""


def test_empty_input():
    reader = ntriples.parse_ntriples(b'')
    assert list(reader) == []
    assert reader.stats.triples_parsed == 0
    assert reader.stats.lines_skipped == 0

def test_single_literal():
    triples = list(ntriples.parse_ntriples(b'<s1> <p1> "v" .\n'))
    assert triples == [(URIRef('s1'), URIRef('p1'), Literal('v'))]
    assert triples[0].cells() == ('s1', 'p1', 'v')

def test_lenient_fixture():
    reader = ntriples.parse_ntriples(TEN_LINES)
    triples = list(reader)
    assert len(triples) == 7
    assert reader.stats.lines_skipped == 1
    assert reader.stats.lines_ignored == 2
    assert reader.stats.lines_total == 10
    assert reader.stats.distinct_predicates == 3

def test_strict_reports_line():
    with pytest.raises(ntriples.NTriplesParseError) as info:
        list(ntriples.parse_ntriples(TEN_LINES, 'strict'))
    assert info.value.lineno == 8

def test_terms():
    triples = list(ntriples.parse_ntriples(TEN_LINES))
    lang = triples[2].object
    assert lang.language == 'en'
    typed = triples[3].object
    assert str(typed) == '3'
    assert str(typed.datatype) == 'http://www.w3.org/2001/XMLSchema#integer'
    assert triples[4].object == BNode('b1')
    assert triples[5].subject == BNode('b1')
    assert triples[5].cells() == ('_:b1', 'p1', 'with "quotes"')
    assert triples[6].cells()[2] == 'café'

def test_deterministic():
    first = [t.cells() for t in ntriples.parse_ntriples(TEN_LINES)]
    second = [t.cells() for t in ntriples.parse_ntriples(TEN_LINES)]
    assert first == second

def test_trailing_garbage_skipped():
    reader = ntriples.parse_ntriples(b'<s> <p> <o> . extra\n<s> <p> <o2> .\n')
    assert [t.cells()[2] for t in reader] == ['o2']
    assert reader.stats.lines_skipped == 1

def test_literal_subject_rejected():
    with pytest.raises(ntriples.NTriplesParseError):
        list(ntriples.parse_ntriples(b'"lit" <p> <o> .\n', 'strict'))

def test_gzip_input(nt_bytes):
    stream = io.BytesIO(gzip.compress(nt_bytes))
    assert len(list(ntriples.parse_ntriples(stream))) == 6

def test_read_file(tmp_path, nt_bytes):
    path = tmp_path / 'graph.nt.gz'
    path.write_bytes(gzip.compress(nt_bytes))
    triples, stats = ntriples.read_file(str(path))
    assert stats.triples_parsed == len(triples) == 6

def test_distinct_predicates():
    assert ntriples.distinct_predicates([]) == []
    triples = list(ntriples.parse_ntriples(b'<s> <p2> <o> .\n<s> <p1> <o> .\n<t> <p1> <o> .\n'))
    assert ntriples.distinct_predicates(triples) == ['p1', 'p2']

def test_many_predicates():
    lines = ''.join('<s%d> <http://ex.org/p%d> "%d" .\n' % (i, i % 5, i) for i in range(30))
    triples = list(ntriples.parse_ntriples(lines.encode('ascii')))
    assert len(triples) == 30
    assert len(ntriples.distinct_predicates(triples)) == 5

def test_bad_mode():
    with pytest.raises(ValueError):
        ntriples.parse_ntriples(b'', 'sloppy')
