"""
Streaming N-Triples reader.

Statements are read one per line. Each line is tokenized with rdflib's
N-Triples grammar; blank node labels are kept as written so that two
parses of the same bytes give identical triples.
"""

import gzip
import io
import logging
import re
from collections import namedtuple
from dataclasses import dataclass

from rdflib import BNode, Literal, URIRef
from rdflib.plugins.parsers.ntriples import (ParseError, W3CNTriplesParser, r_literal,
                                             r_nodeid, unquote)

logger = logging.getLogger('pyBenchRank.ntriples')

GZIP_MAGIC = b'\x1f\x8b'
MODES = ('strict', 'lenient')

# any IRI between angle brackets, relative ones included
r_iri = re.compile(r'<([^\s"<>]*)>')


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class NTriplesParseError(Error):
    def __init__(self, lineno, reason):
        Error.__init__(self, 'line %d: %s' % (lineno, reason))
        self.lineno = lineno
        self.reason = reason


class Triple(namedtuple('Triple', ['subject', 'predicate', 'object'])):
    """
    One RDF statement made of rdflib terms. The subject is a URIRef or
    BNode, the predicate a URIRef.
    """
    __slots__ = ()

    def cells(self):
        """The (s, p, o) strings stored in relational tables."""
        return (term_text(self.subject), term_text(self.predicate),
                term_text(self.object))


def term_text(term):
    """
    Table cell text of a term: IRIs without angle brackets, literals as
    their lexical form and blank nodes as '_:label'.
    """
    if isinstance(term, BNode):
        return '_:' + str(term)
    return str(term)


@dataclass
class ParseStats:
    triples_parsed: int = 0
    lines_skipped: int = 0
    lines_ignored: int = 0      # blank and comment lines
    distinct_predicates: int = 0

    @property
    def lines_total(self):
        return self.triples_parsed + self.lines_skipped + self.lines_ignored


class _Sink:
    def __init__(self):
        self.last = None

    def triple(self, s, p, o):
        self.last = (s, p, o)


class _LineParser(W3CNTriplesParser):
    """rdflib's statement grammar with blank node labels kept verbatim."""

    def nodeid(self, bnode_context=None):
        # pylint: disable=unused-argument
        if self.peek('_'):
            return BNode(self.eat(r_nodeid).group(1))
        return False

    def uriref(self):
        if self.peek('<'):
            return URIRef(unquote(self.eat(r_iri).group(1)))
        return False

    def literal(self):
        # lexical forms are kept as written (no canonical normalization)
        if self.peek('"'):
            lit, lang, dtype = self.eat(r_literal).groups()
            if lang and dtype:
                raise ParseError("Can't have both a language and a datatype")
            return Literal(unquote(lit), lang=lang or None,
                           datatype=URIRef(unquote(dtype)) if dtype else None,
                           normalize=False)
        return False

    def statement(self, text):
        self.sink.last = None
        self.line = text
        self.parseline()
        return self.sink.last


def _binary_lines(stream):
    """Iterate the byte lines of 'stream', transparently un-gzipping it."""
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    if not (hasattr(stream, 'seekable') and stream.seekable()):
        stream = io.BytesIO(stream.read())
    head = stream.read(2)
    stream.seek(-len(head), io.SEEK_CUR)
    if head == GZIP_MAGIC:
        logger.debug('gzip input detected')
        stream = gzip.GzipFile(fileobj=stream, mode='rb')
    return iter(stream)


class NTriplesReader:
    """
    Iterate the triples of a byte stream in file order. 'stats' is
    updated as the stream is consumed and is complete once iteration
    ends.

    In strict mode the first malformed line raises NTriplesParseError;
    in lenient mode it is counted in stats.lines_skipped.
    """

    def __init__(self, stream, mode='lenient'):
        if mode not in MODES:
            raise ValueError('mode must be one of %s' % ', '.join(MODES))
        self.stream = stream
        self.mode = mode
        self.stats = ParseStats()
        self.predicates = set()

    def __iter__(self):
        parser = _LineParser(sink=_Sink())
        for lineno, raw in enumerate(_binary_lines(self.stream), 1):
            try:
                text = raw.decode('utf-8').rstrip('\r\n')
            except UnicodeDecodeError as e:
                self._malformed(lineno, 'invalid UTF-8 (%s)' % e.reason)
                continue
            stripped = text.strip()
            if not stripped or stripped.startswith('#'):
                self.stats.lines_ignored += 1
                continue
            try:
                found = parser.statement(text)
            except ParseError as e:
                self._malformed(lineno, str(e))
                continue
            if found is None:
                self._malformed(lineno, 'no statement found')
                continue
            self.stats.triples_parsed += 1
            if found[1] not in self.predicates:
                self.predicates.add(found[1])
                self.stats.distinct_predicates = len(self.predicates)
            yield Triple(*found)

        if self.stats.lines_skipped:
            logger.warning('%d malformed line(s) skipped, %d triples read',
                           self.stats.lines_skipped, self.stats.triples_parsed)

    def _malformed(self, lineno, reason):
        if self.mode == 'strict':
            raise NTriplesParseError(lineno, reason)
        logger.debug('skipping line %d: %s', lineno, reason)
        self.stats.lines_skipped += 1


def parse_ntriples(stream, mode='lenient'):
    """Return a NTriplesReader over 'stream' (bytes or a binary file object)."""
    return NTriplesReader(stream, mode)

def read_file(path, mode='lenient'):
    """Parse a whole .nt or .nt.gz file; returns (list of triples, stats)."""
    with open(path, 'rb') as f:
        reader = NTriplesReader(f, mode)
        triples = list(reader)
    return triples, reader.stats

def distinct_predicates(triples):
    """Predicate IRIs of 'triples', deduplicated and sorted."""
    return sorted({str(t[1]) for t in triples})


__all__ = ['Triple', 'ParseStats', 'NTriplesReader', 'NTriplesParseError',
           'parse_ntriples', 'read_file', 'distinct_predicates', 'term_text',
           'URIRef', 'Literal', 'BNode']
