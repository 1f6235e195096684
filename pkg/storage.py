"""
On-disk formats for partitioned tables.

rows-csv
    CSV with a header row, LF line endings, minimal quoting. An empty
    field reads back as None; the empty string is a lone backslash and
    a value starting with a backslash carries one more.

cols-bin
    Columnar binary file, all integers little endian:

        'PCOL1'
        u32   column count
        per column:
            u16  name length, name bytes (UTF-8)
            u32  row count
            per row: u32 length + UTF-8 bytes, length 0xFFFFFFFF for None

Each table partition is one file <table>/part-<k>.csv|.pcol under the
configuration directory, listed in that directory's manifest.csv.
"""

import csv
import io
import logging
import os
import struct
from dataclasses import dataclass, field

import schemagen

logger = logging.getLogger('pyBenchRank.storage')

FORMATS = ('rows-csv', 'cols-bin')
EXTENSIONS = {'rows-csv': 'csv', 'cols-bin': 'pcol'}
MAGIC = b'PCOL1'
NULL_LEN = 0xFFFFFFFF
MANIFEST_NAME = 'manifest.csv'
MANIFEST_HEADER = ['table', 'format', 'partition', 'path', 'rows', 'columns']


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class StorageError(Error):
    pass

class CorruptFileError(StorageError):
    pass


@dataclass
class ManifestEntry:
    table: str
    format: str
    columns: tuple
    paths: list = field(default_factory=list)
    row_counts: list = field(default_factory=list)

    @property
    def rows(self):
        return sum(self.row_counts)


@dataclass
class StorageManifest:
    root: str
    entries: dict = field(default_factory=dict)    # table name -> ManifestEntry

    def add(self, entry):
        if entry.table in self.entries:
            raise StorageError('table %s written twice' % entry.table)
        self.entries[entry.table] = entry

    def __contains__(self, table):
        return table in self.entries

    def tables(self):
        return list(self.entries)


#
# rows-csv
#

# rows-csv cell escapes: '' is written as a lone backslash and a value
# starting with a backslash gets one more, so an empty field stays null
ESCAPE = '\\'

def _csv_cell(value):
    if value is None:
        return ''
    value = str(value)
    if value == '' or value.startswith(ESCAPE):
        return ESCAPE + value
    return value

def _csv_value(cell):
    if cell == '':
        return None
    if cell.startswith(ESCAPE):
        return cell[1:]
    return cell

def encode_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue().encode('utf-8')

def decode_csv(data):
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as e:
        raise CorruptFileError('csv partition is not UTF-8: %s' % e)
    reader = csv.reader(io.StringIO(text, newline=''))
    header = next(reader, None)
    if header is None:
        raise CorruptFileError('csv partition without header')
    rows = []
    for lineno, rec in enumerate(reader, 2):
        if len(rec) != len(header):
            raise CorruptFileError('csv record %d has %d fields, header has %d'
                                   % (lineno, len(rec), len(header)))
        rows.append(tuple(_csv_value(v) for v in rec))
    return tuple(header), rows


#
# cols-bin
#

def encode_pcol(columns, rows):
    out = [MAGIC, struct.pack('<I', len(columns))]
    for idx, name in enumerate(columns):
        bname = name.encode('utf-8')
        out.append(struct.pack('<H', len(bname)))
        out.append(bname)
        out.append(struct.pack('<I', len(rows)))
        for row in rows:
            value = row[idx]
            if value is None:
                out.append(struct.pack('<I', NULL_LEN))
            else:
                bval = str(value).encode('utf-8')
                out.append(struct.pack('<I', len(bval)))
                out.append(bval)
    return b''.join(out)


class _Cursor:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise CorruptFileError('truncated cols-bin data at byte %d' % self.pos)
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))[0]

    def text(self, n):
        start = self.pos
        try:
            return self.take(n).decode('utf-8')
        except UnicodeDecodeError as e:
            raise CorruptFileError('invalid UTF-8 in cols-bin data at byte %d: %s'
                                   % (start, e.reason))


def decode_pcol(data):
    cur = _Cursor(data)
    if cur.take(len(MAGIC)) != MAGIC:
        raise CorruptFileError('bad cols-bin magic')
    ncols = cur.unpack('<I')
    columns = []
    values = []
    for _ in range(ncols):
        columns.append(cur.text(cur.unpack('<H')))
        nrows = cur.unpack('<I')
        col = []
        for _ in range(nrows):
            length = cur.unpack('<I')
            col.append(None if length == NULL_LEN else cur.text(length))
        values.append(col)
    if cur.pos != len(data):
        raise CorruptFileError('%d trailing bytes after cols-bin data'
                               % (len(data) - cur.pos))
    counts = {len(c) for c in values}
    if len(counts) > 1:
        raise CorruptFileError('cols-bin columns have different row counts')
    return tuple(columns), list(zip(*values)) if values else []


ENCODERS = {'rows-csv': encode_csv, 'cols-bin': encode_pcol}
DECODERS = {'rows-csv': decode_csv, 'cols-bin': decode_pcol}


def write(ptable, fmt, directory, manifest=None):
    """
    Write every partition of 'ptable' under directory/<table>/ and record
    it in 'manifest' (a new StorageManifest when None).
    """
    if fmt not in FORMATS:
        raise StorageError('unknown storage format %r' % fmt)
    manifest = manifest or StorageManifest(directory)
    entry = ManifestEntry(ptable.name, fmt, tuple(ptable.columns))
    tdir = os.path.join(directory, ptable.name)
    try:
        os.makedirs(tdir, exist_ok=True)
        for k, rows in enumerate(ptable.partitions):
            rel = os.path.join(ptable.name, 'part-%d.%s' % (k, EXTENSIONS[fmt]))
            with open(os.path.join(directory, rel), 'wb') as f:
                f.write(ENCODERS[fmt](ptable.columns, rows))
            entry.paths.append(rel)
            entry.row_counts.append(len(rows))
    except OSError as e:
        raise StorageError('writing %s: %s' % (ptable.name, e))
    manifest.add(entry)
    logger.debug('wrote %s as %s in %d partition(s)', ptable.name, fmt, len(entry.paths))
    return manifest

def read_table(manifest, table):
    """Load one table of 'manifest', partitions concatenated in order."""
    try:
        entry = manifest.entries[table]
    except KeyError:
        raise StorageError('table %s not in manifest %s' % (table, manifest.root))
    rows = []
    for rel, expected in zip(entry.paths, entry.row_counts):
        path = os.path.join(manifest.root, rel)
        try:
            with open(path, 'rb') as f:
                data = f.read()
        except OSError as e:
            raise StorageError('reading %s: %s' % (path, e))
        columns, part = DECODERS[entry.format](data)
        if columns != tuple(entry.columns):
            raise CorruptFileError('%s: columns %s do not match manifest' % (path, columns))
        if len(part) != expected:
            raise CorruptFileError('%s: %d rows, manifest says %d' % (path, len(part), expected))
        rows.extend(part)
    return schemagen.RelTable(table, entry.columns, rows)

def read(manifest):
    return {name: read_table(manifest, name) for name in manifest.entries}


def save_manifest(manifest):
    path = os.path.join(manifest.root, MANIFEST_NAME)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(MANIFEST_HEADER)
        for entry in manifest.entries.values():
            for k, (rel, count) in enumerate(zip(entry.paths, entry.row_counts)):
                w.writerow([entry.table, entry.format, k, rel.replace(os.sep, '/'),
                            count, ' '.join(entry.columns)])
    return path

def load_manifest(directory):
    path = os.path.join(directory, MANIFEST_NAME)
    manifest = StorageManifest(directory)
    try:
        f = open(path, newline='', encoding='utf-8')
    except OSError as e:
        raise StorageError('no prepared data in %s (%s)' % (directory, e.strerror))
    with f:
        reader = csv.reader(f)
        if next(reader, None) != MANIFEST_HEADER:
            raise CorruptFileError('%s: bad manifest header' % path)
        for rec in reader:
            table, fmt, _, rel, count, columns = rec
            entry = manifest.entries.get(table)
            if entry is None:
                entry = ManifestEntry(table, fmt, tuple(columns.split(' ')))
                manifest.entries[table] = entry
            entry.paths.append(rel.replace('/', os.sep))
            entry.row_counts.append(int(count))
    return manifest
